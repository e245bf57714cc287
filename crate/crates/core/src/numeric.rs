//! Log-space helpers for products of near-one probabilities.
//!
//! A tuple of `n` coordinates multiplies `n` factors of the form `1 - ε`.
//! Accumulating `ln(1 - ε)` with `ln_1p` and mapping back with `exp_m1`
//! keeps full relative precision on both tails of the result.

/// Below this magnitude the series forms are used directly.
pub(crate) const SERIES_THRESHOLD: f64 = 1e-8;

/// `ln(1 - e^{-x})` for `x >= 0`; `-inf` at `x = 0`.
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x >= 0.0 || x.is_nan());
    if x == 0.0 {
        f64::NEG_INFINITY
    } else if x < SERIES_THRESHOLD {
        // 1 - e^{-x} = x - x^2/2 + ...
        x.ln() + (-0.5 * x).ln_1p()
    } else if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(1 - p)` for `p` in `[0, 1]`.
pub fn ln_one_minus(p: f64) -> f64 {
    if p < SERIES_THRESHOLD {
        -p - 0.5 * p * p
    } else {
        (-p).ln_1p()
    }
}

/// `1 - e^{s}` for `s <= 0`, clamped to `[0, 1]`.
pub fn one_minus_exp(s: f64) -> f64 {
    let v = if s > -SERIES_THRESHOLD {
        -s * (1.0 + 0.5 * s)
    } else {
        -s.exp_m1()
    };
    clamp_unit(v)
}

pub fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        v
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
