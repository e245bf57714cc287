//! Separation distance of independent tuples and the θ sandwich.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::RateMeasure;
use crate::numeric::{clamp_unit, ln_one_minus, ln_one_minus_exp_neg, one_minus_exp};

/// Uniform bound `g` on the per-coordinate deviation from a pure
/// exponential decay of separation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationEnvelope {
    /// Pure exponential coordinates.
    #[default]
    Zero,
    /// `g(t) = amplitude / (1 + t)`.
    RationalDecay { amplitude: f64 },
}

impl PerturbationEnvelope {
    pub fn rational_decay(amplitude: f64) -> Result<Self> {
        if amplitude.is_finite() && amplitude >= 0.0 {
            Ok(Self::RationalDecay { amplitude })
        } else {
            Err(Error::Domain(format!(
                "envelope amplitude must be finite and >= 0, got {amplitude}"
            )))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::RationalDecay { amplitude } => amplitude / (1.0 + t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Self::Zero => true,
            Self::RationalDecay { amplitude } => amplitude == 0.0,
        }
    }
}

/// Separation of a single pure-exponential coordinate: `e^{-λt}`.
pub fn sep_single(lambda: f64, t: f64) -> f64 {
    (-lambda * t).exp()
}

/// Separation of a tuple from its coordinates: `1 - Π (1 - sep_i)`.
pub fn sep_product(seps: &[f64]) -> f64 {
    let log_survival: f64 = seps.iter().map(|&s| ln_one_minus(s)).sum();
    one_minus_exp(log_survival)
}

/// `ln(1 - sep(t)) = n Σ_j μ_j ln(1 - e^{-t λ_j})`.
pub fn log_complement_sep(measure: &RateMeasure, t: f64) -> f64 {
    let n = measure.n() as f64;
    let mut acc = 0.0;
    for a in measure.atoms() {
        let term = ln_one_minus_exp_neg(a.rate * t);
        if term == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc += n * a.mass * term;
    }
    acc
}

/// Exact separation distance of the tuple described by `measure` at `t`.
pub fn sep_tuple(measure: &RateMeasure, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    one_minus_exp(log_complement_sep(measure, t))
}

/// `θ(t) = n ∫ e^{-λt} μ(dλ)`, the mean number of level-`t` exceedances.
pub fn theta(measure: &RateMeasure, t: f64) -> f64 {
    let n = measure.n() as f64;
    n * measure
        .atoms()
        .iter()
        .map(|a| a.mass * (-a.rate * t).exp())
        .sum::<f64>()
}

/// Lower and upper sandwich bounds on the separation distance in terms of θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

/// Earliest time at which the θ sandwich is valid: `ln 2 / κ`.
pub fn sandwich_start(measure: &RateMeasure) -> f64 {
    std::f64::consts::LN_2 / measure.kappa()
}

/// `1 - exp(-e^{-tg}θ) <= sep(t) <= 1 - exp(-2 e^{2tg} θ)`, valid from
/// `t >= ln 2 / κ` on.
pub fn sandwich_bounds(
    measure: &RateMeasure,
    t: f64,
    envelope: PerturbationEnvelope,
) -> Result<Sandwich> {
    let start = sandwich_start(measure);
    if t.is_nan() || t < start {
        return Err(Error::Precondition(format!(
            "sandwich bounds need t >= ln2/κ = {start}, got {t}"
        )));
    }
    let th = theta(measure, t);
    let tg = t * envelope.eval(t);
    let lower = one_minus_exp(-(-tg).exp() * th);
    let upper = one_minus_exp(-2.0 * (2.0 * tg).exp() * th);
    Ok(Sandwich {
        lower: clamp_unit(lower),
        upper: clamp_unit(upper.max(lower)),
    })
}
