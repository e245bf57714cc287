use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// Principal branch of the Lambert W function on `[0, ∞)`: the `w >= 0`
/// solving `w e^w = x`.
///
/// Halley iteration from the Winitzki approximation below `e` and the
/// two-term asymptotic `ln x - ln ln x + ln ln x / ln x` above it.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "lambert_w is only provided on [0, ∞), got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x < 1e-8 {
        // W(x) = x - x^2 + 3/2 x^3 - 8/3 x^4 + ...
        return Ok(x * (1.0 - x * (1.0 - x * (1.5 - x * (8.0 / 3.0)))));
    }
    let mut w = if x < E {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w.max(0.0))
}
