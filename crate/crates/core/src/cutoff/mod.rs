//! Cutoff times, window bounds and profiles.
//!
//! For a rate measure `μ` of an `n`-tuple the separation cutoff time is
//!
//! ```text
//! τ = max_{λ >= κ} ln(n μ(0, λ]) / λ
//! ```
//!
//! Between two consecutive atoms the numerator is constant while the
//! denominator grows, so a maximiser over `λ >= κ` always sits on an atom.
//! The search is therefore a single pass over the atoms.

mod lambert;
mod profile;

pub use lambert::lambert_w;
pub use profile::{
    family_diagnostics, family_diagnostics_with, profile, FamilyDiagnostics, MemberDiagnostics, ProfilePoint, ProfileRow,
    SeparationProfile, Trend, WindowChoice,
};

use serde::{Deserialize, Serialize};

use crate::measure::RateMeasure;

/// Relative tolerance under which two candidate maxima count as tied; the
/// smallest tied rate becomes `λ*`.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub n: u64,
    pub tau: f64,
    pub lambda_star: f64,
    pub kappa: f64,
    pub beta: f64,
    pub tau_kappa: f64,
    /// Left-window bound `1/λ*`.
    pub b_left: f64,
    /// Right-window bound `W(τκ)/κ`; absent when `τκ <= 0`.
    pub b_right: Option<f64>,
    /// Set when `n μ(0, κ] < 1`, so the first candidate is negative.
    #[serde(skip)]
    pub sub_unit_first_atom: bool,
}

/// Computes `τ`, `λ*`, `β` and the window bounds for `measure`.
pub fn cutoff_time(measure: &RateMeasure) -> CutoffReport {
    let n = measure.n() as f64;
    let candidates: Vec<(f64, f64)> = measure
        .atoms()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let mass_below = n * measure.cumulative_at(j);
            (mass_below.ln() / a.rate, mass_below)
        })
        .collect();
    let best = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = TIE_TOLERANCE * best.abs();
    let star = candidates
        .iter()
        .position(|&(v, _)| v == best || v >= best - slack)
        .expect("measure has at least one atom");

    let lambda_star = measure.atoms()[star].rate;
    let beta = candidates[star].1;
    let tau = beta.ln() / lambda_star;
    let kappa = measure.kappa();
    let tau_kappa = tau * kappa;
    let b_right = (tau_kappa > 0.0).then(|| {
        lambert_w(tau_kappa).expect("τκ > 0 is in the domain of W") / kappa
    });
    CutoffReport {
        n: measure.n(),
        tau,
        lambda_star,
        kappa,
        beta,
        tau_kappa,
        b_left: 1.0 / lambda_star,
        b_right,
        sub_unit_first_atom: candidates[0].1 < 1.0,
    }
}
