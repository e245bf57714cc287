//! Extreme-value views of the separation profile.
//!
//! When every coordinate rate is drawn independently from a finite model
//! `P(ρ = p_k) = q_k`, the averaged separation at `t = (ln n + c) / (2p*)`
//! converges to the Gumbel tail `1 - exp(-q* e^{-c})`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{RateMeasure, MASS_TOLERANCE};
use crate::numeric::{compensated_sum, ln_one_minus, one_minus_exp};
use crate::rng::{exponential, replica_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRateModel {
    p: Vec<f64>,
    q: Vec<f64>,
    p_star: f64,
    q_star: f64,
}

impl RandomRateModel {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if p.len() != q.len() {
            return Err(Error::Precondition(format!(
                "{} rates but {} probabilities",
                p.len(),
                q.len()
            )));
        }
        for (index, &v) in p.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidRate { index, value: v });
            }
        }
        for (index, &v) in q.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidMass { index, value: v });
            }
        }
        let sum = compensated_sum(q.iter().copied());
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::MassSum { sum });
        }
        let p_star = p
            .iter()
            .zip(&q)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&v, _)| v)
            .fold(f64::INFINITY, f64::min);
        let q_star = p
            .iter()
            .zip(&q)
            .filter(|(&v, _)| v == p_star)
            .map(|(_, &w)| w)
            .sum();
        Ok(Self {
            p,
            q,
            p_star,
            q_star,
        })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Smallest rate with positive probability.
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// Probability of drawing `p*`.
    pub fn q_star(&self) -> f64 {
        self.q_star
    }

    /// Draws one rate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (&p, &q) in self.p.iter().zip(&self.q) {
            acc += q;
            if u < acc {
                return p;
            }
        }
        // u landed in the rounding gap above the last partial sum
        self.p[self.q.iter().rposition(|&w| w > 0.0).unwrap_or(self.p.len() - 1)]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.p.iter().map(|v| v * factor).collect(), self.q.clone())
    }
}

/// Gumbel tail `1 - exp(-q* e^{-c})`.
pub fn gumbel_limit(model: &RandomRateModel, c: f64) -> f64 {
    one_minus_exp(-model.q_star * (-c).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnealedSep {
    pub value: f64,
    /// The inner sum reached 1 and the value was clamped to 1.
    pub clamped: bool,
}

/// `1 - (1 - Σ_k q_k (e^{-c}/n)^{p_k/p*})^n`: the separation at
/// `t = (ln n + c) / (2p*)` averaged over the rate draws.
pub fn annealed_sep(model: &RandomRateModel, n: u64, c: f64) -> Result<AnnealedSep> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let log_base = -c - (n as f64).ln();
    let inner: f64 = model
        .p
        .iter()
        .zip(&model.q)
        .map(|(&p, &q)| q * (log_base * p / model.p_star).exp())
        .sum();
    if inner >= 1.0 {
        return Ok(AnnealedSep {
            value: 1.0,
            clamped: true,
        });
    }
    Ok(AnnealedSep {
        value: one_minus_exp(n as f64 * ln_one_minus(inner)),
        clamped: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceedanceEstimate {
    pub estimate: f64,
    /// NaN for a single replica.
    pub std_error: f64,
}

/// Monte-Carlo mean of `Σ_i 1{V_i > t}` where the `V_i` are `n` i.i.d.
/// exponentials whose rate is drawn from `measure`; targets `θ(t)`.
pub fn exceedance_mean_mc(
    measure: &RateMeasure,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<ExceedanceEstimate> {
    if replicas == 0 {
        return Err(Error::Precondition("replicas must be >= 1".into()));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::Precondition(format!("level must be >= 0, got {t}")));
    }
    let n = measure.n();
    let atoms = measure.atoms();
    let cumulative = measure.cumulative_masses();
    let last = atoms.len() - 1;
    let counts: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut exceed = 0u64;
            for _ in 0..n {
                let u: f64 = rng.random();
                let j = cumulative.partition_point(|&c| c <= u).min(last);
                if exponential(&mut rng, atoms[j].rate) > t {
                    exceed += 1;
                }
            }
            exceed as f64
        })
        .collect();
    let r = replicas as f64;
    let mean = counts.iter().sum::<f64>() / r;
    let std_error = if replicas > 1 {
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
        (var / r).sqrt()
    } else {
        f64::NAN
    };
    Ok(ExceedanceEstimate {
        estimate: mean,
        std_error,
    })
}
