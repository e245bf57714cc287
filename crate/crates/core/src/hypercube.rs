//! Continuous-time random walk on the hypercube `Z_2^n`.
//!
//! Coordinate `i` carries a Poisson clock of rate `2ρ_i`; at each ring the
//! bit is flipped with probability one half. The first ring `T_i` is an
//! optimal strong stationary time for that coordinate, with
//! `P(T_i > t) = e^{-2ρ_i t}`, and `max_i T_i` is optimal for the walk.
//!
//! The coupling simulated here lets two copies move independently on each
//! coordinate until they first agree there, then synchronously. A
//! disagreeing coordinate agrees at the first ring of a rate-`2ρ_i` clock.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::RateMeasure;
use crate::numeric::{ln_one_minus, one_minus_exp};
use crate::output::fmt_sig;
use crate::rng::{exponential, replica_rng};
use crate::separation::{sep_product, sep_single};

/// Hard ceiling for [`brute_force_sep`]; `2^n` states are enumerated.
pub const BRUTE_FORCE_MAX_DIM: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    rho: Vec<f64>,
}

impl WalkSpec {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (index, &r) in rho.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidRate { index, value: r });
            }
        }
        Ok(Self { rho })
    }

    /// Every coordinate at rate `ρ = 1`.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Separation decay rates `λ_i = 2ρ_i`.
    pub fn separation_rates(&self) -> Vec<f64> {
        self.rho.iter().map(|r| 2.0 * r).collect()
    }

    pub fn measure(&self) -> RateMeasure {
        RateMeasure::from_rates(&self.separation_rates()).expect("validated rates")
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rho.iter().map(|r| r * factor).collect())
    }
}

/// `P(max_i T_i > t) = 1 - Π_i (1 - e^{-2ρ_i t})`, the separation distance.
pub fn exact_sep_tail(spec: &WalkSpec, t: f64) -> f64 {
    let seps: Vec<f64> = spec.rho.iter().map(|&r| sep_single(2.0 * r, t)).collect();
    sep_product(&seps)
}

/// Coupling-time tail from a stationary start: every coordinate disagrees
/// initially with probability one half.
pub fn exact_coupling_tail(spec: &WalkSpec, t: f64) -> f64 {
    let log_survival: f64 = spec
        .rho
        .iter()
        .map(|&r| ln_one_minus(0.5 * sep_single(2.0 * r, t)))
        .sum();
    one_minus_exp(log_survival)
}

/// Coupling-time tail for a fixed initial disagreement set.
pub fn exact_coupling_tail_masked(spec: &WalkSpec, disagree: &[bool], t: f64) -> Result<f64> {
    check_mask(spec, disagree)?;
    let seps: Vec<f64> = spec
        .rho
        .iter()
        .zip(disagree)
        .filter(|(_, &d)| d)
        .map(|(&r, _)| sep_single(2.0 * r, t))
        .collect();
    Ok(sep_product(&seps))
}

fn check_mask(spec: &WalkSpec, mask: &[bool]) -> Result<()> {
    if mask.len() == spec.n() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "mask has {} entries for a walk of dimension {}",
            mask.len(),
            spec.n()
        )))
    }
}

/// Separation distance by full enumeration of `Z_2^n`:
/// `max_y (1 - 2^n P^t(start, y))`, with the time-`t` kernel formed as the
/// product of per-coordinate two-state kernels.
pub fn brute_force_sep(spec: &WalkSpec, t: f64, start: &[bool]) -> Result<f64> {
    let n = spec.n();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_DIM,
        });
    }
    check_mask(spec, start)?;
    // 2 P_i(stay) and 2 P_i(flip)
    let kernels: Vec<(f64, f64)> = spec
        .rho
        .iter()
        .map(|&r| {
            let decay = (-2.0 * r * t).exp();
            (1.0 + decay, 1.0 - decay)
        })
        .collect();
    let start_bits = start
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
    let worst = (0..1usize << n)
        .into_par_iter()
        .map(|y| {
            let diff = y ^ start_bits;
            kernels
                .iter()
                .enumerate()
                .map(|(i, &(stay, flip))| if diff >> i & 1 == 0 { stay } else { flip })
                .product::<f64>()
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok((1.0 - worst).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimKind {
    Sst,
    Coupling,
}

/// Initial configuration of the second copy relative to the first.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingStart {
    /// Uniform start: each coordinate disagrees with probability one half.
    Stationary,
    /// Fixed disagreement set.
    Mask(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub spec: WalkSpec,
    pub kind: SimKind,
    pub seed: u64,
    pub replicas: usize,
    /// Indexed by replica.
    pub samples: Vec<f64>,
    sorted: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    #[serde(rename = "0.5")]
    pub q50: f64,
    #[serde(rename = "0.9")]
    pub q90: f64,
    #[serde(rename = "0.99")]
    pub q99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub seed: u64,
    pub replicas: usize,
    pub kind: SimKind,
    pub quantiles: Quantiles,
}

impl SimResult {
    fn new(spec: WalkSpec, kind: SimKind, seed: u64, samples: Vec<f64>) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            spec,
            kind,
            seed,
            replicas: samples.len(),
            samples,
            sorted,
        }
    }

    /// Empirical `P(T > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        let at_most = self.sorted.partition_point(|&s| s <= t);
        (self.replicas - at_most) as f64 / self.replicas as f64
    }

    /// Smallest sample `s` with empirical `P(T <= s) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p * self.replicas as f64).ceil() as usize).clamp(1, self.replicas);
        self.sorted[k - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.replicas as f64
    }

    /// `max_t |empirical survival(t) - exact(t)|` over `grid`.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, grid: &[f64], exact: F) -> f64 {
        grid.iter()
            .map(|&t| (self.survival(t) - exact(t)).abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> SimSummary {
        SimSummary {
            seed: self.seed,
            replicas: self.replicas,
            kind: self.kind,
            quantiles: Quantiles {
                q50: self.quantile(0.5),
                q90: self.quantile(0.9),
                q99: self.quantile(0.99),
            },
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "replica,time")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{}", fmt_sig(*s))?;
        }
        Ok(())
    }
}

/// DKW half-width: with probability `1 - alpha` the empirical distribution
/// of `replicas` samples stays within this distance of the truth, uniformly.
pub fn dkw_half_width(replicas: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * replicas as f64)).sqrt()
}

fn check_replicas(replicas: usize) -> Result<()> {
    if replicas == 0 {
        Err(Error::Precondition("replicas must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Samples the optimal strong stationary time `max_i T_i`.
pub fn simulate_sst(spec: &WalkSpec, replicas: usize, seed: u64) -> Result<SimResult> {
    check_replicas(replicas)?;
    let samples = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            spec.rho
                .iter()
                .map(|&rho| exponential(&mut rng, 2.0 * rho))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(SimResult::new(spec.clone(), SimKind::Sst, seed, samples))
}

/// Samples the coupling time from a stationary second copy.
pub fn simulate_coupling(spec: &WalkSpec, replicas: usize, seed: u64) -> Result<SimResult> {
    simulate_coupling_from(spec, &CouplingStart::Stationary, replicas, seed)
}

pub fn simulate_coupling_from(
    spec: &WalkSpec,
    start: &CouplingStart,
    replicas: usize,
    seed: u64,
) -> Result<SimResult> {
    check_replicas(replicas)?;
    if let CouplingStart::Mask(mask) = start {
        check_mask(spec, mask)?;
    }
    let samples = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut time = 0.0_f64;
            for (i, &rho) in spec.rho.iter().enumerate() {
                let disagree = match start {
                    CouplingStart::Stationary => rng.random::<bool>(),
                    CouplingStart::Mask(mask) => mask[i],
                };
                if disagree {
                    time = time.max(exponential(&mut rng, 2.0 * rho));
                }
            }
            time
        })
        .collect();
    Ok(SimResult::new(spec.clone(), SimKind::Coupling, seed, samples))
}
