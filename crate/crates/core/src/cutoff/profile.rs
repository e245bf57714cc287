use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cutoff_time, CutoffReport};
use crate::error::{Error, Result};
use crate::families::{generate, FamilyDescriptor};
use crate::measure::RateMeasure;
use crate::output::fmt_sig;
use crate::separation::{sandwich_bounds, sandwich_start, sep_tuple, PerturbationEnvelope};

/// Which window scale `b` spaces the profile grid `t = τ + c b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowChoice {
    Left,
    Right,
    Unit,
    Custom(f64),
}

impl WindowChoice {
    pub fn resolve(&self, report: &CutoffReport) -> Result<f64> {
        match *self {
            Self::Left => Ok(report.b_left),
            Self::Unit => Ok(1.0),
            Self::Right => report.b_right.ok_or_else(|| {
                Error::Precondition(format!(
                    "no right window: τκ = {} is not positive",
                    report.tau_kappa
                ))
            }),
            Self::Custom(b) if b.is_finite() && b > 0.0 => Ok(b),
            Self::Custom(b) => Err(Error::Precondition(format!(
                "custom window must be finite and > 0, got {b}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub c: f64,
    pub t: f64,
    pub sep: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationProfile {
    pub report: CutoffReport,
    pub window: f64,
    pub rows: Vec<ProfileRow>,
    /// Grid points whose time `τ + c b` was negative.
    pub dropped: usize,
}

impl SeparationProfile {
    pub const CSV_HEADER: &'static str = "c,t,sep,lower,upper";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig(r.c),
                fmt_sig(r.t),
                fmt_sig(r.sep),
                opt(r.lower),
                opt(r.upper)
            )?;
        }
        Ok(())
    }
}

fn sorted_grid(c_grid: &[f64]) -> Result<Vec<f64>> {
    if c_grid.is_empty() {
        return Err(Error::Precondition("c grid is empty".into()));
    }
    if let Some(bad) = c_grid.iter().find(|c| !c.is_finite()) {
        return Err(Error::Precondition(format!("c grid holds {bad}")));
    }
    let mut grid = c_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    Ok(grid)
}

/// Evaluates the separation distance at `t = τ + c b` for each `c`.
/// Sandwich bounds are attached from `t >= ln 2 / κ` on.
pub fn profile(
    measure: &RateMeasure,
    window: WindowChoice,
    c_grid: &[f64],
) -> Result<SeparationProfile> {
    let grid = sorted_grid(c_grid)?;
    let report = cutoff_time(measure);
    let b = window.resolve(&report)?;
    let start = sandwich_start(measure);
    let rows: Vec<ProfileRow> = grid
        .par_iter()
        .filter_map(|&c| {
            let t = report.tau + c * b;
            if t < 0.0 {
                return None;
            }
            let bounds = (t >= start)
                .then(|| sandwich_bounds(measure, t, PerturbationEnvelope::Zero).ok())
                .flatten();
            Some(ProfileRow {
                c,
                t,
                sep: sep_tuple(measure, t),
                lower: bounds.map(|s| s.lower),
                upper: bounds.map(|s| s.upper),
            })
        })
        .collect();
    let dropped = grid.len() - rows.len();
    Ok(SeparationProfile {
        report,
        window: b,
        rows,
        dropped,
    })
}

/// Finite-data summary of how `τκ` moves along the `n` list. It describes
/// the observed sequence only and says nothing about the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    /// Flat to within relative `1e-9`.
    Bounded,
    Mixed,
    /// Fewer than two points.
    Insufficient,
}

impl Trend {
    pub fn classify(values: &[f64]) -> Self {
        if values.len() < 2 {
            return Self::Insufficient;
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        if hi - lo <= 1e-9 * hi.abs().max(lo.abs()).max(1.0) {
            return Self::Bounded;
        }
        let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.iter().all(|&d| d > 0.0) {
            Self::Increasing
        } else if steps.iter().all(|&d| d < 0.0) {
            Self::Decreasing
        } else {
            Self::Mixed
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Increasing => "increasing",
            Self::Decreasing => "decreasing",
            Self::Bounded => "bounded",
            Self::Mixed => "mixed",
            Self::Insufficient => "insufficient",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub c: f64,
    pub t: f64,
    /// Absent when `t < 0`.
    pub sep: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberDiagnostics {
    pub report: CutoffReport,
    pub window: Option<f64>,
    pub profile: Vec<ProfilePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyDiagnostics {
    pub members: Vec<MemberDiagnostics>,
    pub tau_kappa: Vec<f64>,
    pub trend: Trend,
}

/// Cutoff reports for a family along `n_list`, the `τκ` sequence with its
/// observed trend, and `sep(τ + c b)` per member on a fixed `c` grid.
pub fn family_diagnostics(
    family: &FamilyDescriptor,
    n_list: &[u64],
    window: WindowChoice,
    c_grid: &[f64],
) -> Result<FamilyDiagnostics> {
    family_diagnostics_with(
        |n| generate(family, n).map(|m| m.measure),
        n_list,
        window,
        c_grid,
    )
}

/// [`family_diagnostics`] over an arbitrary measure generator.
pub fn family_diagnostics_with<F>(
    generator: F,
    n_list: &[u64],
    window: WindowChoice,
    c_grid: &[f64],
) -> Result<FamilyDiagnostics>
where
    F: Fn(u64) -> Result<RateMeasure> + Sync,
{
    if n_list.is_empty() {
        return Err(Error::Precondition("n list is empty".into()));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "n list must be strictly increasing and start at n >= 1".into(),
        ));
    }
    let grid = if c_grid.is_empty() {
        Vec::new()
    } else {
        sorted_grid(c_grid)?
    };
    let members = n_list
        .par_iter()
        .map(|&n| {
            let measure = generator(n).map_err(|e| Error::Family {
                n,
                source: Box::new(e),
            })?;
            let report = cutoff_time(&measure);
            let b = window.resolve(&report).ok();
            let profile = grid
                .iter()
                .map(|&c| {
                    let t = b.map_or(f64::NAN, |b| report.tau + c * b);
                    let sep = (t >= 0.0).then(|| sep_tuple(&measure, t));
                    ProfilePoint { c, t, sep }
                })
                .collect();
            Ok(MemberDiagnostics {
                report,
                window: b,
                profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tau_kappa: Vec<f64> = members.iter().map(|m| m.report.tau_kappa).collect();
    let trend = Trend::classify(&tau_kappa);
    Ok(FamilyDiagnostics {
        members,
        tau_kappa,
        trend,
    })
}
