//! Discrete rate measures and their rescalings.
//!
//! A [`RateMeasure`] places mass `#{i : λ_i = λ} / n` at each distinct
//! exponential rate `λ` of an `n`-tuple. Masses may also be supplied
//! directly (for limiting measures), in which case `n` is carried
//! separately and only `n · μ(0, λ]` is ever needed downstream.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Absolute tolerance on `Σ masses = 1`.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Significant digits kept by [`RateMeasure::from_rates_quantized`].
pub const QUANTIZE_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub rate: f64,
    pub mass: f64,
}

/// Discrete probability measure on `(0, ∞)` describing the rates of an
/// `n`-tuple. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMeasure {
    n: u64,
    atoms: Vec<Atom>,
    /// `cumulative[j] = μ(0, atoms[j].rate]`.
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    n: u64,
    atoms: Vec<Atom>,
}

fn check_rate(index: usize, rate: f64) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate { index, value: rate })
    }
}

/// Rounds to [`QUANTIZE_DIGITS`] significant digits.
pub fn quantize(rate: f64) -> f64 {
    format!("{:.*e}", QUANTIZE_DIGITS - 1, rate)
        .parse()
        .unwrap_or(rate)
}

impl RateMeasure {
    /// Builds the empirical measure of a list of coordinate rates.
    /// Equal rates (bitwise) are aggregated into one atom.
    pub fn from_rates(rates: &[f64]) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (i, &r) in rates.iter().enumerate() {
            check_rate(i, r)?;
        }
        let mut sorted = rates.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut counts: Vec<(f64, u64)> = Vec::new();
        for r in sorted {
            match counts.last_mut() {
                Some((rate, c)) if *rate == r => *c += 1,
                _ => counts.push((r, 1)),
            }
        }
        Ok(Self::from_sorted_counts(counts))
    }

    /// Like [`from_rates`](Self::from_rates) but first rounds every rate to
    /// twelve significant digits, merging near-duplicates produced by
    /// floating-point formulas.
    pub fn from_rates_quantized(rates: &[f64]) -> Result<Self> {
        for (i, &r) in rates.iter().enumerate() {
            check_rate(i, r)?;
        }
        let q: Vec<f64> = rates.iter().map(|&r| quantize(r)).collect();
        Self::from_rates(&q)
    }

    /// Builds a measure from `(rate, count)` pairs; `n = Σ counts`.
    pub fn from_counts(pairs: &[(f64, u64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for (i, &(r, c)) in pairs.iter().enumerate() {
            check_rate(i, r)?;
            if c == 0 {
                return Err(Error::InvalidMass { index: i, value: 0.0 });
            }
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, u64)> = Vec::with_capacity(sorted.len());
        for (r, c) in sorted {
            match merged.last_mut() {
                Some((rate, total)) if *rate == r => *total += c,
                _ => merged.push((r, c)),
            }
        }
        Ok(Self::from_sorted_counts(merged))
    }

    fn from_sorted_counts(counts: Vec<(f64, u64)>) -> Self {
        let n: u64 = counts.iter().map(|&(_, c)| c).sum();
        let nf = n as f64;
        let mut atoms = Vec::with_capacity(counts.len());
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut running = 0u64;
        for (rate, c) in counts {
            running += c;
            atoms.push(Atom {
                rate,
                mass: c as f64 / nf,
            });
            cumulative.push(running as f64 / nf);
        }
        Self {
            n,
            atoms,
            cumulative,
        }
    }

    /// Builds a measure from arbitrary positive masses summing to one, with
    /// the tuple dimension `n` given separately.
    pub fn from_masses(n: u64, atoms: &[Atom]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for (i, a) in atoms.iter().enumerate() {
            check_rate(i, a.rate)?;
            if !(a.mass.is_finite() && a.mass > 0.0 && a.mass <= 1.0 + MASS_TOLERANCE) {
                return Err(Error::InvalidMass {
                    index: i,
                    value: a.mass,
                });
            }
        }
        let sum = compensated_sum(atoms.iter().map(|a| a.mass));
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::MassSum { sum });
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        let mut merged: Vec<Atom> = Vec::with_capacity(sorted.len());
        for a in sorted {
            match merged.last_mut() {
                Some(last) if last.rate == a.rate => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        let mut cumulative = Vec::with_capacity(merged.len());
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        for a in &merged {
            // running Neumaier sum so the last entry is 1 to within rounding
            let t = sum + a.mass;
            if sum.abs() >= a.mass.abs() {
                comp += (sum - t) + a.mass;
            } else {
                comp += (a.mass - t) + sum;
            }
            sum = t;
            cumulative.push((sum + comp).min(1.0));
        }
        Ok(Self {
            n,
            atoms: merged,
            cumulative,
        })
    }

    /// A point mass at `rate` for an `n`-tuple.
    pub fn dirac(n: u64, rate: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Self::from_counts(&[(rate, n)])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Smallest rate in the support.
    pub fn kappa(&self) -> f64 {
        self.atoms[0].rate
    }

    pub fn max_rate(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].rate
    }

    /// `μ(0, atoms[index].rate]`.
    pub fn cumulative_at(&self, index: usize) -> f64 {
        self.cumulative[index]
    }

    /// Prefix masses, one per atom.
    pub fn cumulative_masses(&self) -> &[f64] {
        &self.cumulative
    }

    /// `μ(0, λ]`: right-continuous step function.
    pub fn cumulative(&self, lambda: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.rate <= lambda);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// The same measure with every rate multiplied by `factor`.
    pub fn rescale_rates(&self, factor: f64) -> Result<Self> {
        check_rate(0, factor)?;
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                rate: a.rate * factor,
                mass: a.mass,
            })
            .collect();
        for (i, a) in atoms.iter().enumerate() {
            check_rate(i, a.rate)?;
        }
        Ok(Self {
            n: self.n,
            atoms,
            cumulative: self.cumulative.clone(),
        })
    }

    /// Expands back to a list of `n` coordinate rates when every atom carries
    /// an integral multiple of `1/n`.
    pub fn expanded_rates(&self) -> Option<Vec<f64>> {
        let nf = self.n as f64;
        let mut out = Vec::with_capacity(self.n as usize);
        for a in &self.atoms {
            let count = a.mass * nf;
            let rounded = count.round();
            if rounded < 1.0 || (count - rounded).abs() > 1e-6 {
                return None;
            }
            out.extend(std::iter::repeat_n(a.rate, rounded as usize));
        }
        (out.len() as u64 == self.n).then_some(out)
    }

    /// Rescales by `lambda_star`; see [`ScaledMeasure`].
    pub fn scale(&self, lambda_star: f64) -> Result<ScaledMeasure> {
        if !(lambda_star.is_finite() && lambda_star > 0.0) {
            return Err(Error::Domain(format!(
                "scaling rate must be finite and > 0, got {lambda_star}"
            )));
        }
        let below = self.cumulative(lambda_star);
        if below <= 0.0 {
            return Err(Error::Domain(format!(
                "μ(0, {lambda_star}] = 0; nothing to normalise by"
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| ScaledAtom {
                x: a.rate / lambda_star,
                mass: a.mass / below,
            })
            .collect();
        let cumulative = self.cumulative.iter().map(|c| c / below).collect();
        Ok(ScaledMeasure {
            base: self.clone(),
            lambda_star,
            below,
            beta: self.n as f64 * below,
            atoms,
            cumulative,
        })
    }

    /// Parses `rate,mass` or `rate,count` CSV. With `mass`, the tuple
    /// dimension must be supplied as `n`.
    pub fn from_csv_reader<R: Read>(reader: R, n: Option<u64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        let cols: Vec<&str> = headers.iter().collect();
        let with_counts = match cols.as_slice() {
            ["rate", "count"] => true,
            ["rate", "mass"] => false,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!(
                        "expected header `rate,mass` or `rate,count`, got `{}`",
                        cols.join(",")
                    ),
                })
            }
        };
        let mut counts = Vec::new();
        let mut masses = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize| {
                record.get(i).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("missing column {}", i + 1),
                })
            };
            let rate: f64 = field(0)?.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid rate `{}`", &record[0]),
            })?;
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::Parse {
                    line,
                    message: format!("rate must be finite and > 0, got {rate}"),
                });
            }
            if with_counts {
                let c: u64 = field(1)?.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid count `{}`", &record[1]),
                })?;
                if c == 0 {
                    return Err(Error::Parse {
                        line,
                        message: "count must be >= 1".into(),
                    });
                }
                counts.push((rate, c));
            } else {
                let mass: f64 = field(1)?.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid mass `{}`", &record[1]),
                })?;
                masses.push(Atom { rate, mass });
            }
        }
        if with_counts {
            Self::from_counts(&counts)
        } else {
            let n = n.ok_or_else(|| Error::Parse {
                line: 1,
                message: "a `rate,mass` file needs the tuple dimension n".into(),
            })?;
            Self::from_masses(n, &masses)
        }
    }

    /// Parses `{ "n": int, "atoms": [{"rate": float, "mass": float}] }`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::from_masses(file.n, &file.atoms)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MeasureFile {
            n: self.n,
            atoms: self.atoms.clone(),
        })
        .expect("measure serialises")
    }

    /// Reads a measure file: `.json` as JSON, anything else as CSV.
    pub fn read_file(path: &Path, n: Option<u64>) -> Result<Self> {
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&std::fs::read_to_string(path)?)
        } else {
            Self::from_csv_reader(std::fs::File::open(path)?, n)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAtom {
    pub x: f64,
    pub mass: f64,
}

/// `ν({x}) = μ({λ* x}) / μ(0, λ*]` together with `β = n μ(0, λ*]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMeasure {
    base: RateMeasure,
    lambda_star: f64,
    below: f64,
    beta: f64,
    atoms: Vec<ScaledAtom>,
    cumulative: Vec<f64>,
}

impl ScaledMeasure {
    pub fn base(&self) -> &RateMeasure {
        &self.base
    }

    pub fn lambda_star(&self) -> f64 {
        self.lambda_star
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn atoms(&self) -> &[ScaledAtom] {
        &self.atoms
    }

    /// `1 / μ(0, λ*]`, which lies in `[1, n]` for empirical measures.
    pub fn total_mass(&self) -> f64 {
        1.0 / self.below
    }

    /// `ν(0, x]`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.x <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Maps back to rates `x λ*` and masses `ν μ(0, λ*]`.
    pub fn unscale(&self) -> Result<RateMeasure> {
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                rate: a.x * self.lambda_star,
                mass: a.mass * self.below,
            })
            .collect();
        RateMeasure::from_masses(self.base.n, &atoms)
    }
}
