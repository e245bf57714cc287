//! Preset measure and walk families.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::RandomRateModel;
use crate::hypercube::WalkSpec;
use crate::measure::RateMeasure;
use crate::rng::replica_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// Hypercube walk with every `ρ_i = 1`.
    Symmetric,
    /// Hypercube walk with `ρ_i = max{1, 2 log_n i}`, whose right window is
    /// of strictly larger order than its left window.
    OddWindows,
    /// Hypercube walk with i.i.d. coordinate rates drawn from `model`.
    RandomRates { model: RandomRateModel, seed: u64 },
    /// Measure read from a CSV or JSON file.
    FromFile { path: PathBuf },
}

/// A generated family member; `walk` is present when the family prescribes
/// coordinate rates of a hypercube walk.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub measure: RateMeasure,
    pub walk: Option<WalkSpec>,
}

impl FamilyMember {
    fn from_walk(walk: WalkSpec) -> Self {
        Self {
            measure: walk.measure(),
            walk: Some(walk),
        }
    }
}

/// `ρ_i = max{1, 2 ln i / ln n}` for `i = 1..n`.
pub fn odd_windows_rho(n: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "odd_windows needs n >= 2 (log base n), got {n}"
        )));
    }
    let ln_n = (n as f64).ln();
    Ok((1..=n)
        .map(|i| f64::max(1.0, 2.0 * ((i as f64).ln() / ln_n)))
        .collect())
}

pub fn generate(family: &FamilyDescriptor, n: u64) -> Result<FamilyMember> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    match family {
        FamilyDescriptor::Symmetric => Ok(FamilyMember::from_walk(WalkSpec::symmetric(
            n as usize,
        )?)),
        FamilyDescriptor::OddWindows => {
            Ok(FamilyMember::from_walk(WalkSpec::new(odd_windows_rho(n)?)?))
        }
        FamilyDescriptor::RandomRates { model, seed } => {
            let mut rng = replica_rng(*seed, n);
            let rho = (0..n).map(|_| model.sample(&mut rng)).collect();
            Ok(FamilyMember::from_walk(WalkSpec::new(rho)?))
        }
        FamilyDescriptor::FromFile { path } => Ok(FamilyMember {
            measure: RateMeasure::read_file(path, Some(n))?,
            walk: None,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::cutoff_time;

    #[test]
    fn symmetric_is_a_dirac_at_two() {
        let m = generate(&FamilyDescriptor::Symmetric, 5).unwrap();
        assert_eq!(m.measure.n(), 5);
        assert_eq!(m.measure.len(), 1);
        assert_eq!(m.measure.kappa(), 2.0);
        assert_eq!(m.walk.unwrap().rho(), &[1.0; 5]);
    }

    #[test]
    fn symmetric_cutoff_is_half_log_n() {
        for n in [2u64, 37, 1000] {
            let m = generate(&FamilyDescriptor::Symmetric, n).unwrap();
            let r = cutoff_time(&m.measure);
            assert!((r.tau - (n as f64).ln() / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn odd_windows_bounds_and_first_coordinate() {
        let n = 1000;
        let rho = odd_windows_rho(n).unwrap();
        assert_eq!(rho[0], 1.0);
        assert_eq!(*rho.last().unwrap(), 2.0);
        let m = generate(&FamilyDescriptor::OddWindows, n).unwrap().measure;
        assert_eq!(m.kappa(), 2.0);
        assert!(m.atoms().iter().all(|a| (2.0..=4.0).contains(&a.rate)));
        assert!(matches!(
            generate(&FamilyDescriptor::OddWindows, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn odd_windows_cumulative_counts() {
        let n = 10_000u64;
        let m = generate(&FamilyDescriptor::OddWindows, n).unwrap().measure;
        for lambda in [2.0, 3.0, 4.0] {
            let expected = (n as f64).powf(lambda / 4.0).floor() / n as f64;
            assert_eq!(m.cumulative(lambda), expected, "λ={lambda}");
        }
    }

    #[test]
    fn random_rates_are_seeded_and_match_frequencies() {
        let model = RandomRateModel::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let fam = FamilyDescriptor::RandomRates { model, seed: 17 };
        let n = 1000;
        let a = generate(&fam, n).unwrap();
        let b = generate(&fam, n).unwrap();
        assert_eq!(a, b);
        let rho = a.walk.unwrap();
        let ones = rho.rho().iter().filter(|&&r| r == 1.0).count() as f64 / n as f64;
        assert!((ones - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt());
        // measure rates are 2ρ
        assert_eq!(a.measure.kappa(), 2.0);
    }

    #[test]
    fn from_file_reads_csv_and_reports_parse_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "rate,count\n1.5,3\n2,1\n").unwrap();
        let fam = FamilyDescriptor::FromFile { path: path.clone() };
        let m = generate(&fam, 4).unwrap();
        assert_eq!(m.measure.n(), 4);
        assert!(m.walk.is_none());
        std::fs::write(&path, "rate,count\n1.5,3\n2,zero\n").unwrap();
        assert!(matches!(generate(&fam, 4), Err(Error::Parse { line: 3, .. })));
    }
}
