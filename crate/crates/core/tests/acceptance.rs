//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use common::{crossing, walk};
use sepcut::cutoff::{cutoff_time, lambert_w};
use sepcut::evt::{annealed_sep, exceedance_mean_mc, gumbel_limit, RandomRateModel};
use sepcut::families::{generate, FamilyDescriptor};
use sepcut::hypercube::{
    brute_force_sep, exact_coupling_tail, exact_sep_tail, simulate_coupling, simulate_sst, WalkSpec,
};
use sepcut::measure::RateMeasure;
use sepcut::rng::replica_rng;
use sepcut::separation::{sandwich_bounds, sandwich_start, sep_tuple, theta, PerturbationEnvelope};

const ORACLE_TOL: f64 = 1e-9;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const SANDWICH_SLACK: f64 = 1e-12;
const THETA_LOWER_SLACK: f64 = 1e-10;
const ODD_WINDOWS_REL_TOL: f64 = 1e-9;
const RIGHT_WINDOW_GOLDEN: f64 = 0.1416;
const LEFT_WINDOW_GOLDEN: f64 = 0.098;
const WINDOW_BUDGET: Duration = Duration::from_secs(30);
const SYMMETRIC_TOL: f64 = 0.01;
const GUMBEL_TOL: f64 = 0.01;
const MC_SUP_TOL: f64 = 0.006;
const MC_BUDGET: Duration = Duration::from_secs(20);
const MC_SEED: u64 = 20_240_601;
const EXCEEDANCE_REPLICAS: usize = 2_000;
const EXCEEDANCE_MIN_HITS: usize = 99;
const LAMBERT_REL_TOL: f64 = 1e-12;
const LAMBERT_EXACT_TOL: f64 = 1e-14;

/// Seed for the random cases of criteria 1–3.
const CASE_SEED: u64 = 1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn random_measure<R: Rng>(rng: &mut R) -> RateMeasure {
    let atoms = rng.random_range(1..=10);
    let pairs: Vec<(f64, u64)> = (0..atoms)
        .map(|_| (rng.random_range(0.05..5.0), rng.random_range(1..=50)))
        .collect();
    RateMeasure::from_counts(&pairs).unwrap()
}

fn product_formula_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = replica_rng(CASE_SEED, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let rho: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=4.0)).collect();
        let t = rng.random_range(0.0..=3.0);
        let from: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let spec = WalkSpec::new(rho).unwrap();
        let brute = brute_force_sep(&spec, t, &from).unwrap();
        let exact = exact_sep_tail(&spec, t);
        let tuple = sep_tuple(&spec.measure(), t);
        worst = worst.max((brute - exact).abs()).max((brute - tuple).abs());
    }
    let elapsed = start.elapsed();
    let msg = format!("max |Δ| = {worst:.3e} (tol {ORACLE_TOL:e}), {elapsed:.2?}");
    if worst <= ORACLE_TOL && elapsed < ORACLE_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sandwich() -> Outcome {
    let mut rng = replica_rng(CASE_SEED, 2);
    let mut worst_slack = f64::INFINITY;
    let mut theta_violations = 0;
    for _ in 0..500 {
        let m = random_measure(&mut rng);
        let t = sandwich_start(&m) + rng.random_range(0.0..5.0);
        let b = sandwich_bounds(&m, t, PerturbationEnvelope::Zero).unwrap();
        let s = sep_tuple(&m, t);
        worst_slack = worst_slack.min(s - b.lower).min(b.upper - s);
        if theta(&m, 2.0 * t) > theta(&m, t) {
            theta_violations += 1;
        }
    }
    let msg = format!(
        "min slack = {worst_slack:.3e} (≥ -{SANDWICH_SLACK:e}), θ(2t) > θ(t) in {theta_violations} cases"
    );
    if worst_slack >= -SANDWICH_SLACK && theta_violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn theta_lower_bound() -> Outcome {
    let mut rng = replica_rng(CASE_SEED, 3);
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for _ in 0..200 {
        let m = random_measure(&mut rng);
        let r = cutoff_time(&m);
        for c in [-2.0f64, -1.0, 0.0, 1.0, 2.0] {
            let t = r.tau + c / r.lambda_star;
            if t < 0.0 {
                continue;
            }
            worst = worst.min(theta(&m, t) - (-c).exp());
            checked += 1;
        }
    }
    let msg = format!("min θ - e^-c = {worst:.3e} over {checked} points");
    if worst >= -THETA_LOWER_SLACK {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn odd_windows_fixture() -> Outcome {
    let n = 10_000u64;
    let m = generate(&FamilyDescriptor::OddWindows, n).unwrap().measure;
    let r = cutoff_time(&m);
    let mut failures = Vec::new();
    if (r.lambda_star - 2.0).abs() > ODD_WINDOWS_REL_TOL * 2.0 {
        failures.push(format!("λ* = {}", r.lambda_star));
    }
    if (r.beta - 100.0).abs() > ODD_WINDOWS_REL_TOL * 100.0 {
        failures.push(format!("β = {}", r.beta));
    }
    if (r.tau - 10f64.ln()).abs() > ODD_WINDOWS_REL_TOL {
        failures.push(format!("τ = {}", r.tau));
    }
    for lambda in [2.0f64, 2.8, 3.6, 4.0] {
        let expected = (n as f64).powf(lambda / 4.0).floor() / n as f64;
        if m.cumulative(lambda) != expected {
            failures.push(format!("cumulative({lambda}) = {} ≠ {expected}", m.cumulative(lambda)));
        }
    }
    if failures.is_empty() {
        Ok(format!("λ* = {}, β = {}, τ = {:.12}", r.lambda_star, r.beta, r.tau))
    } else {
        Err(failures.join("; "))
    }
}

fn right_window_tightness() -> Outcome {
    let start = Instant::now();
    let mut right = Vec::new();
    let mut left = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let m = generate(&FamilyDescriptor::OddWindows, n).unwrap().measure;
        let r = cutoff_time(&m);
        right.push(sep_tuple(&m, r.tau + 2.0 * r.b_right.unwrap()));
        left.push(sep_tuple(&m, r.tau + 3.0 * r.b_left));
    }
    let elapsed = start.elapsed();
    let decreasing = right.windows(2).all(|w| w[1] < w[0]);
    let final_ok = *right.last().unwrap() < RIGHT_WINDOW_GOLDEN;
    let left_ok = left.iter().all(|&s| s > LEFT_WINDOW_GOLDEN);
    let fmt = |v: &[f64]| v.iter().map(|s| format!("{s:.5}")).collect::<Vec<_>>().join(", ");
    let msg = format!(
        "sep(τ+2b_R) = [{}] (final < {RIGHT_WINDOW_GOLDEN}), sep(τ+3b_L) = [{}] (> {LEFT_WINDOW_GOLDEN}), {elapsed:.2?}",
        fmt(&right),
        fmt(&left)
    );
    if decreasing && final_ok && left_ok && elapsed < WINDOW_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn symmetric_cutoff() -> Outcome {
    let n = 10_000u64;
    let m = generate(&FamilyDescriptor::Symmetric, n).unwrap().measure;
    let worst = (-3..=3)
        .map(|c| {
            let c = c as f64;
            let s = sep_tuple(&m, (n as f64).ln() / 2.0 + c);
            (s - (1.0 - (-(-2.0 * c).exp()).exp())).abs()
        })
        .fold(0.0, f64::max);
    let msg = format!("max gap = {worst:.3e} (tol {SYMMETRIC_TOL})");
    if worst < SYMMETRIC_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn gumbel() -> Outcome {
    let model = RandomRateModel::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
    let ns = [100u64, 1_000, 10_000, 100_000];
    let mut worst_final: f64 = 0.0;
    let mut non_monotone = Vec::new();
    for c in -2..=4 {
        let c = c as f64;
        let limit = gumbel_limit(&model, c);
        let gaps: Vec<f64> = ns
            .iter()
            .map(|&n| (annealed_sep(&model, n, c).unwrap().value - limit).abs())
            .collect();
        if !gaps.windows(2).all(|w| w[1] < w[0]) {
            non_monotone.push(c);
        }
        worst_final = worst_final.max(*gaps.last().unwrap());
    }
    let msg = format!(
        "max gap at n=1e5 = {worst_final:.3e} (tol {GUMBEL_TOL}), non-monotone c: {non_monotone:?}"
    );
    if worst_final < GUMBEL_TOL && non_monotone.is_empty() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let spec = WalkSpec::symmetric(64).unwrap();
    let replicas = 100_000;
    let grid: Vec<f64> = (0..200).map(|k| 6.0 * k as f64 / 199.0).collect();
    let sst = simulate_sst(&spec, replicas, MC_SEED).unwrap();
    let d_sst = sst.sup_distance(&grid, |t| exact_sep_tail(&spec, t));
    let cpl = simulate_coupling(&spec, replicas, MC_SEED).unwrap();
    let d_cpl = cpl.sup_distance(&grid, |t| exact_coupling_tail(&spec, t));
    let elapsed = start.elapsed();
    let msg = format!(
        "sup |Ŝ - S|: sst = {d_sst:.4}, coupling = {d_cpl:.4} (tol {MC_SUP_TOL}), {elapsed:.2?}"
    );
    if d_sst <= MC_SUP_TOL && d_cpl <= MC_SUP_TOL && elapsed < MC_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn exceedances() -> Outcome {
    let fixtures = [
        ("δ_2, n=100", RateMeasure::dirac(100, 2.0).unwrap()),
        ("{1,3}, n=2", RateMeasure::from_rates(&[1.0, 3.0]).unwrap()),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, m) in &fixtures {
        for t in [0.5, 1.0, 2.0] {
            let target = theta(m, t);
            let hits = (0..100u64)
                .filter(|&seed| {
                    let e = exceedance_mean_mc(m, t, EXCEEDANCE_REPLICAS, seed).unwrap();
                    (e.estimate - target).abs() <= 3.0 * e.std_error
                })
                .count();
            ok &= hits >= EXCEEDANCE_MIN_HITS;
            parts.push(format!("{name} t={t}: {hits}/100"));
        }
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn lambert() -> Outcome {
    let mut worst: f64 = 0.0;
    let count = 10_000;
    for k in 0..count {
        let x = 10f64.powf(-8.0 + 16.0 * k as f64 / (count - 1) as f64);
        let w = lambert_w(x).unwrap();
        worst = worst.max((w * w.exp() - x).abs() / x);
    }
    let w0 = lambert_w(0.0).unwrap();
    let we = lambert_w(std::f64::consts::E).unwrap();
    let msg = format!("max rel residual = {worst:.3e}, W(0) = {w0}, W(e) = {we}");
    if worst <= LAMBERT_REL_TOL && w0.abs() <= LAMBERT_EXACT_TOL && (we - 1.0).abs() <= LAMBERT_EXACT_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn colocation() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, family) in [("symmetric", FamilyDescriptor::Symmetric), ("odd_windows", FamilyDescriptor::OddWindows)] {
        for n in [100u64, 10_000] {
            let spec = walk(&family, n);
            let ts = crossing(|t| exact_sep_tail(&spec, t), 0.5);
            let tc = crossing(|t| exact_coupling_tail(&spec, t), 0.5);
            let allowed = 2.0 / (2.0 * spec.min_rho());
            ok &= (ts - tc).abs() <= allowed;
            parts.push(format!("{name} n={n}: |Δt| = {:.4} ≤ {allowed}", (ts - tc).abs()));
        }
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("product-formula oracle", product_formula_oracle),
        ("sandwich bounds", sandwich),
        ("θ lower bound at the cutoff", theta_lower_bound),
        ("odd-windows fixtures", odd_windows_fixture),
        ("right-window tightness", right_window_tightness),
        ("symmetric-walk cutoff", symmetric_cutoff),
        ("Gumbel limit", gumbel),
        ("Monte-Carlo consistency", monte_carlo),
        ("θ as mean exceedances", exceedances),
        ("Lambert W", lambert),
        ("coupling/separation colocation", colocation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
