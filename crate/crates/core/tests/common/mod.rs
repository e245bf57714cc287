#![allow(dead_code)]

use sepcut::families::{generate, FamilyDescriptor};
use sepcut::hypercube::WalkSpec;

/// Time at which a non-increasing tail first drops to `level`, by bisection.
pub fn crossing<F: Fn(f64) -> f64>(tail: F, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while tail(hi) > level {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn walk(family: &FamilyDescriptor, n: u64) -> WalkSpec {
    generate(family, n).unwrap().walk.unwrap()
}

/// One coordinate at rate 1 and `n - 1` at rate `ln n`: `τ = 1`, `κ = 1`.
pub fn bounded_rates(n: u64) -> Vec<f64> {
    let mut rates = vec![(n as f64).ln(); n as usize - 1];
    rates.push(1.0);
    rates
}
