//! Separation-distance cutoffs for tuples of independent, exponentially
//! ergodic Markov chains.
//!
//! A tuple is described by the discrete measure of its coordinate decay
//! rates ([`measure::RateMeasure`]). From it the crate computes exact
//! separation profiles, the cutoff time `τ`, the left window `1/λ*` and the
//! right window bound `W(τκ)/κ`, and checks them against full state-space
//! enumeration and Monte-Carlo simulation of the hypercube walk.

pub mod cli;
pub mod cutoff;
pub mod error;
pub mod evt;
pub mod families;
pub mod hypercube;
pub mod measure;
pub mod numeric;
pub mod output;
pub mod rng;
pub mod separation;

pub use cutoff::{cutoff_time, lambert_w, profile, CutoffReport, SeparationProfile, WindowChoice};
pub use error::{Error, Result};
pub use measure::{Atom, RateMeasure, ScaledMeasure};
pub use separation::{sandwich_bounds, sep_product, sep_single, sep_tuple, theta};
