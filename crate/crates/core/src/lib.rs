//! Exact lattice-point counting in thin circular sectors.
//!
//! `S_α(ε, R)` counts integer points `(m, n)` with `m ≥ 1`,
//! `m(α - ε) < n < m(α + ε)` and `m² + n² ≤ R²`. This crate provides
//! brute-force and fast exact counters for it, closed-form asymptotic
//! predictions, and a sweep harness that measures how well the predictions
//! hold.

pub mod arith;
pub mod asymptotics;
pub mod counting;
pub mod harness;
pub mod slopes;

mod ser;

pub use slopes::{SlopeError, SlopeValue};
