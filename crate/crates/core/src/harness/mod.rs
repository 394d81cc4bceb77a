//! Sweeps over geometric `R` grids with `ε = c0·R^{-λ}`, error-exponent
//! fits, and measured-constant checks.

mod analysis;
mod config;
mod sweep;

pub use analysis::{
    check_bound, fit_error_exponent, fit_power_law, instance_suite, BoundCheck, BoundForm, ExponentFit,
    Residual, SUITE_SLOPES,
};
pub use config::{parse_decimal, CounterChoice, OutputFormat, SweepConfig};
pub use sweep::{run_sweep, write_csv, write_json, ExperimentRow, RowCounts, CSV_HEADER};

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use thiserror::Error;

use crate::counting::CountError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} rows with nonzero error, got {usable}")]
    InsufficientData { needed: usize, usable: usize },
    #[error(transparent)]
    Count(#[from] CountError),
}

/// Number of grid points giving a spacing ratio of about `√2`.
pub fn default_points(r_min: &BigInt, r_max: &BigInt) -> usize {
    let ratio = r_max.to_f64().unwrap_or(f64::MAX) / r_min.to_f64().unwrap_or(1.0);
    (2.0 * ratio.log2()).ceil().max(1.0) as usize + 1
}

/// Integer geometric grid `⌊(R_min^{n-1-i}·R_max^i)^{1/(n-1)}⌋`, deduplicated
/// and increasing. `points = None` uses [`default_points`].
pub fn geometric_grid(r_min: &BigInt, r_max: &BigInt, points: Option<usize>) -> Vec<BigInt> {
    let n = points.unwrap_or_else(|| default_points(r_min, r_max));
    if n <= 1 || r_min >= r_max {
        return vec![r_min.clone()];
    }
    let k = (n - 1) as u32;
    let mut grid: Vec<BigInt> = (0..n as u32)
        .map(|i| {
            let prod: BigInt = Pow::pow(r_min, k - i) * Pow::pow(r_max, i);
            prod.nth_root(k)
        })
        .collect();
    grid.dedup();
    debug_assert!(grid.windows(2).all(|w| w[0] < w[1]));
    grid
}
