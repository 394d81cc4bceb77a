//! Exact lattice-point counters.
//!
//! Two independent routes are kept side by side: per-column brute force
//! (the oracle), and the residue-class partition by `d = nq - mp` for a
//! rational `p/q` close to `α`, which needs `O(εqR)` work instead of `O(R)`.

mod brute;
mod exact;
mod fast;
pub(crate) mod query;
mod schedule;

pub use brute::{count_sector_brute, count_triangle_brute};
pub use exact::{floor_certified, ExactExpr};
pub use fast::{count_rational_fast, count_sector_fast, count_triangle_fast};
pub use query::SectorQuery;
pub use schedule::{verify_empty, DyadicEpsilon, EmptinessReport, EmptinessRow, EpsSchedule};

use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::slopes::SlopeError;

/// Default largest radius the brute-force counters accept.
pub const DEFAULT_BRUTE_CEILING: u64 = 100_000;

/// Knobs shared by the counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Largest `R` accepted by the brute-force counters (and hence by any
    /// fallback to them).
    pub brute_ceiling: BigInt,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            brute_ceiling: BigInt::from(DEFAULT_BRUTE_CEILING),
        }
    }
}

impl CountOptions {
    pub fn with_ceiling(ceiling: impl Into<BigInt>) -> Self {
        CountOptions {
            brute_ceiling: ceiling.into(),
        }
    }

    pub(crate) fn admits(&self, radius: &BigRational) -> bool {
        *radius <= BigRational::from_integer(self.brute_ceiling.clone())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("radius {radius} exceeds the brute-force ceiling {ceiling}")]
    CeilingExceeded { radius: BigRational, ceiling: BigInt },
    #[error("fast counter precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("fast path unavailable ({reason}) and radius {radius} exceeds the brute-force ceiling")]
    FallbackImpossible { reason: String, radius: BigRational },
    #[error("expression not representable: {0}")]
    NotRepresentable(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Slope(#[from] SlopeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CountMethod {
    Brute,
    FastConvergent,
    FastRational,
}

impl CountMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CountMethod::Brute => "brute",
            CountMethod::FastConvergent => "fast-convergent",
            CountMethod::FastRational => "fast-rational",
        }
    }
}

/// Triangle count split by the sign of `d = nq - mp`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionBreakdown {
    #[serde(serialize_with = "crate::ser::display")]
    pub d_min: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub d_max: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub delta_plus: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub delta_zero: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub delta_minus: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub p_used: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub q_used: BigInt,
    /// Inverse of `p` modulo `q`.
    #[serde(serialize_with = "crate::ser::display")]
    pub p_bar: BigInt,
    /// Column limit `M` the partition was taken over.
    #[serde(serialize_with = "crate::ser::display")]
    pub m_max: BigInt,
}

impl PartitionBreakdown {
    pub fn total(&self) -> BigInt {
        &self.delta_plus + &self.delta_zero + &self.delta_minus
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    /// Sector count `S`.
    #[serde(serialize_with = "crate::ser::display")]
    pub s: BigInt,
    /// Triangle count `Δ`.
    #[serde(serialize_with = "crate::ser::display")]
    pub delta: BigInt,
    pub breakdown: Option<PartitionBreakdown>,
    /// `S - Δ`, accumulated over the columns where the disk is active.
    #[serde(serialize_with = "crate::ser::display")]
    pub band_correction: BigInt,
    /// Columns `(M₁, M₂]` enumerated individually by the fast sector counter.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub band_start: Option<BigInt>,
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub band_end: Option<BigInt>,
    pub method: CountMethod,
    /// Whether the count was taken on the mirrored slope `-α`.
    pub mirrored: bool,
    #[serde(serialize_with = "serialize_millis")]
    pub timing: Duration,
}

fn serialize_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}
