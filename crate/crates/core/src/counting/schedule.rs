use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{count_sector_fast, CountError, CountMethod, CountOptions, SectorQuery};
use crate::arith::floor_rational;
use crate::slopes::{SlopeError, SlopeValue};

/// Significant bits kept when rounding a schedule value to a dyadic rational.
pub const DYADIC_BITS: u64 = 96;

/// `ε = c0·R^{-λ}` with rational `λ ≥ 0` and `c0 > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsSchedule {
    #[serde(serialize_with = "crate::ser::display")]
    pub lambda: BigRational,
    #[serde(serialize_with = "crate::ser::display")]
    pub c0: BigRational,
}

/// A schedule value rounded down to `mantissa · 2^-exponent` with a
/// 96-bit mantissa.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicEpsilon {
    #[serde(serialize_with = "crate::ser::display")]
    pub value: BigRational,
    #[serde(serialize_with = "crate::ser::display")]
    pub mantissa: BigInt,
    pub exponent: i64,
    /// The unrounded value lies in `[value, value + perturbation)`.
    #[serde(serialize_with = "crate::ser::display")]
    pub perturbation: BigRational,
}

fn two_pow(k: i64) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

impl EpsSchedule {
    pub fn new(lambda: BigRational, c0: BigRational) -> Result<Self, CountError> {
        if lambda.is_negative() {
            return Err(CountError::InvalidQuery("lambda must be nonnegative".into()));
        }
        if !c0.is_positive() {
            return Err(CountError::InvalidQuery("c0 must be positive".into()));
        }
        Ok(EpsSchedule { lambda, c0 })
    }

    /// `ε = R^{-λ}`.
    pub fn unit(lambda: BigRational) -> Result<Self, CountError> {
        Self::new(lambda, BigRational::one())
    }

    /// `⌊c0·R^{-λ}·2^k⌋` for `λ = a/b`, computed as the integer `b`-th root of
    /// `⌊c0^b·R^{-a}·2^{kb}⌋`.
    fn scaled_floor(&self, radius: &BigRational, k: i64) -> BigInt {
        let a = self.lambda.numer().to_u32().expect("lambda numerator fits u32");
        let b = self.lambda.denom().to_u32().expect("lambda denominator fits u32");
        let inner = Pow::pow(&self.c0, b) * Pow::pow(radius.recip(), a) * two_pow(k * b as i64);
        floor_rational(&inner).nth_root(b)
    }

    /// Dyadic value at radius `R > 0`, rounded down to 96 significant bits.
    pub fn epsilon_at(&self, radius: &BigRational) -> Result<DyadicEpsilon, CountError> {
        if !radius.is_positive() {
            return Err(CountError::InvalidQuery("radius must be positive".into()));
        }
        if self.lambda.numer().to_u32().is_none() || self.lambda.denom().to_u32().is_none() {
            return Err(CountError::InvalidQuery(format!(
                "lambda {} has too large a numerator or denominator",
                self.lambda
            )));
        }
        // log2 ε ≈ log2 c0 - λ log2 R; then correct k until the mantissa has
        // exactly DYADIC_BITS bits.
        let guess = crate::arith::log2_estimate(&self.c0) as f64
            - self.lambda.to_f64().unwrap_or(0.0) * crate::arith::log2_estimate(radius) as f64;
        let mut k = DYADIC_BITS as i64 - guess.round() as i64;
        let mut mantissa;
        loop {
            mantissa = self.scaled_floor(radius, k);
            let bits = mantissa.bits() as i64;
            if bits == DYADIC_BITS as i64 {
                break;
            }
            k += DYADIC_BITS as i64 - bits;
        }
        let ulp = two_pow(-k);
        Ok(DyadicEpsilon {
            value: BigRational::from_integer(mantissa.clone()) * &ulp,
            mantissa,
            exponent: k,
            perturbation: ulp,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmptinessRow {
    #[serde(serialize_with = "crate::ser::display")]
    pub radius: BigRational,
    pub epsilon: DyadicEpsilon,
    #[serde(serialize_with = "crate::ser::display")]
    pub s: BigInt,
    pub method: CountMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmptinessReport {
    pub alpha: SlopeValue,
    pub schedule: EpsSchedule,
    /// One row per grid radius, in grid order.
    pub rows: Vec<EmptinessRow>,
    /// Largest grid radius with `S > 0`, if any.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub largest_nonempty: Option<BigRational>,
}

impl EmptinessReport {
    /// Whether every row strictly beyond `threshold` (every row, when `None`)
    /// is empty.
    pub fn empty_beyond(&self, threshold: Option<&BigRational>) -> bool {
        self.rows
            .iter()
            .filter(|r| threshold.map_or(true, |t| &r.radius > t))
            .all(|r| r.s.is_zero())
    }
}

/// Runs the fast counter at every grid radius with `ε` from the schedule.
pub fn verify_empty(
    alpha: &SlopeValue,
    schedule: &EpsSchedule,
    grid: &[BigRational],
    opts: &CountOptions,
) -> Result<EmptinessReport, CountError> {
    if alpha.is_rational() {
        return Err(SlopeError::NotIrrational.into());
    }
    let rows = grid
        .par_iter()
        .map(|radius| {
            let epsilon = schedule.epsilon_at(radius)?;
            let query = SectorQuery::new(alpha.clone(), epsilon.value.clone(), radius.clone())?;
            let report = count_sector_fast(&query, opts)?;
            Ok(EmptinessRow {
                radius: radius.clone(),
                epsilon,
                s: report.s,
                method: report.method,
            })
        })
        .collect::<Result<Vec<_>, CountError>>()?;
    let largest_nonempty = rows
        .iter()
        .filter(|r| !r.s.is_zero())
        .map(|r| r.radius.clone())
        .max();
    Ok(EmptinessReport {
        alpha: alpha.clone(),
        schedule: schedule.clone(),
        rows,
        largest_nonempty,
    })
}
