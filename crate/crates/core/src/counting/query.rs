use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::CountError;
use crate::arith::{atan_enclosure, pi, Enclosure, Surd};
use crate::slopes::SlopeValue;

/// A counting instance `(α, ε, R)`.
///
/// Points are counted with the open slope condition
/// `m(α - ε) < n < m(α + ε)`, `m ≥ 1`, and the closed disk `m² + n² ≤ R²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorQuery {
    alpha: SlopeValue,
    epsilon: BigRational,
    radius: BigRational,
}

impl SectorQuery {
    /// Requires `ε > 0`, `R > 0` and `ε < 1 + |α|`; wider sectors reach past
    /// the y-axis and are rejected.
    pub fn new(
        alpha: SlopeValue,
        epsilon: BigRational,
        radius: BigRational,
    ) -> Result<Self, CountError> {
        if !epsilon.is_positive() {
            return Err(CountError::InvalidQuery("epsilon must be positive".into()));
        }
        if !radius.is_positive() {
            return Err(CountError::InvalidQuery("radius must be positive".into()));
        }
        let limit = &alpha.to_surd().abs() + &Surd::from_rational(BigRational::one());
        if limit.cmp_rational(&epsilon).is_le() {
            return Err(CountError::InvalidQuery(format!(
                "epsilon {epsilon} must be below 1 + |alpha|"
            )));
        }
        Ok(SectorQuery {
            alpha,
            epsilon,
            radius,
        })
    }

    pub fn alpha(&self) -> &SlopeValue {
        &self.alpha
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    /// `α - ε` and `α + ε`.
    pub fn edges(&self) -> (Surd, Surd) {
        let a = self.alpha.to_surd();
        let e = Surd::from_rational(self.epsilon.clone());
        (&a - &e, &a + &e)
    }

    /// The same query about `-α`; `S` and `Δ` are invariant under it.
    pub fn mirrored(&self) -> SectorQuery {
        SectorQuery {
            alpha: self.alpha.negated(),
            epsilon: self.epsilon.clone(),
            radius: self.radius.clone(),
        }
    }

    pub fn with_radius(&self, radius: BigRational) -> Result<SectorQuery, CountError> {
        SectorQuery::new(self.alpha.clone(), self.epsilon.clone(), radius)
    }

    pub fn with_epsilon(&self, epsilon: BigRational) -> Result<SectorQuery, CountError> {
        SectorQuery::new(self.alpha.clone(), epsilon, self.radius.clone())
    }

    /// Integer ceiling of `R`, for brute-force bookkeeping.
    pub fn radius_ceil(&self) -> BigInt {
        crate::arith::ceil_rational(&self.radius)
    }

    /// Direction `Φ = arctan α`.
    pub fn direction(&self, prec: u32) -> Enclosure {
        let e = self.alpha.to_surd().enclose_relative(prec as u64 + 8);
        atan_enclosure(&e, prec)
    }

    /// Opening angle `2θ = arctan(α + ε) - arctan(α - ε)`.
    pub fn opening_angle(&self, prec: u32) -> Enclosure {
        opening_angle(&self.alpha.to_surd(), &self.epsilon, prec)
    }

    /// Half-angle `θ`.
    pub fn half_angle(&self, prec: u32) -> Enclosure {
        self.opening_angle(prec)
            .scale(&BigRational::new(1.into(), 2.into()))
    }
}

/// `arctan(α + ε) - arctan(α - ε)` via the subtraction formula, which keeps
/// full relative precision for thin sectors:
/// the difference is `arctan(2ε / (1 + α² - ε²))`, shifted by `π` when the
/// denominator is negative.
pub(crate) fn opening_angle(alpha: &Surd, eps: &BigRational, prec: u32) -> Enclosure {
    let eps_s = Surd::from_rational(eps.clone());
    let denom = &(&alpha.square() + &Surd::from_rational(BigRational::one())) - &eps_s.square();
    match denom.signum() {
        0 => pi(prec + 8).scale(&BigRational::new(1.into(), 2.into())),
        sign => {
            let t = denom
                .recip()
                .expect("nonzero")
                .scale(&(eps * BigRational::from_integer(2.into())));
            let angle = atan_enclosure(&t.enclose_relative(prec as u64 + 8), prec + 4);
            if sign < 0 {
                angle.add(&pi(prec + 8))
            } else {
                angle
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_invalid_parameters() {
        let a = SlopeValue::rational(1, 2).unwrap();
        assert!(SectorQuery::new(a.clone(), q(0, 1), q(10, 1)).is_err());
        assert!(SectorQuery::new(a.clone(), q(1, 10), q(0, 1)).is_err());
        assert!(SectorQuery::new(a.clone(), q(3, 2), q(10, 1)).is_err());
        assert!(SectorQuery::new(a, q(149, 100), q(10, 1)).is_ok());
    }

    #[test]
    fn opening_angle_matches_float() {
        let sqrt2 = SlopeValue::quadratic(0, 1, 1, 2).unwrap();
        let query = SectorQuery::new(sqrt2, q(1, 100), q(100, 1)).unwrap();
        let a = 2f64.sqrt();
        let f = (a + 0.01).atan() - (a - 0.01).atan();
        let e = query.opening_angle(80);
        assert!((e.mid_f64() - f).abs() < 1e-15);
        // Wide sector: 1 + α² - ε² < 0 takes the π branch.
        let wide = SectorQuery::new(SlopeValue::rational(0, 1).unwrap(), q(3, 2), q(1, 1));
        assert!(wide.is_err());
        let wide = SectorQuery::new(SlopeValue::rational(1, 1).unwrap(), q(19, 10), q(1, 1)).unwrap();
        let f = (2.9f64).atan() - (-0.9f64).atan();
        assert!((wide.opening_angle(80).mid_f64() - f).abs() < 1e-14);
        // 1 + α² = ε² exactly: arctan(2) - arctan(-1/2) = π/2.
        let right = SectorQuery::new(SlopeValue::rational(3, 4).unwrap(), q(5, 4), q(1, 1)).unwrap();
        let e = right.opening_angle(80);
        assert!((e.mid_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
