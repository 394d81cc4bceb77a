use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::CountError;
use crate::arith::{floor_rational, isqrt, Surd};

/// Expression shapes whose floor can be decided exactly.
#[derive(Clone, Debug)]
pub enum ExactExpr {
    Rational(BigRational),
    /// `r + s·√d`.
    Surd(Surd),
    /// `numerator / √radicand` with `radicand > 0` in some `Q(√d)`, e.g.
    /// `R / √(1 + α²)`.
    OverSqrt {
        numerator: BigRational,
        radicand: Surd,
    },
    /// `numerator / (q·δ)` with `δ ≠ 0`, e.g. `d / ((δ ± ε) q)`.
    OverScaled {
        numerator: BigRational,
        q: BigInt,
        delta: Surd,
    },
}

/// Exact `⌊x⌋`.
///
/// Square-root shapes use `⌊√y⌋ = isqrt(⌊y⌋)` on the exact square; the other
/// shapes are field elements whose floor is decided by integer squaring.
pub fn floor_certified(x: &ExactExpr) -> Result<BigInt, CountError> {
    match x {
        ExactExpr::Rational(r) => Ok(floor_rational(r)),
        ExactExpr::Surd(s) => Ok(s.floor()),
        ExactExpr::OverSqrt {
            numerator,
            radicand,
        } => {
            if !radicand.is_positive() {
                return Err(CountError::NotRepresentable(format!(
                    "square root of non-positive {radicand}"
                )));
            }
            // y = numerator² / radicand, x = sign(numerator)·√y
            let y = radicand
                .recip()
                .expect("positive")
                .scale(&(numerator * numerator));
            let root_floor = isqrt(&y.floor());
            if !numerator.is_negative() {
                Ok(root_floor)
            } else {
                // ⌊-√y⌋ = -⌈√y⌉
                let exact = y
                    .as_rational()
                    .is_some_and(|r| BigRational::from_integer(&root_floor * &root_floor) == *r);
                Ok(if exact { -root_floor } else { -root_floor - 1 })
            }
        }
        ExactExpr::OverScaled { numerator, q, delta } => {
            let denom = delta.scale(&BigRational::from_integer(q.clone()));
            let inv = denom.recip().ok_or_else(|| {
                CountError::NotRepresentable("division by a zero delta".into())
            })?;
            Ok(inv.scale(numerator).floor())
        }
    }
}

/// `⌊R / √(1 + s²)⌋` for `R ≥ 0` and an exact `s`.
pub(crate) fn column_limit(radius: &BigRational, slope: &Surd) -> BigInt {
    let radicand = &slope.square() + &Surd::from_rational(BigRational::from_integer(1.into()));
    floor_certified(&ExactExpr::OverSqrt {
        numerator: radius.clone(),
        radicand,
    })
    .expect("1 + s² is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slopes::SlopeValue;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn examples() {
        // 57²·3 = 9747 ≤ 10⁴ < 58²·3 = 10092
        let x = ExactExpr::OverSqrt {
            numerator: q(100, 1),
            radicand: Surd::from_rational(q(3, 1)),
        };
        assert_eq!(floor_certified(&x).unwrap(), 57.into());
        assert_eq!(floor_certified(&ExactExpr::Rational(q(10, 2))).unwrap(), 5.into());
        // 70²·2 ≤ 10⁴ < 71²·2
        let one = SlopeValue::rational(1, 1).unwrap().to_surd();
        assert_eq!(column_limit(&q(100, 1), &one), 70.into());
    }

    #[test]
    fn negative_numerators() {
        let x = ExactExpr::OverSqrt {
            numerator: q(-100, 1),
            radicand: Surd::from_rational(q(3, 1)),
        };
        assert_eq!(floor_certified(&x).unwrap(), (-58).into());
        let y = ExactExpr::OverSqrt {
            numerator: q(-10, 1),
            radicand: Surd::from_rational(q(4, 1)),
        };
        assert_eq!(floor_certified(&y).unwrap(), (-5).into());
    }

    #[test]
    fn quadratic_radicand() {
        // R / √(1 + φ²) with R = 1000: 1000 / 1.9021130... = 525.73
        let phi = SlopeValue::quadratic(1, 1, 2, 5).unwrap().to_surd();
        assert_eq!(column_limit(&q(1000, 1), &phi), 525.into());
    }

    #[test]
    fn over_scaled_delta() {
        let sqrt2 = SlopeValue::quadratic(0, 1, 1, 2).unwrap().to_surd();
        let delta = &sqrt2 - &Surd::from_rational(q(7, 5));
        // 1 / (5·0.0142135...) = 14.07...
        let x = ExactExpr::OverScaled {
            numerator: q(1, 1),
            q: 5.into(),
            delta: delta.clone(),
        };
        assert_eq!(floor_certified(&x).unwrap(), 14.into());
        let zero = ExactExpr::OverScaled {
            numerator: q(1, 1),
            q: 5.into(),
            delta: Surd::zero(),
        };
        assert!(matches!(floor_certified(&zero), Err(CountError::NotRepresentable(_))));
        let bad = ExactExpr::OverSqrt {
            numerator: q(1, 1),
            radicand: Surd::from_rational(q(-1, 1)),
        };
        assert!(floor_certified(&bad).is_err());
    }
}
