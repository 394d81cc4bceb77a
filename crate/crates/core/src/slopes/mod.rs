//! Exact slopes and continued-fraction machinery.
//!
//! A slope is either a reduced rational `p/q` or a quadratic irrational
//! `(a + b√D)/c`. Both admit exact comparisons and (eventually periodic)
//! continued fractions, which is all the counters need.

mod cf;
mod parse;
mod select;

pub use cf::{cf_expand, convergents, Convergent, ConvergentIter, PartialQuotients};
pub use select::{
    estimate_type, first_admissible_convergent, select_convergent, ConvergentSelection,
    SelectionMode, TypeEstimate,
};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{is_perfect_square, isqrt, Surd};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlopeError {
    #[error("cannot parse slope {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("radicand must be positive, got {0}")]
    NegativeRadicand(BigInt),
    #[error("rational expansion ends after {} convergents", convergents.len())]
    RationalExhausted { convergents: Vec<Convergent> },
    #[error("operation requires an irrational slope")]
    NotIrrational,
    #[error("no convergent with q < {radius} satisfies |delta| < eps/2")]
    NoAdmissibleConvergent { radius: BigRational },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// An exact slope `α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SlopeValue {
    /// `p/q` with `q > 0` and `gcd(|p|, q) = 1`.
    Rational { p: BigInt, q: BigInt },
    /// `(a + b√d)/c` with `c > 0`, `b ≠ 0`, `d ≥ 2` squarefree and
    /// `gcd(a, b, c) = 1`.
    Quadratic {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigInt,
    },
}

impl SlopeValue {
    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, SlopeError> {
        let (mut p, mut q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(SlopeError::ZeroDenominator);
        }
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        let g = p.gcd(&q);
        Ok(SlopeValue::Rational { p: p / &g, q: q / g })
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        SlopeValue::Rational {
            p: r.numer().clone(),
            q: r.denom().clone(),
        }
    }

    /// `(a + b√d)/c`, canonicalized. Collapses to a rational when `b = 0` or
    /// `d` is a perfect square.
    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, SlopeError> {
        let (mut a, mut b, mut c, mut d) = (a.into(), b.into(), c.into(), d.into());
        if c.is_zero() {
            return Err(SlopeError::ZeroDenominator);
        }
        if d.is_negative() {
            return Err(SlopeError::NegativeRadicand(d));
        }
        if b.is_zero() || d.is_zero() {
            return Self::rational(a, c);
        }
        if is_perfect_square(&d) {
            return Self::rational(a + b * isqrt(&d), c);
        }
        // Pull square factors of d into b so that d is squarefree.
        let mut f = BigInt::from(2);
        while &f * &f <= d {
            let f2 = &f * &f;
            while (&d % &f2).is_zero() {
                d /= &f2;
                b *= &f;
            }
            f += 1;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        Ok(SlopeValue::Quadratic {
            a: a / &g,
            b: b / &g,
            c: c / &g,
            d,
        })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, SlopeValue::Rational { .. })
    }

    pub fn as_ratio(&self) -> Option<BigRational> {
        match self {
            SlopeValue::Rational { p, q } => Some(BigRational::new(p.clone(), q.clone())),
            SlopeValue::Quadratic { .. } => None,
        }
    }

    /// The slope as an element of `Q(√d)`.
    pub fn to_surd(&self) -> Surd {
        match self {
            SlopeValue::Rational { p, q } => {
                Surd::from_rational(BigRational::new(p.clone(), q.clone()))
            }
            SlopeValue::Quadratic { a, b, c, d } => Surd::new(
                BigRational::new(a.clone(), c.clone()),
                BigRational::new(b.clone(), c.clone()),
                d.clone(),
            ),
        }
    }

    /// `-α`, used for the reflection `(m, n) ↦ (m, -n)`.
    pub fn negated(&self) -> SlopeValue {
        match self {
            SlopeValue::Rational { p, q } => SlopeValue::Rational {
                p: -p.clone(),
                q: q.clone(),
            },
            SlopeValue::Quadratic { a, b, c, d } => SlopeValue::Quadratic {
                a: -a.clone(),
                b: -b.clone(),
                c: c.clone(),
                d: d.clone(),
            },
        }
    }

    pub fn is_negative(&self) -> bool {
        self.to_surd().is_negative()
    }

    /// Exact three-way comparison of `α` against a rational. Never `Equal`
    /// for a quadratic irrational.
    pub fn compare_to_rational(&self, r: &BigRational) -> Ordering {
        match self {
            SlopeValue::Rational { p, q } => (p * r.denom()).cmp(&(r.numer() * q)),
            SlopeValue::Quadratic { .. } => self.to_surd().cmp_rational(r),
        }
    }

    /// `1 + α²`.
    pub fn one_plus_square(&self) -> Surd {
        let s = self.to_surd();
        &s.square() + &Surd::from_rational(BigRational::one())
    }
}

impl fmt::Display for SlopeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeValue::Rational { p, q } => write!(f, "{p}/{q}"),
            SlopeValue::Quadratic { a, b, c, d } => {
                if b.is_negative() {
                    write!(f, "({a}-{}*sqrt({d}))/{c}", -b)
                } else {
                    write!(f, "({a}+{b}*sqrt({d}))/{c}")
                }
            }
        }
    }
}

impl Serialize for SlopeValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
