use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{SlopeError, SlopeValue};
use crate::arith::{floor_linear_sqrt, Enclosure, Surd};

/// Lazy stream of partial quotients `a_0, a_1, …`.
///
/// Rationals run the Euclidean algorithm and terminate. Quadratic
/// irrationals use the exact surd recurrence on `(P + √N)/Q` with
/// `Q | N - P²`, which never terminates.
#[derive(Clone, Debug)]
pub enum PartialQuotients {
    Euclid { num: BigInt, den: BigInt },
    Surd { p: BigInt, q: BigInt, n: BigInt },
}

impl PartialQuotients {
    pub fn new(slope: &SlopeValue) -> Self {
        match slope {
            SlopeValue::Rational { p, q } => PartialQuotients::Euclid {
                num: p.clone(),
                den: q.clone(),
            },
            SlopeValue::Quadratic { a, b, c, d } => {
                let n = b * b * d;
                let (mut p, mut q) = if b.is_positive() {
                    (a.clone(), c.clone())
                } else {
                    (-a.clone(), -c.clone())
                };
                let mut n = n;
                if !((&n - &p * &p) % &q).is_zero() {
                    let qa = q.abs();
                    p *= &qa;
                    n *= &q * &q;
                    q *= qa;
                }
                PartialQuotients::Surd { p, q, n }
            }
        }
    }
}

impl Iterator for PartialQuotients {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        match self {
            PartialQuotients::Euclid { num, den } => {
                if den.is_zero() {
                    return None;
                }
                let (a, r) = num.div_mod_floor(den);
                *num = std::mem::replace(den, r);
                Some(a)
            }
            PartialQuotients::Surd { p, q, n } => {
                let a = if q.is_positive() {
                    floor_linear_sqrt(p, &BigInt::one(), n, q)
                } else {
                    floor_linear_sqrt(&-p.clone(), &-BigInt::one(), n, &-q.clone())
                };
                let next_p = &a * &*q - &*p;
                let next_q = (&*n - &next_p * &next_p) / &*q;
                *p = next_p;
                *q = next_q;
                Some(a)
            }
        }
    }
}

/// Continued-fraction expansion `[a_0; a_1, …, a_k]` (at most `k + 1` terms).
pub fn cf_expand(slope: &SlopeValue, k: usize) -> Vec<BigInt> {
    PartialQuotients::new(slope).take(k + 1).collect()
}

/// A convergent `p/q` of `α` together with `δ = α - p/q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(serialize_with = "crate::ser::display")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub q: BigInt,
    /// Sign of `δ`: `-1` or `+1`, and `0` only for the final convergent of a
    /// rational slope.
    pub delta_sign: i8,
    /// Rational bracket strictly containing `δ` (a point when `δ = 0`), of
    /// width at most `1/(q_i q_{i+1})`.
    pub delta_bound: Enclosure,
    /// Exact `δ`.
    #[serde(skip)]
    pub delta: Surd,
}

impl Convergent {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    /// `|δ| < bound`, decided exactly.
    pub fn delta_below(&self, bound: &BigRational) -> bool {
        self.delta.abs().cmp_rational(bound).is_lt()
    }
}

/// Lazy convergent stream with one quotient of lookahead (needed for the
/// `1/(q_i q_{i+1})` width of each enclosure).
#[derive(Clone, Debug)]
pub struct ConvergentIter {
    alpha: Surd,
    quotients: PartialQuotients,
    lookahead: Option<BigInt>,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    index: usize,
}

impl ConvergentIter {
    pub fn new(slope: &SlopeValue) -> Self {
        let mut quotients = PartialQuotients::new(slope);
        let lookahead = quotients.next();
        ConvergentIter {
            alpha: slope.to_surd(),
            quotients,
            lookahead,
            // (p_{i-1}, p_{i-2}) seeded with p_{-1} = 1, p_{-2} = 0
            p: (BigInt::one(), BigInt::zero()),
            q: (BigInt::zero(), BigInt::one()),
            index: 0,
        }
    }
}

fn certify_delta(delta: &Surd, q: &BigInt, q_next: Option<&BigInt>) -> Enclosure {
    if delta.is_zero() {
        return Enclosure::point(BigRational::zero());
    }
    let denom = match q_next {
        Some(qn) => q * qn,
        None => q.clone(),
    };
    let mut bits = denom.bits();
    loop {
        let e = delta.enclose(bits);
        if !e.contains_zero() {
            return e;
        }
        bits += 8;
    }
}

impl Iterator for ConvergentIter {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let a = self.lookahead.take()?;
        self.lookahead = self.quotients.next();
        let p = &a * &self.p.0 + &self.p.1;
        let q = &a * &self.q.0 + &self.q.1;
        let q_next = self.lookahead.as_ref().map(|an| an * &q + &self.q.0);
        let delta = &self.alpha - &Surd::from_rational(BigRational::new(p.clone(), q.clone()));
        let delta_bound = certify_delta(&delta, &q, q_next.as_ref());
        let conv = Convergent {
            index: self.index,
            p: p.clone(),
            q: q.clone(),
            delta_sign: delta.signum(),
            delta_bound,
            delta,
        };
        self.p = (p, std::mem::take(&mut self.p.0));
        self.q = (q, std::mem::take(&mut self.q.0));
        self.index += 1;
        Some(conv)
    }
}

/// Convergents `p_0/q_0, …, p_k/q_k`.
///
/// A rational slope whose expansion is shorter than requested yields
/// [`SlopeError::RationalExhausted`] carrying the complete finite list.
pub fn convergents(slope: &SlopeValue, k: usize) -> Result<Vec<Convergent>, SlopeError> {
    let list: Vec<Convergent> = ConvergentIter::new(slope).take(k + 1).collect();
    if list.len() < k + 1 {
        return Err(SlopeError::RationalExhausted { convergents: list });
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn phi() -> SlopeValue {
        SlopeValue::quadratic(1, 1, 2, 5).unwrap()
    }

    fn sqrt2() -> SlopeValue {
        SlopeValue::quadratic(0, 1, 1, 2).unwrap()
    }

    /// Independent oracle: iterate x ↦ 1/(x - ⌊x⌋) on the surd itself.
    fn surd_iteration(slope: &SlopeValue, k: usize) -> Vec<BigInt> {
        let mut x = slope.to_surd();
        let mut out = Vec::new();
        for _ in 0..=k {
            let a = x.floor();
            out.push(a.clone());
            let frac = &x - &Surd::from_integer(a);
            match frac.recip() {
                Some(r) => x = r,
                None => break,
            }
        }
        out
    }

    #[test]
    fn expansion_examples() {
        let r = SlopeValue::rational(7, 5).unwrap();
        assert_eq!(cf_expand(&r, 5), ints(&[1, 2, 2]));
        assert_eq!(cf_expand(&phi(), 6), ints(&[1; 7]));
        assert_eq!(cf_expand(&sqrt2(), 4), ints(&[1, 2, 2, 2, 2]));
        assert_eq!(cf_expand(&sqrt2(), 4), surd_iteration(&sqrt2(), 4));
    }

    #[test]
    fn expansion_matches_surd_oracle() {
        let slopes = [
            SlopeValue::quadratic(1, 1, 2, 13).unwrap(),
            SlopeValue::quadratic(0, 1, 1, 3).unwrap(),
            SlopeValue::quadratic(-3, 2, 7, 11).unwrap(),
            SlopeValue::quadratic(5, -1, 3, 6).unwrap(),
            SlopeValue::quadratic(0, -1, 1, 2).unwrap(),
        ];
        for s in &slopes {
            assert_eq!(cf_expand(s, 25), surd_iteration(s, 25), "{s}");
        }
    }

    #[test]
    fn negative_rational_expansion() {
        let r = SlopeValue::rational(-7, 5).unwrap();
        assert_eq!(cf_expand(&r, 10), ints(&[-2, 1, 1, 2]));
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(&phi(), 4).unwrap();
        let pq: Vec<(i64, i64)> = c
            .iter()
            .map(|c| (c.p.clone().try_into().unwrap(), c.q.clone().try_into().unwrap()))
            .collect();
        assert_eq!(pq, vec![(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]);
        for w in c.windows(2) {
            let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
            let expected = if w[1].index % 2 == 1 { -1 } else { 1 };
            assert_eq!(det, BigInt::from(-expected));
        }
        let s = convergents(&sqrt2(), 3).unwrap();
        let pq: Vec<String> = s.iter().map(|c| format!("{}/{}", c.p, c.q)).collect();
        assert_eq!(pq, ["1/1", "3/2", "7/5", "17/12"]);
    }

    #[test]
    fn delta_enclosures_are_certified() {
        let c = convergents(&phi(), 30).unwrap();
        for (i, conv) in c.iter().enumerate() {
            let b = &conv.delta_bound;
            assert!(!b.contains_zero());
            assert_eq!(conv.delta.cmp_rational(b.lo()), Ordering::Greater);
            assert_eq!(conv.delta.cmp_rational(b.hi()), Ordering::Less);
            if let Some(next) = c.get(i + 1) {
                assert!(b.width() <= BigRational::new(1.into(), &conv.q * &next.q));
            }
            let expected = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(conv.delta_sign, expected);
        }
    }

    #[test]
    fn rational_exhaustion_returns_full_list() {
        let r = SlopeValue::rational(7, 5).unwrap();
        match convergents(&r, 10) {
            Err(SlopeError::RationalExhausted { convergents }) => {
                assert_eq!(convergents.len(), 3);
                let last = convergents.last().unwrap();
                assert_eq!((last.p.clone(), last.q.clone()), (7.into(), 5.into()));
                assert_eq!(last.delta_sign, 0);
                assert!(last.delta_bound.is_point());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
