use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A closed interval `[lo, hi]` with exact rational endpoints, guaranteed to
/// contain some real quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Enclosure {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Strict containment, used for irrational quantities.
    pub fn contains_strictly(&self, x: &BigRational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    /// `width / min(|lo|, |hi|)`; `None` when the enclosure touches zero.
    pub fn relative_width(&self) -> Option<BigRational> {
        if self.contains_zero() {
            return if self.is_point() {
                Some(BigRational::zero())
            } else {
                None
            };
        }
        let mag = self.lo.abs().min(self.hi.abs());
        Some(self.width() / mag)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn add_rational(&self, k: &BigRational) -> Enclosure {
        Enclosure::new(&self.lo + k, &self.hi + k)
    }

    pub fn scale(&self, k: &BigRational) -> Enclosure {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Enclosure::new(b, a)
        } else {
            Enclosure::new(a, b)
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure::new(lo, hi)
    }

    /// Enclosure of `1/x`; `None` if the interval contains zero.
    pub fn recip(&self) -> Option<Enclosure> {
        if self.contains_zero() {
            return None;
        }
        Some(Enclosure::new(self.hi.recip(), self.lo.recip()))
    }

    /// Image under `t ↦ t(1 - t)`, which is increasing below `1/2` and
    /// decreasing above it.
    pub fn parabola(&self) -> Enclosure {
        let f = |t: &BigRational| t * (BigRational::from_integer(1.into()) - t);
        let half = BigRational::new(1.into(), 2.into());
        let (flo, fhi) = (f(&self.lo), f(&self.hi));
        let lo = flo.clone().min(fhi.clone());
        let hi = if self.contains(&half) {
            f(&half)
        } else {
            flo.max(fhi)
        };
        Enclosure::new(lo, hi)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.mid_f64(), self.width_f64() / 2.0)
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Enclosure", 4)?;
        s.serialize_field("lo", &self.lo.to_string())?;
        s.serialize_field("hi", &self.hi.to_string())?;
        s.serialize_field("mid", &self.mid_f64())?;
        s.serialize_field("width", &self.width_f64())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parabola_covers_peak() {
        let e = Enclosure::new(q(1, 4), q(3, 4)).parabola();
        assert_eq!(e.hi(), &q(1, 4));
        assert_eq!(e.lo(), &q(3, 16));
        let m = Enclosure::new(q(0, 1), q(1, 8)).parabola();
        assert_eq!(m, Enclosure::new(q(0, 1), q(7, 64)));
    }

    #[test]
    fn interval_ops() {
        let a = Enclosure::new(q(1, 1), q(2, 1));
        let b = Enclosure::new(q(-1, 1), q(3, 1));
        assert_eq!(a.mul(&b), Enclosure::new(q(-2, 1), q(6, 1)));
        assert_eq!(a.sub(&b), Enclosure::new(q(-2, 1), q(3, 1)));
        assert_eq!(a.scale(&q(-1, 2)), Enclosure::new(q(-1, 1), q(-1, 2)));
        assert!(b.recip().is_none());
        assert_eq!(a.recip().unwrap(), Enclosure::new(q(1, 2), q(1, 1)));
    }
}
