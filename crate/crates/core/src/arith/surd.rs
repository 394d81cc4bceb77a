use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{floor_linear_sqrt, pow2, sign_linear_sqrt, Enclosure};

/// An exact element `r + s·√d` of a real quadratic field.
///
/// `d` is either a nonsquare integer `≥ 2`, or `1` together with `s = 0` for
/// plain rationals. Binary operations require both operands to live in the
/// same field; a rational operand adopts the radicand of the other side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    irrational: BigRational,
    radicand: BigInt,
}

impl Surd {
    /// `r + s·√d`. Panics if `s ≠ 0` and `d` is not a nonsquare `≥ 2`.
    pub fn new(rational: BigRational, irrational: BigRational, radicand: BigInt) -> Self {
        if irrational.is_zero() {
            return Self::from_rational(rational);
        }
        assert!(
            radicand >= BigInt::from(2) && !super::is_perfect_square(&radicand),
            "radicand must be a nonsquare integer >= 2"
        );
        Surd {
            rational,
            irrational,
            radicand,
        }
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Surd {
            rational,
            irrational: BigRational::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irrational
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    /// Whether both values can be combined without leaving a single field.
    pub fn compatible(&self, other: &Surd) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    fn field_radicand(&self, other: &Surd) -> BigInt {
        assert!(
            self.compatible(other),
            "mixing quadratic fields Q(√{}) and Q(√{})",
            self.radicand,
            other.radicand
        );
        if self.is_rational() {
            other.radicand.clone()
        } else {
            self.radicand.clone()
        }
    }

    /// Integer triple `(a, b, c)` with `c > 0` and value `(a + b·√d) / c`.
    pub fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let c = self.rational.denom().lcm(self.irrational.denom());
        let a = self.rational.numer() * (&c / self.rational.denom());
        let b = self.irrational.numer() * (&c / self.irrational.denom());
        (a, b, c)
    }

    /// Sign as `-1`, `0`, `1`.
    pub fn signum(&self) -> i8 {
        let (a, b, _) = self.integer_form();
        sign_linear_sqrt(&a, &b, &self.radicand)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Surd {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison; panics on values from different fields.
    pub fn cmp_exact(&self, other: &Surd) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_exact(&Surd::from_rational(r.clone()))
    }

    pub fn floor(&self) -> BigInt {
        let (a, b, c) = self.integer_form();
        floor_linear_sqrt(&a, &b, &self.radicand, &c)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Field conjugate `r - s·√d`.
    pub fn conjugate(&self) -> Surd {
        Surd {
            rational: self.rational.clone(),
            irrational: -self.irrational.clone(),
            radicand: self.radicand.clone(),
        }
    }

    /// Field norm `r² - d·s²` (never zero for a nonzero element).
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.irrational * &self.irrational * BigRational::from_integer(self.radicand.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let conj = self.conjugate();
        Some(Surd {
            rational: &conj.rational / &n,
            irrational: &conj.irrational / &n,
            radicand: self.radicand.clone(),
        }
        .normalized())
    }

    pub fn scale(&self, k: &BigRational) -> Surd {
        Surd {
            rational: &self.rational * k,
            irrational: &self.irrational * k,
            radicand: self.radicand.clone(),
        }
        .normalized()
    }

    pub fn square(&self) -> Surd {
        self * self
    }

    fn normalized(self) -> Surd {
        if self.irrational.is_zero() {
            Surd::from_rational(self.rational)
        } else {
            self
        }
    }

    /// Closed enclosure on the dyadic grid `2^-bits`: `[⌊x·2^k⌋, ⌊x·2^k⌋ + 1] / 2^k`.
    /// Collapses to a point when `x·2^bits` is an integer.
    pub fn enclose(&self, bits: u64) -> Enclosure {
        let scale = pow2(bits);
        let scaled = self.scale(&BigRational::from_integer(scale.clone()));
        let lo = scaled.floor();
        if scaled.is_rational() && scaled.rational.is_integer() {
            let v = BigRational::new(lo, scale);
            return Enclosure::point(v);
        }
        let hi = &lo + 1;
        Enclosure::new(BigRational::new(lo, scale.clone()), BigRational::new(hi, scale))
    }

    /// Enclosure whose width is at most `2^-bits` times the magnitude of the
    /// value (for a nonzero value).
    pub fn enclose_relative(&self, bits: u64) -> Enclosure {
        if self.is_zero() {
            return Enclosure::point(BigRational::zero());
        }
        let mut k = bits;
        loop {
            let e = self.enclose(k);
            let mag = e.lo().abs().min(e.hi().abs());
            if e.is_point() || (!mag.is_zero() && e.width() * pow2(bits) <= mag) {
                return e;
            }
            k += bits.max(16);
        }
    }

    /// Approximate value as `f64` (diagnostics only).
    pub fn to_f64(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.irrational.is_zero() {
            return r;
        }
        let e = self.enclose_relative(60);
        let mid = (e.lo() + e.hi()) / BigRational::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(r)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rational, self.irrational, self.radicand)
        }
    }
}

impl From<BigRational> for Surd {
    fn from(r: BigRational) -> Self {
        Surd::from_rational(r)
    }
}

impl From<BigInt> for Surd {
    fn from(n: BigInt) -> Self {
        Surd::from_integer(n)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            rational: -self.rational.clone(),
            irrational: -self.irrational.clone(),
            radicand: self.radicand.clone(),
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Add<&Surd> for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let radicand = self.field_radicand(rhs);
        Surd {
            rational: &self.rational + &rhs.rational,
            irrational: &self.irrational + &rhs.irrational,
            radicand,
        }
        .normalized()
    }
}

impl Sub<&Surd> for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let radicand = self.field_radicand(rhs);
        Surd {
            rational: &self.rational - &rhs.rational,
            irrational: &self.irrational - &rhs.irrational,
            radicand,
        }
        .normalized()
    }
}

impl Mul<&Surd> for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let radicand = self.field_radicand(rhs);
        let d = BigRational::from_integer(radicand.clone());
        Surd {
            rational: &self.rational * &rhs.rational + &self.irrational * &rhs.irrational * d,
            irrational: &self.rational * &rhs.irrational + &self.irrational * &rhs.rational,
            radicand,
        }
        .normalized()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: &Surd) -> Surd {
                (&self).$m(rhs)
            }
        }
        impl $tr<Surd> for &Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sqrt2() -> Surd {
        Surd::new(q(0, 1), q(1, 1), 2.into())
    }

    #[test]
    fn arithmetic_identities() {
        let s = sqrt2();
        assert_eq!(s.square(), Surd::from_rational(q(2, 1)));
        let x = Surd::new(q(1, 2), q(3, 4), 2.into());
        let inv = x.recip().unwrap();
        assert_eq!(&x * &inv, Surd::from_rational(q(1, 1)));
        assert_eq!(Surd::zero().recip(), None);
    }

    #[test]
    fn floor_ceil_of_sqrt2_multiples() {
        let s = sqrt2();
        assert_eq!(s.floor(), 1.into());
        assert_eq!(s.ceil(), 2.into());
        assert_eq!((-&s).floor(), (-2).into());
        let big = s.scale(&q(1_000_000, 1));
        assert_eq!(big.floor(), 1_414_213.into());
    }

    #[test]
    fn rational_floor_and_ceil_on_integers() {
        let x = Surd::from_rational(q(10, 2));
        assert_eq!(x.floor(), 5.into());
        assert_eq!(x.ceil(), 5.into());
    }

    #[test]
    fn enclosure_contains_value() {
        let s = sqrt2();
        let e = s.enclose(40);
        assert!(s.cmp_rational(e.lo()) == Ordering::Greater);
        assert!(s.cmp_rational(e.hi()) == Ordering::Less);
        let r = s.enclose_relative(64);
        assert!(r.width() * pow2(64) <= r.lo().abs());
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics() {
        let a = sqrt2();
        let b = Surd::new(q(0, 1), q(1, 1), 3.into());
        let _ = &a + &b;
    }
}
