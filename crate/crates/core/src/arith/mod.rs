//! Exact arithmetic substrate.
//!
//! Every strict inequality in the counters is decided here, either on plain
//! rationals or on elements of a real quadratic field `Q(√d)`. Transcendental
//! quantities (arctangent, π) are only ever produced as [`Enclosure`]s with
//! rational endpoints.

mod atan;
mod enclosure;
mod surd;

pub use atan::{atan_enclosure, atan_rational, pi};
pub use enclosure::Enclosure;
pub use surd::Surd;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Environment variable overriding the working precision (in bits) of
/// enclosure arithmetic.
pub const PRECISION_ENV: &str = "SECTOR_COUNT_PRECISION";

/// Default working precision for enclosures, in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Working precision taken from `SECTOR_COUNT_PRECISION`, falling back to
/// [`DEFAULT_PRECISION`] when unset or unparsable. Values below 64 are raised
/// to 64 so the relative-width guarantees on areas can still be met.
pub fn working_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .map(|bits| bits.max(64))
        .unwrap_or(DEFAULT_PRECISION)
}

/// `floor(x)` for a rational.
pub fn floor_rational(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// `ceil(x)` for a rational.
pub fn ceil_rational(x: &BigRational) -> BigInt {
    -(-x.numer()).div_floor(x.denom())
}

/// Integer square root `floor(√n)` for `n ≥ 0`.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

/// Whether `n` is a perfect square (negative numbers never are).
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `floor(√x)` for a nonnegative rational; uses `floor(√x) = isqrt(floor(x))`.
pub fn floor_sqrt_rational(x: &BigRational) -> BigInt {
    isqrt(&floor_rational(x))
}

/// Modular inverse of `a` modulo `m > 0`, in `[0, m)`. `None` when not coprime.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// `2^k` as an integer.
pub fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Rough base-2 logarithm of a positive rational, good to within one unit.
pub(crate) fn log2_estimate(x: &BigRational) -> i64 {
    let n = x.numer().abs();
    if n.is_zero() {
        return i64::MIN / 4;
    }
    n.bits() as i64 - x.denom().bits() as i64
}

/// Sign of an integer as `-1`, `0` or `1`.
pub(crate) fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `a + b·√d` for integers `a`, `b` and a nonsquare `d ≥ 2`.
pub(crate) fn sign_linear_sqrt(a: &BigInt, b: &BigInt, d: &BigInt) -> i8 {
    let sa = sign_of(a);
    let sb = sign_of(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // Opposite signs: the larger magnitude wins, and they can never tie.
    let a2 = a * a;
    let b2d = b * b * d;
    if a2 > b2d {
        sa
    } else {
        sb
    }
}

/// `floor((a + b·√d) / c)` for integers with `c > 0` and `d ≥ 2` nonsquare.
///
/// `b·√d` lies strictly between two consecutive integers, so the numerator is
/// confined to an open unit interval `(k, k + 1)` and the floor of the
/// quotient equals `floor(k / c)`.
pub(crate) fn floor_linear_sqrt(a: &BigInt, b: &BigInt, d: &BigInt, c: &BigInt) -> BigInt {
    debug_assert!(c.is_positive());
    if b.is_zero() {
        return a.div_floor(c);
    }
    let t = isqrt(&(b * b * d));
    let k = if b.is_positive() { a + t } else { a - t - 1 };
    k.div_floor(c)
}
