use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{log2_estimate, pow2, Enclosure};

/// Certified enclosure of `arctan(x)` for a rational `x`, with relative width
/// roughly `2^-prec`.
pub fn atan_rational(x: &BigRational, prec: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::point(BigRational::zero());
    }
    if x.is_negative() {
        return atan_rational(&-x.clone(), prec).neg();
    }
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    if x > &one {
        // arctan(x) = π/2 - arctan(1/x)
        let half_pi = pi(prec + 4).scale(&half);
        return half_pi.sub(&atan_rational(&x.recip(), prec + 4));
    }
    if x > &half {
        // arctan(x) = arctan(1/2) + arctan((x - 1/2) / (1 + x/2))
        let u = (x - &half) / (&one + x * &half);
        return atan_series(&half, prec + 4).add(&atan_series(&u, prec + 4));
    }
    atan_series(x, prec)
}

/// Enclosure of `arctan` over an interval (monotone, so endpoints suffice).
pub fn atan_enclosure(x: &Enclosure, prec: u32) -> Enclosure {
    let lo = atan_rational(x.lo(), prec);
    if x.is_point() {
        return lo;
    }
    let hi = atan_rational(x.hi(), prec);
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of π via `π/4 = arctan(1/2) + arctan(1/3)`.
pub fn pi(prec: u32) -> Enclosure {
    let a = atan_series(&BigRational::new(1.into(), 2.into()), prec + 4);
    let b = atan_series(&BigRational::new(1.into(), 3.into()), prec + 4);
    a.add(&b).scale(&BigRational::from_integer(4.into()))
}

/// Alternating Taylor series for `0 < y ≤ 1/2`.
///
/// Each term is floored onto the grid `2^-F`, so every term carries less than
/// one unit of rounding error; the tail is bounded by the first term that
/// rounds to zero.
fn atan_series(y: &BigRational, prec: u32) -> Enclosure {
    debug_assert!(y.is_positive() && y <= &BigRational::new(1.into(), 2.into()));
    let magnitude = (-log2_estimate(y)).max(0) as u64;
    let frac_bits = prec as u64 + magnitude + 24;
    let scale = pow2(frac_bits);

    let a = y.numer().clone();
    let b = y.denom().clone();
    let a2 = &a * &a;
    let b2 = &b * &b;
    let mut num_pow = a;
    let mut den_pow = b;

    let mut sum = BigInt::zero();
    let mut terms: u64 = 0;
    let mut k: u64 = 0;
    loop {
        let den = &den_pow * BigInt::from(2 * k + 1);
        let t = (&num_pow * &scale).div_floor(&den);
        terms += 1;
        if t.is_zero() {
            break;
        }
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        num_pow *= &a2;
        den_pow *= &b2;
        k += 1;
    }
    let slack = BigInt::from(terms + 1);
    Enclosure::new(
        BigRational::new(&sum - &slack, scale.clone()),
        BigRational::new(&sum + &slack, scale),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_digits() {
        let p = pi(128);
        // 3.14159265358979323846264338327950288...
        let lo = BigRational::new(
            BigInt::parse_bytes(b"314159265358979323846264338327950288", 10).unwrap(),
            BigInt::from(10).pow(35),
        );
        let hi = &lo + BigRational::new(1.into(), BigInt::from(10).pow(35));
        assert!(p.lo() >= &lo && p.hi() <= &hi, "{p}");
        assert!(p.relative_width().unwrap() * BigRational::from_integer(pow2(120)) < q(1, 1));
    }

    #[test]
    fn atan_one_is_quarter_pi() {
        let a = atan_rational(&q(1, 1), 100);
        let quarter = pi(110).scale(&q(1, 4));
        assert!(a.lo() <= quarter.hi() && quarter.lo() <= a.hi());
    }

    #[test]
    fn atan_matches_float() {
        for (n, d) in [(1, 7), (3, 5), (7, 3), (-5, 2), (1, 1_000_000), (123, 4)] {
            let x = q(n, d);
            let e = atan_rational(&x, 80);
            let f = (n as f64 / d as f64).atan();
            assert!((e.mid_f64() - f).abs() <= 1e-15 * f.abs().max(1e-300), "{n}/{d}");
            assert!(e.relative_width().unwrap().to_f64().unwrap() < 1e-20);
        }
    }

    #[test]
    fn tiny_arguments_keep_relative_precision() {
        let x = BigRational::new(1.into(), pow2(100));
        let e = atan_rational(&x, 64);
        // x - x³/3 < arctan(x) < x
        assert!(e.lo() < &x);
        assert!(e.hi() > &(&x - BigRational::new(1.into(), pow2(299))));
        assert!(e.relative_width().unwrap() * BigRational::from_integer(pow2(64)) < q(1, 1));
    }
}
