//! Flag value parsers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use sector_count::asymptotics::AlphaKind;
use sector_count::harness::parse_decimal;
use sector_count::SlopeValue;

use crate::CliError;

pub fn slope(s: &str) -> Result<SlopeValue, CliError> {
    s.parse().map_err(|e: sector_count::SlopeError| CliError::Parse(e.to_string()))
}

/// `m*2^-k`, `a/b` or an integer.
pub fn epsilon(s: &str) -> Result<BigRational, CliError> {
    let bad = |why: &str| CliError::Parse(format!("bad eps {s:?}: {why} (expected m*2^-k or a/b)"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let value = if let Some((m, k)) = t.split_once("*2^-") {
        let m: BigInt = m.parse().map_err(|_| bad("mantissa"))?;
        let k: u32 = k.parse().map_err(|_| bad("exponent"))?;
        BigRational::new(m, BigInt::one() << k)
    } else if t.contains('/') || t.chars().all(|c| c.is_ascii_digit()) {
        parse_decimal(&t).map_err(|e| bad(&e))?
    } else {
        return Err(bad("unrecognized form"));
    };
    if !value.is_positive() {
        return Err(bad("must be positive"));
    }
    Ok(value)
}

/// Decimal, integer or `a/b`.
pub fn rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    parse_decimal(s).map_err(|e| CliError::Parse(format!("bad {name}: {e}")))
}

pub fn integer(name: &str, s: &str) -> Result<BigInt, CliError> {
    let r = rational(name, s)?;
    if !r.is_integer() {
        return Err(CliError::Parse(format!("bad {name}: {s:?} is not an integer")));
    }
    Ok(r.to_integer())
}

/// `rational` or `eta:H`.
pub fn alpha_kind(s: &str) -> Result<AlphaKind, CliError> {
    if s == "rational" {
        return Ok(AlphaKind::Rational);
    }
    match s.strip_prefix("eta:") {
        Some(h) => Ok(AlphaKind::IrrationalType(rational("eta", h)?)),
        None => Err(CliError::Parse(format!(
            "bad --alpha-kind {s:?}: expected `rational` or `eta:H`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_forms() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(epsilon("1*2^-30").unwrap(), BigRational::new(1.into(), BigInt::one() << 30));
        assert_eq!(epsilon("3 * 2^-2").unwrap(), r(3, 4));
        assert_eq!(epsilon("1/100").unwrap(), r(1, 100));
        assert_eq!(epsilon("2").unwrap(), r(2, 1));
        for bad in ["0.01", "0/1", "-1/2", "1*2^30", "x"] {
            assert!(epsilon(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn kinds() {
        assert_eq!(alpha_kind("rational").unwrap(), AlphaKind::Rational);
        assert_eq!(
            alpha_kind("eta:1.5").unwrap(),
            AlphaKind::IrrationalType(BigRational::new(3.into(), 2.into()))
        );
        assert!(alpha_kind("eta").is_err());
        assert!(integer("R", "1.5").is_err());
    }
}
