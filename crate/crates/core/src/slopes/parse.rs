use std::str::FromStr;

use num_bigint::BigInt;

use super::{SlopeError, SlopeValue};

fn err(input: &str, reason: impl Into<String>) -> SlopeError {
    SlopeError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn int(input: &str, s: &str) -> Result<BigInt, SlopeError> {
    let s = s.strip_prefix('+').unwrap_or(s);
    s.parse::<BigInt>()
        .map_err(|_| err(input, format!("not an integer: {s:?}")))
}

/// Coefficient in front of `sqrt(..)`: empty or a bare sign means ±1.
fn coefficient(input: &str, s: &str) -> Result<BigInt, SlopeError> {
    let s = s.strip_suffix('*').unwrap_or(s);
    let s = s.strip_prefix('+').unwrap_or(s);
    match s {
        "" => Ok(BigInt::from(1)),
        "-" => Ok(BigInt::from(-1)),
        _ => int(input, s),
    }
}

/// Split `a±b` at the last sign that follows a digit.
fn split_linear(prefix: &str) -> (&str, &str) {
    let bytes = prefix.as_bytes();
    let mut split = None;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1].is_ascii_digit() {
            split = Some(i);
        }
    }
    match split {
        Some(i) => (&prefix[..i], &prefix[i..]),
        None => ("", prefix),
    }
}

fn parse_quadratic(input: &str, s: &str) -> Result<SlopeValue, SlopeError> {
    let (inner, denom) = if let Some(rest) = s.strip_prefix('(') {
        let close = rest
            .rfind(')')
            .ok_or_else(|| err(input, "unbalanced parentheses"))?;
        let tail = &rest[close + 1..];
        let denom = match tail {
            "" => BigInt::from(1),
            t => int(input, t.strip_prefix('/').ok_or_else(|| err(input, "expected /c"))?)?,
        };
        (&rest[..close], denom)
    } else {
        (s, BigInt::from(1))
    };
    let at = inner
        .find("sqrt(")
        .ok_or_else(|| err(input, "expected sqrt(D)"))?;
    let after = &inner[at + 5..];
    let close = after
        .find(')')
        .ok_or_else(|| err(input, "unterminated sqrt("))?;
    if close + 1 != after.len() {
        return Err(err(input, "unexpected text after sqrt(D)"));
    }
    let radicand = int(input, &after[..close])?;
    let (a, b) = split_linear(&inner[..at]);
    let a = if a.is_empty() {
        BigInt::from(0)
    } else {
        int(input, a)?
    };
    let b = coefficient(input, b)?;
    SlopeValue::quadratic(a, b, denom, radicand)
}

impl FromStr for SlopeValue {
    type Err = SlopeError;

    /// Accepts `p/q`, a bare integer, or `(a+b*sqrt(D))/c` (whitespace is
    /// ignored and `b` may carry its own sign).
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err(input, "empty slope"));
        }
        if s.contains("sqrt") {
            return parse_quadratic(input, &s);
        }
        match s.split_once('/') {
            Some((p, q)) => SlopeValue::rational(int(input, p)?, int(input, q)?),
            None => SlopeValue::rational(int(input, &s)?, 1),
        }
    }
}
