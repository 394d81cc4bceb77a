use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::HarnessError;
use crate::counting::DEFAULT_BRUTE_CEILING;
use crate::slopes::SlopeValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterChoice {
    /// Fast counter; it falls back to brute force below the ceiling when the
    /// sector contains the x-axis direction.
    Auto,
    Brute,
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything a sweep depends on. Two equal configs give byte-identical
/// output unless `timing` is on.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub slope: SlopeValue,
    pub lambda: BigRational,
    pub c0: BigRational,
    pub r_min: BigInt,
    pub r_max: BigInt,
    /// Grid size; `None` picks a spacing ratio of about `√2`.
    pub points: Option<usize>,
    pub counter: CounterChoice,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
    pub brute_ceiling: BigInt,
    /// Also run the brute counter on rows at or below the ceiling and mark
    /// disagreements as failed rows.
    pub cross_check: bool,
    /// Record wall time in the `ms` column (otherwise `-`).
    pub timing: bool,
    /// Cap on measured constants for [`check_bound`](super::check_bound).
    pub cap: f64,
    /// Print one progress line per row on stderr.
    pub progress: bool,
}

impl SweepConfig {
    pub fn new(slope: SlopeValue, lambda: BigRational, r_min: impl Into<BigInt>, r_max: impl Into<BigInt>) -> Self {
        SweepConfig {
            slope,
            lambda,
            c0: BigRational::one(),
            r_min: r_min.into(),
            r_max: r_max.into(),
            points: None,
            counter: CounterChoice::Auto,
            output: None,
            format: OutputFormat::Csv,
            seed: 0,
            brute_ceiling: BigInt::from(DEFAULT_BRUTE_CEILING),
            cross_check: false,
            timing: false,
            cap: 10.0,
            progress: false,
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = Some(points);
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.into()));
        if self.lambda.is_negative() {
            return bad("lambda must be nonnegative");
        }
        if !self.c0.is_positive() {
            return bad("c0 must be positive");
        }
        if self.r_min < BigInt::from(10) {
            return bad("r_min must be at least 10");
        }
        if self.r_max < self.r_min {
            return bad("r_max must be at least r_min");
        }
        if self.points.is_some_and(|p| p < 2) {
            return bad("points must be at least 2");
        }
        if !(self.cap > 0.0) {
            return bad("cap must be positive");
        }
        if self.counter == CounterChoice::Brute && self.r_max > self.brute_ceiling {
            return bad("brute counter requested but r_max exceeds the brute ceiling");
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    ///
    /// Keys: `slope` (or `alpha`), `lambda`, `c0`, `r_min`, `r_max`,
    /// `points`, `counter`, `output`, `format`, `seed`, `brute_ceiling`,
    /// `cross_check`, `timing`, `cap`, `progress`.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut slope = None;
        let mut lambda = None;
        let mut r_min = None;
        let mut r_max = None;
        let mut cfg = SweepConfig::new(SlopeValue::rational(0, 1).expect("0/1"), BigRational::one(), 10, 10);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| HarnessError::Config {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let err = |reason: String| HarnessError::Config {
                line,
                message: format!("bad value for `{key}`: {reason}"),
            };
            match key {
                "slope" | "alpha" => slope = Some(value.parse::<SlopeValue>().map_err(|e| err(e.to_string()))?),
                "lambda" => lambda = Some(parse_decimal(value).map_err(err)?),
                "c0" => cfg.c0 = parse_decimal(value).map_err(err)?,
                "r_min" => r_min = Some(parse_int(value).map_err(err)?),
                "r_max" => r_max = Some(parse_int(value).map_err(err)?),
                "points" => cfg.points = Some(value.parse().map_err(|e| err(format!("{e}")))?),
                "counter" => {
                    cfg.counter = match value {
                        "auto" => CounterChoice::Auto,
                        "brute" => CounterChoice::Brute,
                        "fast" => CounterChoice::Fast,
                        _ => return Err(err("expected auto, brute or fast".into())),
                    }
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                "format" => {
                    cfg.format = match value {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        _ => return Err(err("expected csv or json".into())),
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|e| err(format!("{e}")))?,
                "brute_ceiling" => cfg.brute_ceiling = parse_int(value).map_err(err)?,
                "cross_check" => cfg.cross_check = parse_bool(value).map_err(err)?,
                "timing" => cfg.timing = parse_bool(value).map_err(err)?,
                "progress" => cfg.progress = parse_bool(value).map_err(err)?,
                "cap" => cfg.cap = value.parse().map_err(|e| err(format!("{e}")))?,
                _ => {
                    return Err(HarnessError::Config {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        let missing = |k: &str| HarnessError::InvalidConfig(format!("missing key `{k}`"));
        cfg.slope = slope.ok_or_else(|| missing("slope"))?;
        cfg.lambda = lambda.ok_or_else(|| missing("lambda"))?;
        cfg.r_min = r_min.ok_or_else(|| missing("r_min"))?;
        cfg.r_max = r_max.ok_or_else(|| missing("r_max"))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {s:?}")),
    }
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(n);
    }
    // allow 1e6 style
    let r = parse_decimal(s)?;
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(format!("{s:?} is not an integer"))
    }
}

/// Exact rational from `a/b`, an integer, a decimal like `1.25`, or a
/// decimal with exponent like `2.5e-3`.
pub fn parse_decimal(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| format!("{s:?}: {e}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| format!("{s:?}: {e}"))?;
        if d == BigInt::from(0) {
            return Err(format!("{s:?}: zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|e| format!("{s:?}: {e}"))?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(format!("{s:?} is not a number"));
    }
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("{s:?} is not a number"));
    }
    let digits = format!("{int}{frac}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() { format!("{digits}0") } else { digits };
    let n = BigInt::from_str(&digits).map_err(|_| format!("{s:?} is not a number"))?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}
