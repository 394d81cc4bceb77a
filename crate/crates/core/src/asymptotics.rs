//! Closed-form predictions for `S`: the sector area, its leading term, the
//! rational-slope corrections `β` and `γ`, and the regime table for
//! `ε = R^{-λ}`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{working_precision, Enclosure, Surd};
use crate::counting::query::opening_angle;
use crate::counting::SectorQuery;
use crate::slopes::SlopeValue;

/// Target relative width of [`sector_area`].
pub const AREA_RELATIVE_BITS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error("no prediction in the gap regime")]
    GapRegime,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `√n` as an exact field element.
fn sqrt_surd(n: &BigInt) -> Surd {
    SlopeValue::quadratic(0, 1, 1, n.clone())
        .expect("positive radicand")
        .to_surd()
}

/// Area of the sector with slopes in `(α-ε, α+ε)` and radius `R`, as an
/// enclosure with relative width at most `2^-64` (exact `0` for `R = 0`).
pub fn sector_area(query: &SectorQuery) -> Enclosure {
    sector_area_of(&query.alpha().to_surd(), query.epsilon(), query.radius())
}

/// [`sector_area`] for raw parameters; allows `R = 0`.
pub fn sector_area_of(alpha: &Surd, eps: &BigRational, radius: &BigRational) -> Enclosure {
    sector_area_bits(alpha, eps, radius, AREA_RELATIVE_BITS)
}

/// [`sector_area_of`] with relative width at most `2^-bits`.
pub fn sector_area_bits(alpha: &Surd, eps: &BigRational, radius: &BigRational, bits: u32) -> Enclosure {
    let half_r2 = radius * radius / BigRational::from_integer(2.into());
    if half_r2.is_zero() {
        return Enclosure::point(BigRational::zero());
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut prec = working_precision().max(bits + 16);
    loop {
        let area = opening_angle(alpha, eps, prec).scale(&half_r2);
        if area.relative_width().is_some_and(|w| w <= target) || prec >= 1 << 14 {
            return area;
        }
        prec *= 2;
    }
}

/// Leading term `εR²/(1+α²)`, exact in `Q(√d)`.
pub fn main_term(query: &SectorQuery) -> Surd {
    main_term_of(&query.alpha().to_surd(), query.epsilon(), query.radius())
}

pub fn main_term_of(alpha: &Surd, eps: &BigRational, radius: &BigRational) -> Surd {
    let one_plus = &alpha.square() + &Surd::from_rational(BigRational::one());
    one_plus
        .recip()
        .expect("1 + α² > 0")
        .scale(&(eps * radius * radius))
}

/// Rational-slope closed form around `x = εq²R/√(p²+q²)`.
#[derive(Clone, Debug, Serialize)]
pub struct RationalClosedForm {
    /// `εq²R²/(p²+q²)`.
    #[serde(serialize_with = "crate::ser::display")]
    pub main: BigRational,
    /// `β = {x}(1 - {x})/q²`.
    pub beta: Enclosure,
    /// `γ = εq²R/(p²+q²) + β/(εR)`, present when requested.
    pub gamma: Option<Enclosure>,
    /// `x` itself.
    pub frac_arg: Enclosure,
    #[serde(skip)]
    pub beta_exact: Surd,
    #[serde(skip)]
    pub gamma_exact: Option<Surd>,
    /// `⌊x⌋`, decided exactly.
    #[serde(serialize_with = "crate::ser::display")]
    pub frac_floor: BigInt,
}

impl RationalClosedForm {
    /// `main + β/ε`, the prediction for `ε → 0` with `εR → ∞`.
    pub fn corrected_main(&self, eps: &BigRational) -> Surd {
        &Surd::from_rational(self.main.clone()) + &self.beta_exact.scale(&eps.recip())
    }
}

/// `main`, `β`, `{x}` and optionally `γ` for `α = p/q`.
///
/// `{x}` is exact: when `p² + q²` is a perfect square `x` is rational and an
/// integer `x` gives `{x} = 0`.
pub fn rational_closed_form(
    p: &BigInt,
    q: &BigInt,
    eps: &BigRational,
    radius: &BigRational,
    with_gamma: bool,
) -> Result<RationalClosedForm, AsymptoticError> {
    if !q.is_positive() {
        return Err(AsymptoticError::InvalidParameter("q must be positive".into()));
    }
    if !num_integer::Integer::gcd(p, q).is_one() {
        return Err(AsymptoticError::InvalidParameter(format!("{p}/{q} is not reduced")));
    }
    if !eps.is_positive() || !radius.is_positive() {
        return Err(AsymptoticError::InvalidParameter(
            "eps and R must be positive".into(),
        ));
    }
    let n = p * p + q * q;
    let q2 = BigRational::from_integer(q * q);
    let eq2r = eps * &q2 * radius;
    // x = εq²R·√N / N
    let x = sqrt_surd(&n).scale(&(&eq2r / BigRational::from_integer(n.clone())));
    let frac_floor = x.floor();
    let frac = &x - &Surd::from_integer(frac_floor.clone());
    let one = Surd::from_rational(BigRational::one());
    let beta_exact = (&frac * &(&one - &frac)).scale(&q2.recip());
    let main = &eq2r * radius / BigRational::from_integer(n.clone());
    let gamma_exact = with_gamma.then(|| {
        &Surd::from_rational(&eq2r / BigRational::from_integer(n.clone()))
            + &beta_exact.scale(&(eps * radius).recip())
    });
    let bits = working_precision() as u64;
    Ok(RationalClosedForm {
        main,
        beta: beta_exact.enclose(bits),
        gamma: gamma_exact.as_ref().map(|g| g.enclose(bits)),
        frac_arg: x.enclose(bits),
        beta_exact,
        gamma_exact,
        frac_floor,
    })
}

/// What is known about `α` for regime classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaKind {
    Rational,
    /// Irrational of finite type `η ≥ 1`.
    IrrationalType(BigRational),
}

impl AlphaKind {
    /// Quadratic irrationals are badly approximable, hence of type `1`.
    pub fn of(slope: &SlopeValue) -> AlphaKind {
        if slope.is_rational() {
            AlphaKind::Rational
        } else {
            AlphaKind::IrrationalType(BigRational::one())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Slow,
    Main,
    RationalLineOnly,
    CriticalRational,
    Gap,
    VeryQuick,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Slow => "slow",
            Regime::Main => "main",
            Regime::RationalLineOnly => "line-only",
            Regime::CriticalRational => "critical-rational",
            Regime::Gap => "gap",
            Regime::VeryQuick => "very-quick",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    /// `e` in the error term `O(R^e)`.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub predicted_error_exponent: Option<BigRational>,
    /// Whether the prediction carries the `β R^λ` term.
    pub beta_correction: bool,
    pub notes: String,
}

fn verdict(regime: Regime, exponent: Option<BigRational>, notes: impl Into<String>) -> RegimeVerdict {
    RegimeVerdict {
        regime,
        predicted_error_exponent: exponent,
        beta_correction: false,
        notes: notes.into(),
    }
}

/// Regime for `ε = R^{-λ}`.
///
/// Irrational type `η`: `[0, ½)` slow, `[½, (1+η)/(1+2η))` main with
/// exponent `2-2λ`, `[(1+η)/(1+2η), 1+1/η)` main with `1-λ/(1+η)`,
/// `[1+1/η, 1+η]` gap, beyond that empty. Rational: `[0, ½]` slow,
/// `(½, ⅔]` and `(⅔, 1)` exponent `2-2λ` (the latter with `β`), `1` critical,
/// above `1` only the line `y = αx` contributes.
pub fn classify_regime(kind: &AlphaKind, lambda: &BigRational) -> Result<RegimeVerdict, AsymptoticError> {
    if lambda.is_negative() {
        return Err(AsymptoticError::InvalidParameter("lambda must be nonnegative".into()));
    }
    let one = BigRational::one();
    let two = rat(2, 1);
    let half = rat(1, 2);
    let two_minus = || Some(&two - &two * lambda);
    Ok(match kind {
        AlphaKind::IrrationalType(eta) => {
            if eta < &one {
                return Err(AsymptoticError::InvalidParameter("eta must be at least 1".into()));
            }
            let b1 = (&one + eta) / (&one + &two * eta);
            let b2 = &one + eta.recip();
            let b3 = &one + eta;
            if lambda < &half {
                verdict(Regime::Slow, Some(one.clone()), "area + O(R)")
            } else if lambda < &b1 {
                verdict(Regime::Main, two_minus(), "area + O(R^(2-2*lambda))")
            } else if lambda < &b2 {
                let e = &one - lambda / &b3;
                verdict(Regime::Main, Some(e), "area + O(R^(1-lambda/(1+eta)))")
            } else if lambda <= &b3 {
                verdict(Regime::Gap, None, "no asymptotic available between 1+1/eta and 1+eta")
            } else {
                verdict(Regime::VeryQuick, None, "S = 0 for all large R")
            }
        }
        AlphaKind::Rational => {
            let two_thirds = rat(2, 3);
            if lambda <= &half {
                verdict(Regime::Slow, Some(one.clone()), "area + O(R)")
            } else if lambda <= &two_thirds {
                verdict(Regime::Main, two_minus(), "area + O(R^(2-2*lambda))")
            } else if lambda < &one {
                let mut v = verdict(
                    Regime::Main,
                    two_minus(),
                    "area + beta*R^lambda + O(R^(2-2*lambda))",
                );
                v.beta_correction = true;
                v
            } else if lambda == &one {
                verdict(Regime::CriticalRational, Some(BigRational::zero()), "gamma*R + O(1)")
            } else {
                verdict(
                    Regime::RationalLineOnly,
                    Some(BigRational::zero()),
                    "R/sqrt(p^2+q^2) + O(1)",
                )
            }
        }
    })
}

/// A predicted value of `S` with the error term it comes with.
#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub value: Enclosure,
    pub error_form: String,
}

fn error_form(v: &RegimeVerdict) -> String {
    match &v.predicted_error_exponent {
        Some(e) if e.is_zero() => "O(1)".into(),
        Some(e) if e.is_one() => "O(R)".into(),
        Some(e) => format!("O(R^{e})"),
        None => "exact for large R".into(),
    }
}

/// Value predicted for `S` under `verdict`.
pub fn predicted_count(query: &SectorQuery, verdict: &RegimeVerdict) -> Result<Prediction, AsymptoticError> {
    let bits = working_precision() as u64;
    let rational_parts = || match query.alpha() {
        SlopeValue::Rational { p, q } => Ok((p.clone(), q.clone())),
        SlopeValue::Quadratic { .. } => Err(AsymptoticError::InvalidParameter(format!(
            "{} regime needs a rational slope",
            verdict.regime
        ))),
    };
    let value = match verdict.regime {
        Regime::Gap => return Err(AsymptoticError::GapRegime),
        Regime::VeryQuick => Enclosure::point(BigRational::zero()),
        Regime::Slow | Regime::Main if !verdict.beta_correction => sector_area(query),
        Regime::Slow | Regime::Main => {
            let (p, q) = rational_parts()?;
            let form = rational_closed_form(&p, &q, query.epsilon(), query.radius(), false)?;
            sector_area(query).add(&form.beta_exact.scale(&query.epsilon().recip()).enclose(bits))
        }
        Regime::RationalLineOnly => {
            let (p, q) = rational_parts()?;
            let n = &p * &p + &q * &q;
            sqrt_surd(&n)
                .scale(&(query.radius() / BigRational::from_integer(n)))
                .enclose(bits)
        }
        Regime::CriticalRational => {
            let (p, q) = rational_parts()?;
            let form = rational_closed_form(&p, &q, query.epsilon(), query.radius(), true)?;
            form.gamma_exact
                .expect("requested")
                .scale(query.radius())
                .enclose(bits)
        }
    };
    Ok(Prediction {
        value,
        error_form: error_form(verdict),
    })
}
