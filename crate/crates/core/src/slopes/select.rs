use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::{Convergent, ConvergentIter, SlopeError, SlopeValue};

/// How [`select_convergent`] picks among admissible convergents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SelectionMode {
    /// The first convergent (smallest `q`) with `|δ| < ε/2`.
    PaperRecipe,
    /// The admissible convergent with `q < R` minimizing
    /// `R/q + 1/(ε q²) + ε q R`.
    ErrorOptimal,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergentSelection {
    pub chosen: Convergent,
    /// Cutoff `X` with `q_i ≤ X < q_{i+1}`, reported as `q_{i+1} - 1`.
    #[serde(serialize_with = "crate::ser::display")]
    pub cutoff: BigRational,
    pub mode: SelectionMode,
    #[serde(serialize_with = "crate::ser::display")]
    pub eta_used: BigRational,
    /// The `ε` the selection was made for; `|δ| < ε/2` holds for it.
    #[serde(serialize_with = "crate::ser::display")]
    pub epsilon: BigRational,
    /// Value of `R/q + 1/(ε q²) + ε q R` for the chosen convergent.
    #[serde(serialize_with = "crate::ser::display")]
    pub error_bound: BigRational,
    /// Type constant `c(α)`; existential, never computed.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub c_alpha: Option<BigRational>,
    /// Derived constant `C`; existential, never computed.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub c_const: Option<BigRational>,
}

fn half(eps: &BigRational) -> BigRational {
    eps / BigRational::from_integer(BigInt::from(2))
}

fn concrete_error(q: &BigInt, eps: &BigRational, radius: &BigRational) -> BigRational {
    let q = BigRational::from_integer(q.clone());
    radius / &q + (eps * &q * &q).recip() + eps * &q * radius
}

/// First convergent with `|δ| < ε/2`, with no bound on `q`.
///
/// The counters use this directly: the partition identity stays exact for
/// any admissible convergent, however large its denominator.
pub fn first_admissible_convergent(
    slope: &SlopeValue,
    eps: &BigRational,
) -> Result<Convergent, SlopeError> {
    if slope.is_rational() {
        return Err(SlopeError::NotIrrational);
    }
    if !eps.is_positive() {
        return Err(SlopeError::InvalidParameter("eps must be positive".into()));
    }
    let bound = half(eps);
    Ok(ConvergentIter::new(slope)
        .find(|c| c.delta_below(&bound))
        .expect("quadratic expansions are infinite"))
}

/// Choose a convergent `p/q` of an irrational slope with `|δ| < ε/2` and
/// `q < R`.
pub fn select_convergent(
    slope: &SlopeValue,
    eps: &BigRational,
    mode: SelectionMode,
    radius: &BigRational,
    eta: &BigRational,
) -> Result<ConvergentSelection, SlopeError> {
    if slope.is_rational() {
        return Err(SlopeError::NotIrrational);
    }
    if !eps.is_positive() || eps >= &BigRational::one() {
        return Err(SlopeError::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    if eta < &BigRational::one() {
        return Err(SlopeError::InvalidParameter("eta must be >= 1".into()));
    }
    if !radius.is_positive() {
        return Err(SlopeError::InvalidParameter("R must be positive".into()));
    }
    let bound = half(eps);
    let mut iter = ConvergentIter::new(slope).peekable();
    let mut best: Option<(Convergent, BigRational, BigInt)> = None;
    while let Some(conv) = iter.next() {
        if BigRational::from_integer(conv.q.clone()) >= *radius {
            break;
        }
        if !conv.delta_below(&bound) {
            continue;
        }
        let next_q = iter.peek().map(|n| n.q.clone()).unwrap_or_else(|| &conv.q + 1);
        let err = concrete_error(&conv.q, eps, radius);
        match mode {
            SelectionMode::PaperRecipe => {
                best = Some((conv, err, next_q));
                break;
            }
            SelectionMode::ErrorOptimal => {
                if best.as_ref().map_or(true, |(_, e, _)| &err < e) {
                    best = Some((conv, err, next_q));
                }
            }
        }
    }
    let (chosen, error_bound, next_q) = best.ok_or_else(|| SlopeError::NoAdmissibleConvergent {
        radius: radius.clone(),
    })?;
    // Post-hoc re-verification of the guarantee.
    assert!(chosen.delta_below(&bound));
    Ok(ConvergentSelection {
        cutoff: BigRational::from_integer(next_q - 1),
        chosen,
        mode,
        eta_used: eta.clone(),
        epsilon: eps.clone(),
        error_bound,
        c_alpha: None,
        c_const: None,
    })
}

/// Heuristic estimate of the irrationality type from convergent growth.
#[derive(Clone, Debug, Serialize)]
pub struct TypeEstimate {
    pub eta_hat: f64,
    pub depth: usize,
    /// `log q_{i+1} / log q_i` for each `i ≤ depth` with `q_i ≥ 2`.
    pub per_step: Vec<(usize, f64)>,
}

fn ln_big(n: &BigInt) -> f64 {
    match n.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let shift = n.bits().saturating_sub(60);
            (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// Estimate the type `η` of an irrational slope from its first `depth + 1`
/// convergent denominators.
///
/// Since `q_{i+1} ≈ q_i^η` along the worst approximations, `η` is estimated
/// as the least-squares slope of `log q_{i+1}` against `log q_i` over the
/// upper half of the window. This is an advisory upper-window heuristic, not
/// a certified bound.
pub fn estimate_type(slope: &SlopeValue, depth: usize) -> Result<TypeEstimate, SlopeError> {
    if slope.is_rational() {
        return Err(SlopeError::NotIrrational);
    }
    if depth < 3 {
        return Err(SlopeError::InvalidParameter("depth must be >= 3".into()));
    }
    let qs: Vec<BigInt> = ConvergentIter::new(slope)
        .take(depth + 2)
        .map(|c| c.q)
        .collect();
    let two = BigInt::from(2);
    let per_step: Vec<(usize, f64)> = (0..=depth)
        .filter(|&i| qs[i] >= two)
        .map(|i| (i, ln_big(&qs[i + 1]) / ln_big(&qs[i])))
        .collect();

    let points: Vec<(f64, f64)> = (depth / 2..=depth)
        .filter(|&i| qs[i] >= two)
        .map(|i| (ln_big(&qs[i]), ln_big(&qs[i + 1])))
        .collect();
    let eta_hat = if points.len() >= 2 {
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        per_step.iter().map(|s| s.1).fold(f64::NAN, f64::max)
    };
    Ok(TypeEstimate {
        eta_hat,
        depth,
        per_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn phi() -> SlopeValue {
        SlopeValue::quadratic(1, 1, 2, 5).unwrap()
    }

    fn sqrt2() -> SlopeValue {
        SlopeValue::quadratic(0, 1, 1, 2).unwrap()
    }

    fn big_r() -> BigRational {
        q(1_000_000_000, 1)
    }

    /// Exact scan oracle: walk convergents and test |δ| < ε/2 by squaring.
    #[test]
    fn paper_recipe_examples() {
        let s = select_convergent(&phi(), &q(1, 100), SelectionMode::PaperRecipe, &big_r(), &q(1, 1))
            .unwrap();
        assert_eq!((s.chosen.p.clone(), s.chosen.q.clone()), (21.into(), 13.into()));
        assert_eq!(s.cutoff, q(20, 1));
        let s = select_convergent(&sqrt2(), &q(1, 2), SelectionMode::PaperRecipe, &big_r(), &q(1, 1))
            .unwrap();
        assert_eq!((s.chosen.p.clone(), s.chosen.q.clone()), (3.into(), 2.into()));
    }

    #[test]
    fn no_admissible_convergent_for_tiny_radius() {
        let e = select_convergent(&sqrt2(), &q(1, 1000), SelectionMode::PaperRecipe, &q(2, 1), &q(1, 1));
        assert!(matches!(e, Err(SlopeError::NoAdmissibleConvergent { .. })));
    }

    #[test]
    fn error_optimal_minimizes_concrete_bound() {
        let eps = q(1, 1_000_000);
        let r = q(10_000_000, 1);
        let s = select_convergent(&phi(), &eps, SelectionMode::ErrorOptimal, &r, &q(1, 1)).unwrap();
        assert!(s.chosen.delta_below(&(&eps / q(2, 1))));
        for c in ConvergentIter::new(&phi()).take_while(|c| BigRational::from_integer(c.q.clone()) < r) {
            if c.delta_below(&(&eps / q(2, 1))) {
                assert!(concrete_error(&c.q, &eps, &r) >= s.error_bound);
            }
        }
        let first = first_admissible_convergent(&phi(), &eps).unwrap();
        assert!(s.chosen.q >= first.q);
    }

    #[test]
    fn selection_rejects_bad_input() {
        let r = SlopeValue::rational(1, 2).unwrap();
        assert!(matches!(
            select_convergent(&r, &q(1, 10), SelectionMode::PaperRecipe, &big_r(), &q(1, 1)),
            Err(SlopeError::NotIrrational)
        ));
        assert!(select_convergent(&phi(), &q(3, 2), SelectionMode::PaperRecipe, &big_r(), &q(1, 1)).is_err());
        assert!(select_convergent(&phi(), &q(1, 2), SelectionMode::PaperRecipe, &big_r(), &q(1, 2)).is_err());
    }

    #[test]
    fn type_estimates_for_badly_approximable_slopes() {
        for s in [phi(), sqrt2(), SlopeValue::quadratic(0, 1, 1, 3).unwrap()] {
            let t = estimate_type(&s, 20).unwrap();
            assert!((t.eta_hat - 1.0).abs() < 0.05, "{s}: {}", t.eta_hat);
            assert!(!t.per_step.is_empty());
        }
        assert!(matches!(
            estimate_type(&SlopeValue::rational(3, 7).unwrap(), 20),
            Err(SlopeError::NotIrrational)
        ));
    }
}
