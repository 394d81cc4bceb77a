use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExperimentRow, HarnessError};
use crate::counting::SectorQuery;
use crate::slopes::SlopeValue;

/// Minimum number of usable rows for a log-log fit.
pub const MIN_FIT_ROWS: usize = 5;

/// Least-squares fit of `ln y = slope·ln x + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    /// Rows left out: failed, or with zero error.
    pub excluded: usize,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit, HarnessError> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let excluded = points.len() - logs.len();
    if logs.len() < MIN_FIT_ROWS {
        return Err(HarnessError::InsufficientData {
            needed: MIN_FIT_ROWS,
            usable: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::InsufficientData {
            needed: MIN_FIT_ROWS,
            usable: 1,
        });
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ExponentFit {
        slope,
        intercept: my - slope * mx,
        r2,
        used: logs.len(),
        excluded,
    })
}

/// Fit of `ln |S - Area|` against `ln R`; rows with `S = Area` exactly or a
/// failed count are excluded and counted in `excluded`.
pub fn fit_error_exponent(rows: &[ExperimentRow]) -> Result<ExponentFit, HarnessError> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.radius_f64(), r.counts().map_or(0.0, |c| c.abs_err)))
        .collect();
    fit_power_law(&points)
}

/// Shape of the error term a constant is measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundForm {
    /// `C·R`.
    Linear,
    /// `C·R^e`.
    Power(f64),
    /// `C·(1 + (Rε)²)`.
    Quadratic,
}

/// Which discrepancy is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residual {
    /// `|S - Area|`.
    Area,
    /// `|S - main - β/ε|`, rational slopes only.
    RationalCorrected,
    /// `|S - Δ|`.
    Triangle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    /// Largest residual / bound over the rows.
    pub c_measured: f64,
    pub pass: bool,
    pub worst_radius: Option<BigInt>,
    pub rows_used: usize,
    /// Rows that failed to count or lack the requested residual; any such
    /// row fails the check.
    pub rows_missing: usize,
}

/// `C_measured = max residual/bound`; passes iff `C_measured ≤ cap` and
/// every row had the residual.
pub fn check_bound(rows: &[ExperimentRow], form: BoundForm, residual: Residual, cap: f64) -> BoundCheck {
    let mut c_measured = 0.0f64;
    let mut worst_radius = None;
    let mut rows_used = 0;
    let mut rows_missing = 0;
    for row in rows {
        let value = row.counts().and_then(|c| match residual {
            Residual::Area => Some(c.abs_err),
            Residual::RationalCorrected => c.rational_residual,
            Residual::Triangle => (&c.s - &c.delta).abs().to_f64(),
        });
        let Some(value) = value else {
            rows_missing += 1;
            continue;
        };
        let r = row.radius_f64();
        let bound = match form {
            BoundForm::Linear => r,
            BoundForm::Power(e) => r.powf(e),
            BoundForm::Quadratic => 1.0 + (r * row.eps_f64()).powi(2),
        };
        let c = value / bound;
        rows_used += 1;
        if c > c_measured || worst_radius.is_none() {
            c_measured = c_measured.max(c);
            worst_radius = Some(row.radius.clone());
        }
    }
    BoundCheck {
        c_measured,
        pass: c_measured <= cap && rows_missing == 0,
        worst_radius,
        rows_used,
        rows_missing,
    }
}

/// Quadratic slopes drawn by [`instance_suite`].
pub const SUITE_SLOPES: [&str; 4] = ["sqrt(2)", "sqrt(3)", "(1+sqrt(5))/2", "(1+sqrt(13))/2"];

/// Reproducible random queries: half with reduced `p/q` (`q ≤ 50`, `|p| ≤ 2q`),
/// half with a slope from [`SUITE_SLOPES`] (randomly negated);
/// `ε = m·2^-40` log-uniform in `[10^-6, 0.3]`; integer `R ∈ [10, 5000]`.
pub fn instance_suite(seed: u64, n: usize) -> Vec<SectorQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quadratics: Vec<SlopeValue> = SUITE_SLOPES
        .iter()
        .map(|s| s.parse().expect("suite slope parses"))
        .collect();
    let scale = BigInt::from(1u64 << 40);
    (0..n)
        .map(|i| {
            let alpha = if i % 2 == 0 {
                let q: i64 = rng.gen_range(1..=50);
                let p: i64 = rng.gen_range(-2 * q..=2 * q);
                SlopeValue::rational(p, q).expect("q > 0")
            } else {
                let a = quadratics[rng.gen_range(0..quadratics.len())].clone();
                if rng.gen_bool(0.25) {
                    a.negated()
                } else {
                    a
                }
            };
            let log_eps = rng.gen_range((1e-6f64).ln()..=(0.3f64).ln());
            let m = (log_eps.exp() * (1u64 << 40) as f64).round().max(1.0) as u64;
            let eps = BigRational::new(m.into(), scale.clone());
            let radius = BigRational::from_integer(rng.gen_range(10..=5000u32).into());
            SectorQuery::new(alpha, eps, radius).expect("eps ≤ 0.3 < 1 + |alpha|")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<_> = (0..10).map(|i| {
            let r = 1000.0 * 2f64.powi(i);
            (r, r.powf(0.5))
        }).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
        let pts: Vec<_> = (1..8).map(|i| (i as f64 * 10.0, 3.0 * (i as f64 * 10.0).powf(-1.25))).collect();
        assert!((fit_power_law(&pts).unwrap().slope + 1.25).abs() < 1e-9);
    }

    #[test]
    fn zero_errors_are_insufficient() {
        let pts: Vec<_> = (1..10).map(|i| (i as f64, 0.0)).collect();
        assert!(matches!(fit_power_law(&pts), Err(HarnessError::InsufficientData { usable: 0, .. })));
        let pts: Vec<_> = (1..5).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_power_law(&pts).is_err());
    }

    #[test]
    fn empty_rows_pass() {
        let b = check_bound(&[], BoundForm::Linear, Residual::Area, 10.0);
        assert_eq!(b.c_measured, 0.0);
        assert!(b.pass);
    }

    #[test]
    fn suite_is_reproducible() {
        let a = instance_suite(7, 40);
        let b = instance_suite(7, 40);
        assert_eq!(a, b);
        assert_ne!(a, instance_suite(8, 40));
        assert!(a.iter().any(|q| q.alpha().is_rational()));
        assert!(a.iter().any(|q| !q.alpha().is_rational()));
        let lo = BigRational::new(1.into(), 1_000_000.into());
        let hi = BigRational::new(3.into(), 10.into());
        assert!(a.iter().all(|q| *q.epsilon() >= lo && *q.epsilon() <= hi));
    }
}
