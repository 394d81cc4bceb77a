use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::brute::{count_sector_brute, sum_columns, Columns, Edge};
use super::exact::column_limit;
use super::{CountError, CountMethod, CountOptions, CountReport, PartitionBreakdown, SectorQuery};
use crate::arith::{mod_inverse, Surd};
use crate::slopes::{first_admissible_convergent, Convergent, SlopeValue};

/// Windows at least this wide are summed in parallel chunks.
const PARALLEL_WINDOW: u64 = 1 << 16;
const CHUNK: u64 = 1 << 13;

/// `#{1 ≤ m ≤ x : m ≡ r (mod q)}` for `x ≥ 0`, `0 ≤ r < q`.
fn residue_count(x: &BigInt, r: &BigInt, q: &BigInt) -> BigInt {
    (x - r).div_floor(q) - (-r).div_floor(q)
}

/// One sign class of the partition: `Σ_{1 ≤ k ≤ k_max} #{m ∈ (⌊k·scale⌋, M] : m ≡ k·step (mod q)}`.
///
/// With `scale = 1/((ε ± δ)q)` the lower limit is where the line `nq - mp = ±k`
/// enters the cone; `step` is `-p̄` for `d = k` and `p̄` for `d = -k`.
struct SignClass<'a> {
    scale: Edge,
    step: BigInt,
    q: &'a BigInt,
    m_max: &'a BigInt,
    /// `#{m ≤ M : m ≡ r}` per residue, when `q` is small enough to tabulate.
    tops: Vec<BigInt>,
}

impl<'a> SignClass<'a> {
    fn new(scale: &Surd, step: BigInt, q: &'a BigInt, m_max: &'a BigInt) -> Self {
        let tops = match q.to_u64().filter(|&qs| qs <= 1 << 20) {
            Some(qs) => (0..qs)
                .map(|r| residue_count(m_max, &BigInt::from(r), q))
                .collect(),
            None => Vec::new(),
        };
        SignClass {
            scale: Edge::new(scale),
            step,
            q,
            m_max,
            tops,
        }
    }

    fn term(&self, k: &BigInt) -> BigInt {
        let lower = self.scale.floor_at(k);
        let r = (k * &self.step).mod_floor(self.q);
        let top = match r.to_usize().and_then(|i| self.tops.get(i)) {
            Some(t) => t.clone(),
            None => residue_count(self.m_max, &r, self.q),
        };
        (top - residue_count(&lower, &r, self.q)).max(BigInt::zero())
    }

    fn range_sum(&self, from: u64, to: u64) -> BigInt {
        let mut total = BigInt::zero();
        let mut k = BigInt::from(from);
        for _ in from..=to {
            total += self.term(&k);
            k += 1;
        }
        total
    }

    fn sum(&self, k_max: &BigInt) -> Result<BigInt, CountError> {
        if k_max < &BigInt::from(1) {
            return Ok(BigInt::zero());
        }
        let n = k_max.to_u64().ok_or_else(|| {
            CountError::NotRepresentable(format!("d-window of width {k_max} is too large"))
        })?;
        if n < PARALLEL_WINDOW {
            return Ok(self.range_sum(1, n));
        }
        let chunks = n.div_ceil(CHUNK);
        Ok((0..chunks)
            .into_par_iter()
            .map(|c| self.range_sum(c * CHUNK + 1, ((c + 1) * CHUNK).min(n)))
            .sum())
    }
}

/// Exact count of `(m, n)` with `1 ≤ m ≤ M` and `|n/m - α| < ε`, partitioned
/// by `d = nq - mp` for a rational `p/q` with `|α - p/q| < ε`.
///
/// For fixed `d ≠ 0` the admissible `m` form the residue class
/// `m ≡ -d·p̄ (mod q)` above `d/((δ ± ε)q)`, so each `d` costs two floor
/// evaluations; `d = 0` contributes the multiples of `q`.
pub(crate) fn cone_partition(
    alpha: &Surd,
    eps: &BigRational,
    p: &BigInt,
    q: &BigInt,
    m_max: &BigInt,
) -> Result<PartitionBreakdown, CountError> {
    let pq = Surd::from_rational(BigRational::new(p.clone(), q.clone()));
    let eps_s = Surd::from_rational(eps.clone());
    let delta = alpha - &pq;
    let above = &delta + &eps_s; // δ + ε
    let below = &eps_s - &delta; // ε - δ
    if !above.is_positive() || !below.is_positive() {
        return Err(CountError::PreconditionViolated(format!(
            "|alpha - {p}/{q}| must be below eps"
        )));
    }
    let p_bar = mod_inverse(p, q).ok_or_else(|| {
        CountError::PreconditionViolated(format!("{p}/{q} is not in lowest terms"))
    })?;
    let zero = BigInt::zero();
    if m_max <= &zero {
        return Ok(PartitionBreakdown {
            d_min: zero.clone(),
            d_max: zero.clone(),
            delta_plus: zero.clone(),
            delta_zero: zero.clone(),
            delta_minus: zero.clone(),
            p_used: p.clone(),
            q_used: q.clone(),
            p_bar,
            m_max: m_max.clone(),
        });
    }
    let qr = BigRational::from_integer(q.clone());
    // d ranges over (-(ε-δ)qM, (δ+ε)qM).
    let d_max = Edge::new(&above.scale(&qr)).ceil_at(m_max) - 1;
    let e_max = Edge::new(&below.scale(&qr)).ceil_at(m_max) - 1;

    let plus_scale = above.scale(&qr).recip().expect("positive");
    let minus_scale = below.scale(&qr).recip().expect("positive");
    let plus = SignClass::new(&plus_scale, -p_bar.clone(), q, m_max);
    let minus = SignClass::new(&minus_scale, p_bar.clone(), q, m_max);
    let (delta_plus, delta_minus) = (plus.sum(&d_max)?, minus.sum(&e_max)?);

    Ok(PartitionBreakdown {
        d_min: -e_max,
        d_max,
        delta_plus,
        delta_zero: m_max.div_floor(q),
        delta_minus,
        p_used: p.clone(),
        q_used: q.clone(),
        p_bar,
        m_max: m_max.clone(),
    })
}

/// `Δ` via the partition around a convergent `p/q` of an irrational `α`
/// with `|α - p/q| < ε/2`.
pub fn count_triangle_fast(
    query: &SectorQuery,
    conv: &Convergent,
) -> Result<(BigInt, PartitionBreakdown), CountError> {
    if query.alpha().is_rational() {
        return Err(CountError::PreconditionViolated(
            "slope is rational; use count_rational_fast".into(),
        ));
    }
    let alpha = query.alpha().to_surd();
    let delta = &alpha - &Surd::from_rational(conv.ratio());
    let half_eps = query.epsilon() / BigRational::from_integer(2.into());
    if delta.abs().cmp_rational(&half_eps).is_ge() {
        return Err(CountError::PreconditionViolated(format!(
            "|alpha - {}/{}| must be below eps/2",
            conv.p, conv.q
        )));
    }
    let m_max = column_limit(query.radius(), &alpha);
    let b = cone_partition(&alpha, query.epsilon(), &conv.p, &conv.q, &m_max)?;
    Ok((b.total(), b))
}

/// `Δ` for a rational slope `p/q`, partitioned around `p/q` itself.
pub fn count_rational_fast(
    query: &SectorQuery,
) -> Result<(BigInt, PartitionBreakdown), CountError> {
    let (p, q) = match query.alpha() {
        SlopeValue::Rational { p, q } => (p, q),
        SlopeValue::Quadratic { .. } => {
            return Err(CountError::PreconditionViolated(
                "slope is irrational; use count_triangle_fast".into(),
            ))
        }
    };
    let alpha = query.alpha().to_surd();
    let m_max = column_limit(query.radius(), &alpha);
    let b = cone_partition(&alpha, query.epsilon(), p, q, &m_max)?;
    Ok((b.total(), b))
}

/// Exact `S` without enumerating every column.
///
/// With `0 < α - ε`, columns `m ≤ M₁ = ⌊R/√(1+(α+ε)²)⌋` lie entirely inside
/// the disk and columns `m > M₂ = ⌊R/√(1+(α-ε)²)⌋` entirely outside it, so
/// `S = Δ - Σ_{M₁<m≤M} open(m) + Σ_{M₁<m≤M₂} disk(m)` where only the band
/// `(M₁, M₂]` of `O(εR + 1)` columns is enumerated. Slopes with `α + ε < 0`
/// are mirrored; sectors straddling the x-axis fall back to brute force.
pub fn count_sector_fast(query: &SectorQuery, opts: &CountOptions) -> Result<CountReport, CountError> {
    let start = Instant::now();
    let (lo, hi) = query.edges();
    let (work, mirrored) = if lo.is_positive() {
        (query.clone(), false)
    } else if hi.is_negative() {
        (query.mirrored(), true)
    } else {
        if opts.admits(query.radius()) {
            return count_sector_brute(query, opts);
        }
        return Err(CountError::FallbackImpossible {
            reason: "sector contains the x-axis direction (alpha - eps <= 0 <= alpha + eps)".into(),
            radius: query.radius().clone(),
        });
    };
    let alpha = work.alpha().to_surd();
    let (lo, hi) = work.edges();
    let radius = work.radius();
    let m1 = column_limit(radius, &hi);
    let m_mid = column_limit(radius, &alpha);
    let m2 = column_limit(radius, &lo);

    let (p, q, method) = match work.alpha() {
        SlopeValue::Rational { p, q } => (p.clone(), q.clone(), CountMethod::FastRational),
        SlopeValue::Quadratic { .. } => {
            let conv = first_admissible_convergent(work.alpha(), work.epsilon())?;
            (conv.p, conv.q, CountMethod::FastConvergent)
        }
    };
    let breakdown = cone_partition(&alpha, work.epsilon(), &p, &q, &m_mid)?;
    let delta = breakdown.total();

    let cols = Columns::new(&work);
    let removed = sum_columns(&m1, &m_mid, |m| cols.open(m));
    let added = sum_columns(&m1, &m2, |m| cols.in_disk(m));
    let band_correction = added - removed;
    Ok(CountReport {
        s: &delta + &band_correction,
        delta,
        breakdown: Some(breakdown),
        band_correction,
        band_start: Some(m1),
        band_end: Some(m2),
        method,
        mirrored,
        timing: start.elapsed(),
    })
}
