use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::exact::column_limit;
use super::{CountError, CountMethod, CountOptions, CountReport, SectorQuery};
use crate::arith::{floor_linear_sqrt, floor_rational, isqrt, Surd};

/// Precomputed integer form of a slope edge `x = (a + b√d)/c` so that
/// `⌊m·x⌋` costs one integer square root.
#[derive(Clone, Debug)]
pub(crate) struct Edge {
    a: BigInt,
    b: BigInt,
    d: BigInt,
    c: BigInt,
}

impl Edge {
    pub(crate) fn new(x: &Surd) -> Self {
        let (a, b, c) = x.integer_form();
        Edge {
            a,
            b,
            d: x.radicand().clone(),
            c,
        }
    }

    /// `⌊m·x⌋`.
    pub(crate) fn floor_at(&self, m: &BigInt) -> BigInt {
        if self.b.is_zero() {
            return (&self.a * m).div_floor(&self.c);
        }
        floor_linear_sqrt(&(&self.a * m), &(&self.b * m), &self.d, &self.c)
    }

    /// `⌈m·x⌉`.
    pub(crate) fn ceil_at(&self, m: &BigInt) -> BigInt {
        if self.b.is_zero() {
            return -(-(&self.a * m)).div_floor(&self.c);
        }
        -floor_linear_sqrt(&-(&self.a * m), &-(&self.b * m), &self.d, &self.c)
    }
}

/// Per-column counting for the open slope interval `(m·lo, m·hi)`.
#[derive(Clone, Debug)]
pub(crate) struct Columns {
    lo: Edge,
    hi: Edge,
    /// `⌊R²⌋`; `m² + n² ≤ R²` iff `m² + n² ≤ ⌊R²⌋` for integers.
    radius_sq_floor: BigInt,
}

impl Columns {
    pub(crate) fn new(query: &SectorQuery) -> Self {
        let (lo, hi) = query.edges();
        Columns {
            lo: Edge::new(&lo),
            hi: Edge::new(&hi),
            radius_sq_floor: floor_rational(&(query.radius() * query.radius())),
        }
    }

    /// Lowest and highest integer `n` with `m·lo < n < m·hi`.
    fn open_range(&self, m: &BigInt) -> (BigInt, BigInt) {
        (self.lo.floor_at(m) + 1, self.hi.ceil_at(m) - 1)
    }

    /// `#{n : m(α-ε) < n < m(α+ε)}`.
    pub(crate) fn open(&self, m: &BigInt) -> BigInt {
        let (lo, hi) = self.open_range(m);
        let n: BigInt = hi - lo + 1;
        n.max(BigInt::zero())
    }

    /// Same, intersected with the closed disk `m² + n² ≤ R²`.
    pub(crate) fn in_disk(&self, m: &BigInt) -> BigInt {
        let rest = &self.radius_sq_floor - m * m;
        if rest < BigInt::zero() {
            return BigInt::zero();
        }
        let s = isqrt(&rest);
        let (lo, hi) = self.open_range(m);
        let lo = lo.max(-s.clone());
        let hi = hi.min(s);
        let n: BigInt = hi - lo + 1;
        n.max(BigInt::zero())
    }
}

fn check_ceiling(query: &SectorQuery, opts: &CountOptions) -> Result<(), CountError> {
    if opts.admits(query.radius()) {
        Ok(())
    } else {
        Err(CountError::CeilingExceeded {
            radius: query.radius().clone(),
            ceiling: opts.brute_ceiling.clone(),
        })
    }
}

/// Sum of `f(m)` over `m = from+1 ..= to`.
pub(crate) fn sum_columns(from: &BigInt, to: &BigInt, f: impl Fn(&BigInt) -> BigInt) -> BigInt {
    let mut total = BigInt::zero();
    let mut m = from + 1;
    while &m <= to {
        total += f(&m);
        m += 1;
    }
    total
}

/// `Δ` by direct summation over columns `1 ≤ m ≤ ⌊R/√(1+α²)⌋`.
pub fn count_triangle_brute(query: &SectorQuery, opts: &CountOptions) -> Result<BigInt, CountError> {
    check_ceiling(query, opts)?;
    let cols = Columns::new(query);
    let m_max = column_limit(query.radius(), &query.alpha().to_surd());
    Ok(sum_columns(&BigInt::zero(), &m_max, |m| cols.open(m)))
}

/// `S` by direct summation over columns `1 ≤ m ≤ ⌊R⌋` with the disk check.
pub fn count_sector_brute(query: &SectorQuery, opts: &CountOptions) -> Result<CountReport, CountError> {
    check_ceiling(query, opts)?;
    let start = Instant::now();
    let cols = Columns::new(query);
    let r_floor = floor_rational(query.radius());
    let s = sum_columns(&BigInt::zero(), &r_floor, |m| cols.in_disk(m));
    let delta = count_triangle_brute(query, opts)?;
    Ok(CountReport {
        band_correction: &s - &delta,
        s,
        delta,
        breakdown: None,
        band_start: None,
        band_end: None,
        method: CountMethod::Brute,
        mirrored: false,
        timing: start.elapsed(),
    })
}
