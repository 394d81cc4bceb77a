use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::config::{CounterChoice, SweepConfig};
use super::{geometric_grid, HarnessError};
use crate::arith::Enclosure;
use crate::asymptotics::{
    classify_regime, main_term, rational_closed_form, sector_area_bits, AlphaKind, RegimeVerdict,
    AREA_RELATIVE_BITS,
};
use crate::counting::{
    count_sector_brute, count_sector_fast, CountError, CountOptions, CountReport, DyadicEpsilon,
    EpsSchedule, SectorQuery,
};
use crate::slopes::SlopeValue;

/// CSV header of sweep output; JSON rows use the same keys.
pub const CSV_HEADER: &str = "R,eps_num,eps_den,S,Delta,area_mid,area_width,main_term,abs_err,ratio,regime,method,ms";

/// Counting results for one grid radius.
#[derive(Clone, Debug)]
pub struct RowCounts {
    pub s: BigInt,
    pub delta: BigInt,
    pub area: Enclosure,
    /// `εR²/(1+α²)`.
    pub main_term: f64,
    /// `|S - Area|`.
    pub abs_err: f64,
    /// `S / Area`.
    pub ratio: f64,
    /// `|S - main - β/ε|` for rational slopes.
    pub rational_residual: Option<f64>,
    pub method: &'static str,
    /// Area enclosure still wider than `1e-6·abs_err` after one refinement.
    pub precision_flag: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub radius: BigInt,
    pub epsilon: DyadicEpsilon,
    pub regime: &'static str,
    /// `Err` holds the message of a failed row.
    pub outcome: Result<RowCounts, String>,
    pub millis: Option<f64>,
}

impl ExperimentRow {
    pub fn counts(&self) -> Option<&RowCounts> {
        self.outcome.as_ref().ok()
    }

    pub fn eps_f64(&self) -> f64 {
        self.epsilon.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius.to_f64().unwrap_or(f64::NAN)
    }

    /// Cells in [`CSV_HEADER`] order.
    pub fn cells(&self) -> Vec<String> {
        let eps = &self.epsilon.value;
        let mut cells = vec![self.radius.to_string(), eps.numer().to_string(), eps.denom().to_string()];
        match &self.outcome {
            Ok(c) => cells.extend([
                c.s.to_string(),
                c.delta.to_string(),
                format!("{}", c.area.mid_f64()),
                format!("{:e}", c.area.width_f64()),
                format!("{}", c.main_term),
                format!("{}", c.abs_err),
                format!("{}", c.ratio),
                self.regime.to_string(),
                if c.precision_flag {
                    format!("{}+imprecise", c.method)
                } else {
                    c.method.to_string()
                },
            ]),
            Err(msg) => {
                cells.extend(std::iter::repeat("NA".to_string()).take(7));
                cells.push(self.regime.to_string());
                cells.push(format!("error: {}", msg.replace([',', '\n'], ";")));
            }
        }
        cells.push(self.millis.map_or("-".to_string(), |m| format!("{m:.3}")));
        cells
    }

    /// JSON object with the CSV column names. Exact integers are strings,
    /// measurements numbers.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        let eps = &self.epsilon.value;
        m.insert("R".into(), json!(self.radius.to_string()));
        m.insert("eps_num".into(), json!(eps.numer().to_string()));
        m.insert("eps_den".into(), json!(eps.denom().to_string()));
        match &self.outcome {
            Ok(c) => {
                m.insert("S".into(), json!(c.s.to_string()));
                m.insert("Delta".into(), json!(c.delta.to_string()));
                m.insert("area_mid".into(), json!(c.area.mid_f64()));
                m.insert("area_width".into(), json!(c.area.width_f64()));
                m.insert("main_term".into(), json!(c.main_term));
                m.insert("abs_err".into(), json!(c.abs_err));
                m.insert("ratio".into(), json!(c.ratio));
                m.insert("regime".into(), json!(self.regime));
                m.insert("method".into(), json!(self.cells()[11]));
            }
            Err(msg) => {
                for k in ["S", "Delta", "area_mid", "area_width", "main_term", "abs_err", "ratio"] {
                    m.insert(k.into(), Value::Null);
                }
                m.insert("regime".into(), json!(self.regime));
                m.insert("method".into(), json!(format!("error: {msg}")));
            }
        }
        m.insert("ms".into(), self.millis.map_or(Value::Null, |x| json!(x)));
        Value::Object(m)
    }
}

pub fn write_csv(rows: &[ExperimentRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.cells().join(","))?;
    }
    Ok(())
}

pub fn write_json(rows: &[ExperimentRow], mut out: impl Write) -> std::io::Result<()> {
    let v = Value::Array(rows.iter().map(ExperimentRow::to_json).collect());
    serde_json::to_writer_pretty(&mut out, &v)?;
    writeln!(out)
}

fn exact_abs_err(s: &BigInt, area: &Enclosure) -> f64 {
    let d = BigRational::from_integer(s.clone()) - area.midpoint();
    d.abs().to_f64().unwrap_or(f64::INFINITY)
}

fn count(query: &SectorQuery, cfg: &SweepConfig, opts: &CountOptions) -> Result<CountReport, CountError> {
    let report = match cfg.counter {
        CounterChoice::Brute => count_sector_brute(query, opts)?,
        CounterChoice::Auto | CounterChoice::Fast => count_sector_fast(query, opts)?,
    };
    if cfg.cross_check && opts.admits(query.radius()) && cfg.counter != CounterChoice::Brute {
        let brute = count_sector_brute(query, opts)?;
        if brute.s != report.s || brute.delta != report.delta {
            return Err(CountError::PreconditionViolated(format!(
                "cross-check mismatch: fast S={} Delta={} brute S={} Delta={}",
                report.s, report.delta, brute.s, brute.delta
            )));
        }
    }
    Ok(report)
}

fn row_counts(query: &SectorQuery, cfg: &SweepConfig, opts: &CountOptions) -> Result<RowCounts, String> {
    let report = count(query, cfg, opts).map_err(|e| e.to_string())?;
    let alpha = query.alpha().to_surd();
    let mut area = sector_area_bits(&alpha, query.epsilon(), query.radius(), AREA_RELATIVE_BITS);
    let mut abs_err = exact_abs_err(&report.s, &area);
    let too_wide = |a: &Enclosure, err: f64| a.width_f64() > 1e-6 * err;
    let mut precision_flag = false;
    if too_wide(&area, abs_err) {
        area = sector_area_bits(&alpha, query.epsilon(), query.radius(), 2 * AREA_RELATIVE_BITS);
        abs_err = exact_abs_err(&report.s, &area);
        precision_flag = too_wide(&area, abs_err);
    }
    let rational_residual = match query.alpha() {
        SlopeValue::Rational { p, q } => {
            let form = rational_closed_form(p, q, query.epsilon(), query.radius(), false)
                .map_err(|e| e.to_string())?;
            let predicted = form.corrected_main(query.epsilon());
            let diff = &crate::arith::Surd::from_integer(report.s.clone()) - &predicted;
            Some(diff.abs().to_f64())
        }
        SlopeValue::Quadratic { .. } => None,
    };
    let area_mid = area.mid_f64();
    Ok(RowCounts {
        ratio: report.s.to_f64().unwrap_or(f64::NAN) / area_mid,
        main_term: main_term(query).to_f64(),
        s: report.s,
        delta: report.delta,
        area,
        abs_err,
        rational_residual,
        method: report.method.label(),
        precision_flag,
    })
}

/// Runs one sweep; rows come back in increasing `R`.
///
/// Counting failures do not abort the sweep: the row is kept with its error
/// message. Invalid schedules (e.g. `ε ≥ 1 + |α|`) are failures of that kind.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRow>, HarnessError> {
    cfg.validate()?;
    let schedule = EpsSchedule::new(cfg.lambda.clone(), cfg.c0.clone())?;
    let grid = geometric_grid(&cfg.r_min, &cfg.r_max, cfg.points);
    let opts = CountOptions::with_ceiling(cfg.brute_ceiling.clone());
    let verdict: Option<RegimeVerdict> = classify_regime(&AlphaKind::of(&cfg.slope), &cfg.lambda).ok();
    let regime = verdict.as_ref().map_or("unknown", |v| v.regime.label());
    let rows: Vec<ExperimentRow> = grid
        .par_iter()
        .map(|radius| -> Result<ExperimentRow, HarnessError> {
            let start = Instant::now();
            let r = BigRational::from_integer(radius.clone());
            let epsilon = schedule.epsilon_at(&r)?;
            let outcome = SectorQuery::new(cfg.slope.clone(), epsilon.value.clone(), r)
                .map_err(|e| e.to_string())
                .and_then(|query| row_counts(&query, cfg, &opts));
            let millis = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            if cfg.progress {
                match &outcome {
                    Ok(c) => eprintln!("R = {radius}: S = {} ({})", c.s, c.method),
                    Err(e) => eprintln!("R = {radius}: failed: {e}"),
                }
            }
            Ok(ExperimentRow {
                radius: radius.clone(),
                epsilon,
                regime,
                outcome,
                millis,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(rows)
}
