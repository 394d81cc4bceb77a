use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use sector_count::asymptotics::{classify_regime, main_term, sector_area, AlphaKind, Regime, RegimeVerdict};
use sector_count::counting::{
    count_rational_fast, count_sector_brute, count_sector_fast, count_triangle_fast, verify_empty as run_verify,
    CountOptions, EpsSchedule, PartitionBreakdown, SectorQuery,
};
use sector_count::harness::{
    geometric_grid, run_sweep, write_csv, write_json, CounterChoice, ExperimentRow, OutputFormat, SweepConfig,
    CSV_HEADER,
};
use sector_count::slopes::{
    convergents as list_convergents, first_admissible_convergent, select_convergent, SelectionMode,
};
use sector_count::SlopeError;

use crate::values;
use crate::{ClassifyArgs, CliError, ConvergentArgs, CountArgs, Format, Method, Mode, SweepArgs, VerifyArgs};

type Out = Result<String, CliError>;

fn counter_err(e: impl std::fmt::Display) -> CliError {
    CliError::Counter(e.to_string())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Left-aligned columns.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn exponent_text(v: &RegimeVerdict) -> String {
    v.predicted_error_exponent
        .as_ref()
        .map_or_else(|| "none".to_string(), |e| e.to_string())
}

/// Partition for display, taken from the report when the fast path ran.
fn partition(query: &SectorQuery, from_report: Option<PartitionBreakdown>) -> Result<PartitionBreakdown, CliError> {
    if let Some(b) = from_report {
        return Ok(b);
    }
    if query.alpha().is_rational() {
        return Ok(count_rational_fast(query).map_err(counter_err)?.1);
    }
    let conv = first_admissible_convergent(query.alpha(), query.epsilon()).map_err(counter_err)?;
    Ok(count_triangle_fast(query, &conv).map_err(counter_err)?.1)
}

pub fn count(a: &CountArgs, format: Format) -> Out {
    let alpha = values::slope(&a.alpha)?;
    let radius = values::rational("R", &a.radius)?;
    let lambda = a.lambda.as_deref().map(|l| values::rational("lambda", l)).transpose()?;
    let eps = match (&a.eps, &lambda) {
        (Some(e), _) => values::epsilon(e)?,
        (None, Some(l)) => {
            let c0 = a.c0.as_deref().map_or(Ok(BigRational::one()), |c| values::rational("c0", c))?;
            let schedule = EpsSchedule::new(l.clone(), c0).map_err(|e| CliError::Parse(e.to_string()))?;
            schedule.epsilon_at(&radius).map_err(|e| CliError::Parse(e.to_string()))?.value
        }
        (None, None) => return Err(CliError::Parse("one of --eps or --lambda is required".into())),
    };
    let query = SectorQuery::new(alpha.clone(), eps.clone(), radius.clone()).map_err(counter_err)?;
    let report = match a.method {
        Method::Brute => count_sector_brute(&query, &CountOptions::with_ceiling(a.brute_ceiling)),
        Method::Auto => count_sector_fast(&query, &CountOptions::with_ceiling(a.brute_ceiling)),
        // no brute fallback
        Method::Fast => count_sector_fast(&query, &CountOptions::with_ceiling(0)),
    }
    .map_err(counter_err)?;
    let breakdown = if a.breakdown {
        let b = partition(&query, report.breakdown.clone())?;
        if b.total() != report.delta {
            return Err(CliError::Counter(format!(
                "partition total {} disagrees with Delta {}",
                b.total(),
                report.delta
            )));
        }
        Some(b)
    } else {
        None
    };
    let area = sector_area(&query);
    let main = main_term(&query).to_f64();
    let verdict = lambda
        .as_ref()
        .map(|l| classify_regime(&AlphaKind::of(&alpha), l).map_err(|e| CliError::Parse(e.to_string())))
        .transpose()?;
    let regime = verdict.as_ref().map_or("-".to_string(), |v| v.regime.label().to_string());

    Ok(match format {
        Format::Json => {
            let mut v = json!({
                "alpha": alpha.to_string(),
                "eps": eps.to_string(),
                "R": radius.to_string(),
                "S": report.s.to_string(),
                "Delta": report.delta.to_string(),
                "area": area,
                "main_term": main,
                "regime": regime,
                "error_exponent": verdict.as_ref().and_then(|v| v.predicted_error_exponent.as_ref()).map(|e| e.to_string()),
                "method": report.method.label(),
                "mirrored": report.mirrored,
            });
            if let Some(b) = &breakdown {
                v["breakdown"] = serde_json::to_value(b).expect("breakdown serializes");
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut header = vec!["alpha", "eps", "R", "S", "Delta", "area_mid", "area_width", "main_term", "regime", "method"];
            let mut row = vec![
                alpha.to_string(),
                eps.to_string(),
                radius.to_string(),
                report.s.to_string(),
                report.delta.to_string(),
                area.mid_f64().to_string(),
                format!("{:e}", area.width_f64()),
                main.to_string(),
                regime,
                report.method.label().to_string(),
            ];
            if let Some(b) = &breakdown {
                header.extend(["p", "q", "d_min", "d_max", "delta_plus", "delta_zero", "delta_minus"]);
                row.extend(
                    [&b.p_used, &b.q_used, &b.d_min, &b.d_max, &b.delta_plus, &b.delta_zero, &b.delta_minus]
                        .map(BigInt::to_string),
                );
            }
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        Format::Table => {
            let mut pairs = vec![
                ("alpha", alpha.to_string()),
                ("eps", format!("{eps} (~{:e})", eps.to_f64().unwrap_or(f64::NAN))),
                ("R", radius.to_string()),
                ("S", report.s.to_string()),
                ("Delta", report.delta.to_string()),
                ("area", area.to_string()),
                ("main term", main.to_string()),
            ];
            if let Some(v) = &verdict {
                pairs.push(("regime", format!("{} (error exponent {})", v.regime, exponent_text(v))));
            }
            pairs.push(("method", report.method.label().to_string()));
            if report.mirrored {
                pairs.push(("mirrored", "yes (counted for -alpha)".into()));
            }
            if let Some(b) = &breakdown {
                pairs.extend([
                    ("p/q", format!("{}/{}", b.p_used, b.q_used)),
                    ("p inverse mod q", b.p_bar.to_string()),
                    ("columns M", b.m_max.to_string()),
                    ("d window", format!("[{}, {}]", b.d_min, b.d_max)),
                    ("Delta+", b.delta_plus.to_string()),
                    ("Delta0", b.delta_zero.to_string()),
                    ("Delta-", b.delta_minus.to_string()),
                    ("partition sum", format!("{} (= Delta)", b.total())),
                ]);
            }
            key_values(&pairs)
        }
    })
}

pub fn convergents(a: &ConvergentArgs, format: Format) -> Out {
    let alpha = values::slope(&a.alpha)?;
    let selection = match &a.select_eps {
        None => None,
        Some(e) => {
            let eps = values::epsilon(e)?;
            if alpha.is_rational() {
                return Err(CliError::Counter(format!(
                    "convergent selection needs an irrational slope, got {alpha}"
                )));
            }
            Some(match &a.radius {
                Some(r) => {
                    let radius = values::rational("R", r)?;
                    let mode = match a.mode {
                        Mode::Paper => SelectionMode::PaperRecipe,
                        Mode::Optimal => SelectionMode::ErrorOptimal,
                    };
                    let sel = select_convergent(&alpha, &eps, mode, &radius, &BigRational::one()).map_err(counter_err)?;
                    (sel.chosen, sel.mode)
                }
                None => (
                    first_admissible_convergent(&alpha, &eps).map_err(counter_err)?,
                    SelectionMode::PaperRecipe,
                ),
            })
        }
    };
    let depth = selection.as_ref().map_or(a.depth, |(c, _)| a.depth.max(c.index));
    let list = match list_convergents(&alpha, depth) {
        Ok(v) => v,
        Err(SlopeError::RationalExhausted { convergents }) => convergents,
        Err(e) => return Err(counter_err(e)),
    };
    let selected = selection.as_ref().map(|(c, _)| c.index);
    let mode_label = |m: &SelectionMode| match m {
        SelectionMode::PaperRecipe => "paper-recipe",
        SelectionMode::ErrorOptimal => "error-optimal",
    };
    Ok(match format {
        Format::Json => {
            let sel = selection.as_ref().map(|(c, m)| {
                json!({"index": c.index, "p": c.p.to_string(), "q": c.q.to_string(), "mode": mode_label(m)})
            });
            json_text(&json!({
                "alpha": alpha.to_string(),
                "convergents": serde_json::to_value(&list).expect("convergents serialize"),
                "selected": sel,
            }))
        }
        Format::Csv => {
            let mut out = String::from("index,p,q,delta_sign,delta_lo,delta_hi,selected\n");
            for c in &list {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    c.index,
                    c.p,
                    c.q,
                    c.delta_sign,
                    c.delta_bound.lo(),
                    c.delta_bound.hi(),
                    selected == Some(c.index)
                );
            }
            out
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = list
                .iter()
                .map(|c| {
                    vec![
                        if selected == Some(c.index) { "*".into() } else { String::new() },
                        c.index.to_string(),
                        format!("{}/{}", c.p, c.q),
                        match c.delta_sign {
                            1 => "+".into(),
                            -1 => "-".into(),
                            _ => "0".into(),
                        },
                        format!("{:.6e}", c.delta.to_f64()),
                        format!("{:.1e}", c.delta_bound.width_f64()),
                    ]
                })
                .collect();
            let mut out = table(&["", "i", "p/q", "sign", "delta", "bracket width"], &rows);
            if let Some((c, m)) = &selection {
                let _ = writeln!(out, "selected {}/{} (index {}, {})", c.p, c.q, c.index, mode_label(m));
            }
            out
        }
    })
}

pub fn classify(a: &ClassifyArgs, format: Format) -> Out {
    let kind = values::alpha_kind(&a.alpha_kind)?;
    let lambda = values::rational("lambda", &a.lambda)?;
    let v = classify_regime(&kind, &lambda).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(match format {
        Format::Json => {
            let mut obj = serde_json::to_value(&v).expect("verdict serializes");
            obj["regime"] = json!(v.regime.label());
            obj["alpha_kind"] = json!(a.alpha_kind);
            obj["lambda"] = json!(lambda.to_string());
            json_text(&obj)
        }
        Format::Csv => format!(
            "alpha_kind,lambda,regime,error_exponent,beta_correction,notes\n{},{},{},{},{},{}\n",
            a.alpha_kind,
            lambda,
            v.regime,
            exponent_text(&v),
            v.beta_correction,
            v.notes.replace(',', ";")
        ),
        Format::Table => {
            let exponent = if v.regime == Regime::Gap {
                "none: no prediction in the gap regime".to_string()
            } else {
                exponent_text(&v)
            };
            key_values(&[
                ("regime", v.regime.label().to_string()),
                ("error exponent", exponent),
                ("beta correction", v.beta_correction.to_string()),
                ("notes", v.notes.clone()),
            ])
        }
    })
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
            SweepConfig::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?
        }
        None => {
            let need = |v: &Option<String>, flag: &str| {
                v.clone().ok_or_else(|| CliError::Parse(format!("--{flag} is required without --config")))
            };
            SweepConfig::new(
                values::slope(&need(&a.alpha, "alpha")?)?,
                values::rational("lambda", &need(&a.lambda, "lambda")?)?,
                values::integer("rmin", &need(&a.rmin, "rmin")?)?,
                values::integer("rmax", &need(&a.rmax, "rmax")?)?,
            )
        }
    };
    if a.config.is_some() {
        if let Some(s) = &a.alpha {
            cfg.slope = values::slope(s)?;
        }
        if let Some(l) = &a.lambda {
            cfg.lambda = values::rational("lambda", l)?;
        }
        if let Some(r) = &a.rmin {
            cfg.r_min = values::integer("rmin", r)?;
        }
        if let Some(r) = &a.rmax {
            cfg.r_max = values::integer("rmax", r)?;
        }
    }
    if let Some(c) = &a.c0 {
        cfg.c0 = values::rational("c0", c)?;
    }
    if let Some(p) = a.points {
        cfg.points = Some(p);
    }
    if let Some(m) = a.counter {
        cfg.counter = match m {
            Method::Auto => CounterChoice::Auto,
            Method::Brute => CounterChoice::Brute,
            Method::Fast => CounterChoice::Fast,
        };
    }
    if let Some(o) = &a.output {
        cfg.output = Some(o.clone());
    }
    cfg.timing |= a.timing;
    cfg.cross_check |= a.cross_check;
    cfg.progress = !a.quiet;
    cfg.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(cfg)
}

fn sweep_table(rows: &[ExperimentRow]) -> String {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let cells: Vec<Vec<String>> = rows.iter().map(ExperimentRow::cells).collect();
    table(&header, &cells)
}

pub fn sweep(a: &SweepArgs, format: Option<Format>) -> Out {
    let cfg = sweep_config(a)?;
    let format = match (format, cfg.format) {
        (Some(f), _) => f,
        (None, OutputFormat::Json) if a.config.is_some() => Format::Json,
        (None, _) if a.config.is_some() || cfg.output.is_some() => Format::Csv,
        (None, _) => Format::Table,
    };
    // fail before the sweep if the destination cannot be created
    let file = cfg
        .output
        .as_ref()
        .map(|p| File::create(p).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))))
        .transpose()?;
    let rows = run_sweep(&cfg).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(&rows, &mut buf),
        Format::Csv => write_csv(&rows, &mut buf),
        Format::Table => {
            buf.extend_from_slice(sweep_table(&rows).as_bytes());
            Ok(())
        }
    }
    .expect("writing to memory");
    match (file, &cfg.output) {
        (Some(mut f), Some(path)) => {
            f.write_all(&buf)
                .and_then(|_| f.flush())
                .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            Ok(format!("wrote {} rows ({failed} failed) to {}\n", rows.len(), path.display()))
        }
        _ => Ok(String::from_utf8(buf).expect("utf-8 output")),
    }
}

pub fn verify_empty(a: &VerifyArgs, format: Format) -> Out {
    let alpha = values::slope(&a.alpha)?;
    let lambda = values::rational("lambda", &a.lambda)?;
    let c0 = a.c0.as_deref().map_or(Ok(BigRational::one()), |c| values::rational("c0", c))?;
    let rmin = values::integer("rmin", &a.rmin)?;
    let rmax = values::integer("rmax", &a.rmax)?;
    if rmin < BigInt::one() || rmax < rmin {
        return Err(CliError::Parse("need 1 <= rmin <= rmax".into()));
    }
    if a.points.is_some_and(|p| p < 1) {
        return Err(CliError::Parse("--points must be at least 1".into()));
    }
    let threshold = a.threshold.as_deref().map(|t| values::rational("threshold", t)).transpose()?;
    let schedule = EpsSchedule::new(lambda, c0).map_err(|e| CliError::Parse(e.to_string()))?;
    let grid: Vec<BigRational> = geometric_grid(&rmin, &rmax, a.points)
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let report = run_verify(&alpha, &schedule, &grid, &CountOptions::default()).map_err(counter_err)?;
    let pass = report.empty_beyond(threshold.as_ref());
    let largest = report
        .largest_nonempty
        .as_ref()
        .map_or_else(|| "none".to_string(), |r| r.to_string());
    let text = match format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["pass"] = json!(pass);
            v["threshold"] = json!(threshold.as_ref().map(|t| t.to_string()));
            json_text(&v)
        }
        Format::Csv => {
            let mut out = String::from("R,eps_num,eps_den,S,method\n");
            for r in &report.rows {
                let e = &r.epsilon.value;
                let _ = writeln!(out, "{},{},{},{},{}", r.radius, e.numer(), e.denom(), r.s, r.method.label());
            }
            out
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.radius.to_string(),
                        format!("{:.6e}", r.epsilon.value.to_f64().unwrap_or(f64::NAN)),
                        r.s.to_string(),
                        r.method.label().to_string(),
                    ]
                })
                .collect();
            let mut out = table(&["R", "eps", "S", "method"], &rows);
            let _ = writeln!(out, "largest non-empty R: {largest}");
            out
        }
    };
    if pass {
        Ok(text)
    } else {
        let scope = threshold.map_or("on the grid".to_string(), |t| format!("beyond R = {t}"));
        Err(CliError::Violation(format!(
            "non-empty sector {scope} (largest non-empty R: {largest})\n{text}"
        )))
    }
}
