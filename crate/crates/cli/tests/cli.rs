use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sector-count"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
}

#[test]
fn count_examples() {
    let o = run(&["count", "--alpha", "1/1", "--eps", "1*2^-30", "--R", "100"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "S"), "70");

    let o = run(&["count", "--alpha", "0/1", "--eps", "1*2^-30", "--R", "100"]);
    assert_eq!(field(&stdout(&o), "S"), "100");
}

#[test]
fn count_breakdown_sums_to_delta() {
    let o = run(&[
        "count", "--alpha", "(1+1*sqrt(5))/2", "--lambda", "1.2", "--R", "1000", "--breakdown", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let n = |k: &str| v["breakdown"][k].as_str().unwrap().parse::<i64>().unwrap();
    let delta: i64 = v["Delta"].as_str().unwrap().parse().unwrap();
    assert_eq!(n("delta_plus") + n("delta_zero") + n("delta_minus"), delta);
    assert_eq!(v["regime"], "main");
    assert_eq!(v["error_exponent"], "2/5");
}

#[test]
fn count_methods_agree() {
    let mut seen = Vec::new();
    for m in ["auto", "brute", "fast"] {
        let o = run(&["count", "--alpha", "sqrt(3)", "--eps", "1/64", "--R", "3000", "--method", m, "--format", "csv"]);
        assert!(o.status.success(), "{m}");
        let text = stdout(&o);
        let row = text.lines().nth(1).unwrap().to_string();
        seen.push(row.split(',').nth(3).unwrap().to_string());
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]), "{seen:?}");
}

#[test]
fn exit_codes() {
    // parse errors
    for args in [
        vec!["count", "--alpha", "1/2", "--eps", "0.01", "--R", "10"],
        vec!["count", "--alpha", "x", "--eps", "1/10", "--R", "10"],
        vec!["count", "--alpha", "1/2", "--eps", "1/10", "--R", "10", "--bogus"],
        vec!["count", "--alpha", "1/2", "--eps", "1/10", "--lambda", "1", "--R", "10"],
        vec!["classify", "--alpha-kind", "eta", "--lambda", "1"],
        vec!["classify", "--alpha-kind", "rational", "--lambda", "fast"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
    // counter errors
    for args in [
        vec!["count", "--alpha", "0/1", "--eps", "1/10", "--R", "1000000", "--method", "fast"],
        vec!["count", "--alpha", "1/2", "--eps", "2/1", "--R", "10"],
        vec!["convergents", "--alpha", "3/7", "--select-eps", "1/100"],
        vec!["verify-empty", "--alpha", "1/2", "--lambda", "2", "--rmin", "10", "--rmax", "100"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn convergents_examples() {
    let pq = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| {
                let c: Vec<_> = l.split(',').collect();
                format!("{}/{}", c[1], c[2])
            })
            .collect()
    };
    let o = run(&["convergents", "--alpha", "(1+1*sqrt(5))/2", "--depth", "4", "--format", "csv"]);
    assert_eq!(pq(&o), ["1/1", "2/1", "3/2", "5/3", "8/5"]);
    let o = run(&["convergents", "--alpha", "(0+1*sqrt(2))/1", "--depth", "3", "--format", "csv"]);
    assert_eq!(pq(&o), ["1/1", "3/2", "7/5", "17/12"]);

    let o = run(&["convergents", "--alpha", "(1+1*sqrt(5))/2", "--depth", "8", "--select-eps", "1/100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["selected"]["p"], "21");
    assert_eq!(v["selected"]["q"], "13");
    assert_eq!(v["convergents"].as_array().unwrap().len(), 9);
}

#[test]
fn classify_examples() {
    let o = run(&["classify", "--alpha-kind", "eta:1", "--lambda", "1.5"]);
    let t = stdout(&o);
    assert_eq!(field(&t, "regime"), "main");
    assert_eq!(field(&t, "error exponent"), "1/4");
    let o = run(&["classify", "--alpha-kind", "eta:2", "--lambda", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["regime"], "gap");
    assert!(v["predicted_error_exponent"].is_null());
    let o = run(&["classify", "--alpha-kind", "rational", "--lambda", "2", "--format", "csv"]);
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",line-only,"));
}

#[test]
fn verify_empty_examples() {
    let o = run(&["verify-empty", "--alpha", "(0+1*sqrt(2))/1", "--lambda", "2.5", "--rmin", "10", "--rmax", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("largest non-empty R: none"));

    // non-empty regime: violation unless the threshold covers it
    let args = ["verify-empty", "--alpha", "sqrt(2)", "--lambda", "0.5", "--rmin", "100", "--rmax", "100"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(5));
    assert!(o.stdout.is_empty());
    let o = run(&[&args[..], &["--threshold", "100"]].concat());
    assert_eq!(o.status.code(), Some(0));
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("sweep.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

const PHI_CONFIG: &str = "slope = (1+1*sqrt(5))/2\nlambda = 1.2\nr_min = 1000\nr_max = 1000000\npoints = 13\nprogress = false\n";

#[test]
fn sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), PHI_CONFIG);
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "R,eps_num,eps_den,S,Delta,area_mid,area_width,main_term,abs_err,ratio,regime,method,ms"
    );
    assert_eq!(lines.count(), 13);
}

#[test]
fn sweep_json_uses_csv_names() {
    let o = run(&[
        "sweep", "--alpha", "1/2", "--lambda", "0.8", "--rmin", "100", "--rmax", "1000", "--points", "3", "--quiet",
        "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let header = "R,eps_num,eps_den,S,Delta,area_mid,area_width,main_term,abs_err,ratio,regime,method,ms";
    for row in rows {
        let mut keys: Vec<_> = row.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want: Vec<_> = header.split(',').collect();
        keys.sort();
        want.sort();
        assert_eq!(keys, want);
    }
}

#[test]
fn sweep_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "slope = 1/2\nlambda = 0.8\nr_min = 100\nmystery = 4\nr_max = 1000\n");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let cfg = write_config(dir.path(), PHI_CONFIG);
    let bad = dir.path().join("missing-dir").join("out.csv");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--output", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(o.stdout.is_empty());
}
