use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sineseries"));
    c.env_remove("SINESERIES_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn body(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let (meta, rest) = text.split_once('\n').unwrap();
    assert!(meta.starts_with("# sineseries "), "{meta}");
    assert!(meta.contains(" | "));
    rest.to_string()
}

fn error_json(out: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().rev().find(|l| l.starts_with('{')).expect("error record");
    serde_json::from_str(line).unwrap()
}

#[test]
fn sweep_table_schema() {
    let dir = tempdir().unwrap();
    let f = dir.path().join("fig1.csv");
    let out = run(&["sweep", "--p", "2", "--t-max", "500", "--step", "0.1", "--out", f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = body(&f);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,trend,fluctuation,error_bound"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5000);
    assert!(!text.contains('\r'));
    for field in rows[123].split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
    let last: Vec<f64> = rows[4999].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 500.0).abs() < 1e-9);
    assert!((last[1] - (last[2] + last[3])).abs() < 1e-12);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("sweep rows=5000"));
}

#[test]
fn bounds_table_holds_corridor() {
    let dir = tempdir().unwrap();
    let f = dir.path().join("fig19.csv");
    assert!(run(&["bounds", "--n-star", "7", "--t-max", "120", "--out", f.to_str().unwrap()]).status.success());
    let text = body(&f);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s2,lower,upper,early_lower"));
    let mut n = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[1] + 1e-9 && v[1] <= v[3] + 1e-9, "{l}");
        n += 1;
    }
    assert_eq!(n, 1200);
}

#[test]
fn eval_at_zero() {
    let out = run(&["eval", "--p", "2", "--t", "0"]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    let row = table.lines().nth(2).unwrap();
    let v: Vec<&str> = row.split(',').collect();
    assert_eq!(v[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(v[2].parse::<f64>().unwrap(), 0.0);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("value=0.0") && summary.contains("error_bound=0.0"));
}

#[test]
fn determinism_and_verify() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for f in [&a, &b] {
        assert!(run(&["sweep", "--p", "1.5", "--t-max", "300", "--step", "0.25", "--out", f.to_str().unwrap()]).status.success());
    }
    assert_eq!(body(&a), body(&b));
    let v = run(&["--verify", a.to_str().unwrap()]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    assert!(String::from_utf8(v.stdout).unwrap().contains("13 of 1200 rows"));
}

#[test]
fn threads_do_not_change_output() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["sweep", "--p", "2", "--t-max", "2000", "--step", "5"];
    assert!(bin().args(args).args(["--out", a.to_str().unwrap()]).env("SINESERIES_THREADS", "1").status().unwrap().success());
    assert!(bin().args(args).args(["--out", b.to_str().unwrap()]).env("SINESERIES_THREADS", "3").status().unwrap().success());
    assert_eq!(body(&a), body(&b));
    let bad = bin().args(["eval", "--p", "2", "--t", "1"]).env("SINESERIES_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_every_subcommand() {
    let dir = tempdir().unwrap();
    let cases: [&[&str]; 9] = [
        &["eval", "--p", "2.6457513110645907", "--t", "1234.5"],
        &["sweep", "--p", "2", "--t-min", "-20", "--t-max", "20", "--step", "0.5"],
        &["taylor", "--p", "3", "--t-max", "5", "--step", "0.5"],
        &["mellin", "--p", "1.5", "--sigma", "-0.7", "--v-max", "20", "--step", "0.25"],
        &["hermite", "--p", "2", "--n", "1", "--w-min", "-1", "--w-max", "3", "--w-step", "2"],
        &["clt", "--p", "1.4142135623730951", "--t-max", "500,1000", "--step", "0.05"],
        &["bounds", "--n-star", "3", "--t-max", "30", "--step", "0.5"],
        &["independence", "--p", "1.5849625007211563", "--b-max", "10"],
        &["envelope", "--p", "2", "--u-lo", "-2", "--u-hi", "5", "--samples", "300"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let f = dir.path().join(format!("t{i}.csv"));
        let out = bin().args(*args).args(["--out", f.to_str().unwrap()]).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = run(&["--verify", f.to_str().unwrap()]);
        assert!(v.status.success(), "{args:?}: {}", String::from_utf8_lossy(&v.stderr));
    }
}

#[test]
fn verify_detects_tampering() {
    let dir = tempdir().unwrap();
    let f = dir.path().join("s.csv");
    assert!(run(&["sweep", "--p", "2", "--t-max", "10", "--step", "1", "--out", f.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&f).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut fields: Vec<String> = lines[2].split(',').map(str::to_string).collect();
    fields[1] = "7.0000000000000000e0".into();
    lines[2] = fields.join(",");
    std::fs::write(&f, lines.join("\n") + "\n").unwrap();
    let v = run(&["--verify", f.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(4));
    assert_eq!(error_json(&v)["error"]["kind"], "invariant");

    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "a,b\n1,2\n").unwrap();
    assert_eq!(run(&["--verify", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["eval", "--p", "2", "--t", "1", "--bogus", "3"][..],
        &["eval", "--p", "0.5", "--t", "1"],
        &["eval", "--t", "1"],
        &["sweep", "--p", "2", "--t-max", "10", "--step", "0"],
        &["eval", "--p", "2", "--tau", "2", "--t", "1"],
        &["clt", "--p", "2", "--t-max", "100", "--step", "1"],
        &["hermite", "--p", "2", "--n", "13", "--w-min", "0", "--w-max", "1"],
        &[],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let rec = error_json(&out);
        assert_eq!(rec["error"]["exit_code"], 2);
        assert_eq!(rec["error"]["kind"], "usage");
    }
    assert!(run(&["--help"]).status.success());
}

#[test]
fn budget_exit_3_writes_partial_table() {
    let dir = tempdir().unwrap();
    let f = dir.path().join("t.csv");
    let out = run(&["taylor", "--p", "2", "--t-max", "80", "--step", "10", "--out", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"]["kind"], "budget");
    let text = std::fs::read_to_string(&f).unwrap();
    assert!(text.lines().next().unwrap().contains("partial=true"));
    assert!(text.lines().count() >= 3);
}

#[test]
fn json_mirrors_csv() {
    let dir = tempdir().unwrap();
    let c = dir.path().join("x.csv");
    let j = dir.path().join("x.json");
    let args = ["sweep", "--p", "2", "--t-max", "3", "--step", "1"];
    assert!(bin().args(args).args(["--out", c.to_str().unwrap()]).status().unwrap().success());
    assert!(bin().args(args).args(["--out", j.to_str().unwrap()]).status().unwrap().success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    let text = body(&c);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(header, cols);
    for (line, row) in text.lines().skip(1).zip(v["rows"].as_array().unwrap()) {
        for (s, x) in line.split(',').zip(row.as_array().unwrap()) {
            assert_eq!(s.parse::<f64>().unwrap(), x.as_f64().unwrap());
        }
    }
    assert_eq!(v["meta"]["command"][0], "sweep");
    assert_eq!(v["meta"]["partial"], false);
}

#[test]
fn plotscript_is_self_contained() {
    let dir = tempdir().unwrap();
    let f = dir.path().join("fig.gp");
    assert!(run(&["bounds", "--t-max", "12", "--out", f.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("# sineseries bounds"));
    assert!(text.contains("$data << EOD\n") && text.contains("\nEOD\n"));
    assert!(text.contains("set datafile separator \",\""));
    assert!(text.contains("plot $data using 1:2 with lines title \"s2\""));
    let forced = dir.path().join("fig.txt");
    assert!(run(&["eval", "--p", "2", "--t", "1", "--format", "plotscript", "--out", forced.to_str().unwrap()]).status.success());
    assert!(std::fs::read_to_string(&forced).unwrap().contains("EOD"));
}

#[test]
fn summaries_carry_statistics() {
    let out = run(&["clt", "--p", "1.4142135623730951", "--signal", "power", "--n-terms", "20", "--t-max", "2000", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ks = v["summary"]["ks_distance"].as_f64().unwrap();
    assert!((0.0..0.2).contains(&ks));
    let s: f64 = v["rows"].as_array().unwrap().iter().map(|r| r[2].as_f64().unwrap()).sum();
    assert!((s + v["summary"]["below"].as_f64().unwrap() + v["summary"]["above"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = run(&["independence", "--p", "1.5849625007211563", "--b-max", "10"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("3*omega_2 - omega_1 = 0"));
    let out = run(&["envelope", "--p", "2", "--u-lo", "8", "--u-hi", "20", "--samples", "1600", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let e = v["summary"]["exponent"].as_f64().unwrap();
    assert!((0.1..0.3).contains(&e), "{e}");
}
