use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dotbus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dotbus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn pst_check_passes_over_default_range() {
    let text = stdout(&dotbus(&["pst-check", "--n", "2..32"]));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["n", "t_predicted", "fidelity"]);
    assert_eq!(rows.len(), 31);
    for r in &rows {
        assert!(r[2] >= 1.0 - 1e-8, "N = {}: {}", r[0], r[2]);
    }
    assert!((rows[0][1] - PI / 2.0).abs() < 1e-12);
    assert!((rows[14][1] - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn pst_check_single_lengths() {
    let (_, rows) = csv_rows(&stdout(&dotbus(&["pst-check", "--n", "16", "--gamma-max", "2"])));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn validation_failures_exit_2() {
    assert_eq!(dotbus(&["pst-check", "--n", "1"]).status.code(), Some(2));
    assert_eq!(dotbus(&["pst-check", "--gamma-max", "-1"]).status.code(), Some(2));
    assert_eq!(dotbus(&["separation", "--points", "1"]).status.code(), Some(2));
    assert_eq!(dotbus(&["protocol", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(dotbus(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn config_file_overrides_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "m_eff = 0.067\ncolour = blue\n").unwrap();
    let out = dotbus(&["energy-compare", "--n-max", "2", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let good = dir.path().join("good.cfg");
    std::fs::write(&good, "hbar_omega0_mev = 6.0\n").unwrap();
    let base = stdout(&dotbus(&["energy-compare", "--n-max", "1"]));
    let alt = stdout(&dotbus(&["energy-compare", "--n-max", "1", "--config", good.to_str().unwrap()]));
    let (_, b) = csv_rows(&base);
    let (_, a) = csv_rows(&alt);
    assert!(a[0][4] > b[0][4]);
}

fn separation_summary(u: &str, v: &str, eps2: &str) -> (Value, usize) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    stdout(&dotbus(&[
        "separation", "--u", u, "--v", v, "--eps2", eps2, "--out", out.to_str().unwrap(),
    ]));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["t_in_inverse_gamma", "fidelity"]);
    (read_json(&dir.path().join("trace.summary.json")), rows.len())
}

#[test]
fn separation_reproduces_operating_points() {
    let (s, n) = separation_summary("20", "10", "10");
    assert_eq!(n, 2001);
    assert!((num(&s, "f_max") - 0.993).abs() <= 0.002, "{s}");
    assert!((num(&s, "m") - 20.0).abs() < 1e-12);
    let (s, _) = separation_summary("20", "0", "20");
    assert!((num(&s, "f_max") - 0.998).abs() <= 0.001, "{s}");
    assert!((num(&s, "m") - 40.0).abs() < 1e-12);
}

#[test]
fn separation_bound_state() {
    let (s, _) = separation_summary("20", "10", "0");
    assert!(num(&s, "f_max") < 0.1, "{s}");
}

#[test]
fn separation_json_document() {
    let v: Value = serde_json::from_str(&stdout(&dotbus(&["separation", "--points", "11", "--format", "json"]))).unwrap();
    assert_eq!(v["trace"].as_array().unwrap().len(), 11);
    assert!(v["summary"]["t_opt"].is_number());
}

#[test]
fn freeze_curve_markers() {
    let (header, rows) = csv_rows(&stdout(&dotbus(&["freeze-curve"])));
    assert_eq!(header, ["delta_e_over_ec", "delta_e_mev", "ratio"]);
    let at = |x: f64| rows.iter().find(|r| (r[0] - x).abs() < 1e-12).unwrap()[2];
    assert_eq!(at(0.0), 1.0);
    assert!((at(0.83) - 0.01).abs() <= 0.002);
    assert!((at(1.0) - 0.004).abs() <= 0.001);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0] && w[1][2] < w[0][2]));
}

#[test]
fn freeze_curve_single_electron() {
    let (_, rows) = csv_rows(&stdout(&dotbus(&["freeze-curve", "--electrons", "1", "--max-delta-e", "1", "--points", "3"])));
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 3.0).abs() < 1e-9);
    assert!((last[2] - 0.22).abs() <= 0.022);
}

#[test]
fn energy_compare_table_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cost.csv");
    stdout(&dotbus(&["energy-compare", "--n-max", "40", "--out", out.to_str().unwrap()]));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(
        header,
        ["n", "pst_1e_mev", "pst_2e_mev", "shuttle_1e_mev", "shuttle_2e_mev", "classical_mev"]
    );
    assert_eq!(rows.len(), 40);
    let r10 = &rows[9];
    assert_eq!(r10[0], 10.0);
    assert!((r10[4] / 200.0 - 1.0).abs() < 0.05);
    assert!((r10[5] / 37.0 - 1.0).abs() < 0.03);
    assert!((r10[2] - 108.0).abs() < 1e-9);
    assert!((r10[1] - 54.0).abs() < 1e-9);
    for r in &rows {
        assert_eq!(r[1], rows[0][1]);
        assert_eq!(r[2], rows[0][2]);
        assert!((r[4] - rows[0][4] * r[0]).abs() < 1e-9 * r[4]);
        assert!((r[5] - rows[0][5] * r[0]).abs() < 1e-9 * r[5]);
    }
    let meta = read_json(&dir.path().join("cost.meta.json"));
    assert!((num(&meta, "literal_pst_2e_mev") / 68.8 - 1.0).abs() < 0.05);
    assert!(meta["note"].as_str().unwrap().contains("108"));
}

#[test]
fn energy_compare_literal_model() {
    let v: Value = serde_json::from_str(&stdout(&dotbus(&[
        "energy-compare", "--n-max", "3", "--pst-model", "literal", "--format", "json",
    ])))
    .unwrap();
    let row = &v["rows"][0];
    assert!((num(row, "pst_2e_mev") / 68.8 - 1.0).abs() < 0.05);
    assert!((num(row, "pst_1e_mev") * 2.0 - num(row, "pst_2e_mev")).abs() < 1e-9);
    assert_eq!(v["metadata"]["pst_model"], "literal");
}

#[test]
fn protocol_sixteen_dots() {
    let v: Value = serde_json::from_str(&stdout(&dotbus(&["protocol", "--n", "16"]))).unwrap();
    assert!((num(&v, "total_fidelity") - 0.986).abs() < 0.004, "{v}");
    assert!((num(&v, "energy_mev") - 108.0).abs() < 1e-9);
    assert!((num(&v, "total_time_ps") / 48.0 - 1.0).abs() < 0.1);
    assert_eq!(v["feasible_within_t2"], true);
    assert_eq!(v["stage_fidelities"].as_array().unwrap().len(), 4);
}

#[test]
fn protocol_segmented() {
    let v: Value =
        serde_json::from_str(&stdout(&dotbus(&["protocol", "--n", "160", "--segments", "16"]))).unwrap();
    assert_eq!(v["segments"], 10);
    let per = num(&v["segment"], "total_fidelity");
    assert!((num(&v, "total_fidelity") - per.powi(10)).abs() < 1e-12);
    assert!((num(&v, "total_fidelity") - 0.993f64.powi(20)).abs() < 0.04);
    assert!((num(&v, "energy_mev") - 1080.0).abs() < 1e-9);
}

#[test]
fn protocol_minimal_and_single_electron() {
    let v: Value = serde_json::from_str(&stdout(&dotbus(&["protocol", "--n", "2"]))).unwrap();
    assert!(num(&v, "total_fidelity") > 0.98);
    let v: Value = serde_json::from_str(&stdout(&dotbus(&["protocol", "--n", "16", "--electrons", "1"]))).unwrap();
    assert!(num(&v, "total_fidelity") >= 1.0 - 1e-8);
    assert!((num(&v, "energy_mev") - 54.0).abs() < 1e-9);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["separation", "--points", "301"][..],
        &["energy-compare", "--n-max", "20", "--format", "json"],
        &["protocol", "--n", "12"],
        &["freeze-curve", "--points", "50"],
    ] {
        let a = dotbus(args);
        let b = dotbus(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
