use std::process::{Command, Output};

use serde_json::Value;

fn dot_teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dot-teleport"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

/// Data rows of a CSV artifact, after the config line and the header.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_default_grid() {
    let text = stdout(&dot_teleport(&["sweep"]));
    let mut lines = text.lines();
    let config: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(config["command"], "sweep");
    assert_eq!(config["points"], 401);
    assert_eq!(lines.next().unwrap(), "u_over_t,w,z,u_plus,u_minus,entropy_bits");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 401);
    let peak = rows.iter().max_by(|a, b| a[5].total_cmp(&b[5])).unwrap();
    assert_eq!(peak[0], 0.0);
    assert!(
        text.contains("\n0.00000000000,0.250000000000,0.250000000000,0.250000000000,0.250000000000,2.00000000000\n")
    );
    for (r, m) in rows.iter().zip(rows.iter().rev()) {
        assert_eq!(r[0], -m[0]);
        assert!((r[5] - m[5]).abs() < 1e-9);
    }
}

#[test]
fn sweep_rejects_empty_range() {
    let o = dot_teleport(&["sweep", "--u-min", "0", "--u-max", "0", "--points", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn degenerate_sweep_point_is_a_numerical_error() {
    let o = dot_teleport(&[
        "sweep",
        "--sites",
        "4",
        "--boundary",
        "periodic",
        "--u-min",
        "-1",
        "--u-max",
        "1",
        "--points",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("U/t = 0"), "{err}");
}

#[test]
fn teleport_charge_pure_ebit() {
    let r = json(&dot_teleport(&[
        "teleport",
        "--channel",
        "charge",
        "--alpha",
        "0.6",
        "--beta",
        "0.8",
        "--ebit",
        "beta0",
        "--trials",
        "4096",
        "--seed",
        "42",
    ]));
    assert_eq!(r["heralded_success_rate"], 1.0);
    assert_eq!(r["trials"], 4096);
    assert_eq!(r["config"]["seed"], 42);
    for o in r["outcomes"].as_array().unwrap() {
        if o["heralded"] == true {
            assert_eq!(o["fidelity"], 1.0);
        } else {
            assert_eq!(o["count"], 0);
        }
    }
    assert!(r.get("ebit_weights").is_none());
}

#[test]
fn teleport_single_spin_trial() {
    let r = json(&dot_teleport(&[
        "teleport",
        "--channel",
        "spin",
        "--alpha",
        "1",
        "--beta",
        "0",
        "--ebit",
        "beta1",
        "--trials",
        "1",
        "--seed",
        "7",
    ]));
    let hit: Vec<&str> = r["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|o| o["count"] == 1)
        .map(|o| o["label"].as_str().unwrap())
        .collect();
    assert_eq!(hit.len(), 1);
    assert!(["1010", "1001", "0101", "0110"].contains(&hit[0]));
}

#[test]
fn teleport_filters_on_the_ground_state() {
    let s = format!("{}", 0.5f64.sqrt());
    let r = json(&dot_teleport(&[
        "teleport",
        "--channel",
        "charge",
        "--alpha",
        &s,
        "--beta",
        &s,
        "--ebit",
        "ground:4",
        "--trials",
        "10000",
        "--seed",
        "1",
    ]));
    let rate = r["heralded_success_rate"].as_f64().unwrap();
    let p = 0.146_446_609_406_726_24;
    assert!((rate - p).abs() < 5.0 * (p * (1.0 - p) / 10000.0f64).sqrt(), "{rate}");
    let a = r["ebit_weights"]["a_mag"].as_f64().unwrap();
    assert!((a * a - p).abs() < 1e-11);
    assert_eq!(r["ebit"], "ground:4");
}

#[test]
fn teleport_qubit_validation() {
    let o = dot_teleport(&["teleport", "--alpha", "0.6", "--beta", "0.80000001"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("warning:"));

    let o = dot_teleport(&["teleport", "--alpha", "0.6", "--beta", "0.9"]);
    assert_eq!(o.status.code(), Some(1));

    let o = dot_teleport(&["teleport", "--alpha", "zero", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(1));

    let r = json(&dot_teleport(&[
        "teleport", "--alpha", "0.6", "--beta", "0.8j", "--trials", "16",
    ]));
    assert_eq!(r["config"]["beta"], "0.8j");
}

#[test]
fn teleport_accepts_mismatched_ebit() {
    let r = json(&dot_teleport(&[
        "teleport",
        "--channel",
        "spin",
        "--ebit",
        "beta0",
        "--trials",
        "64",
    ]));
    assert_eq!(r["heralded_success_rate"], 0.0);
}

#[test]
fn teleport_rejects_unknown_values() {
    for args in [
        ["teleport", "--channel", "photon"],
        ["teleport", "--gate-form", "pulse"],
        ["teleport", "--ebit", "ground:x"],
        ["teleport", "--format", "csv"],
    ] {
        let o = dot_teleport(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert_eq!(String::from_utf8(o.stderr).unwrap().lines().count(), 1);
    }
}

#[test]
fn weights_table() {
    let text = stdout(&dot_teleport(&[
        "weights", "--u-min", "0", "--u-max", "1000", "--points", "11",
    ]));
    assert_eq!(text.lines().nth(1).unwrap(), "u_over_t,a_mag,b_mag");
    let rows = csv_rows(&text);
    assert_eq!(
        text.lines().nth(2).unwrap(),
        "0.00000000000,0.707106781187,0.707106781187"
    );
    assert!(rows.last().unwrap()[2] > 0.999);
    for r in &rows {
        assert!((r[1] * r[1] + r[2] * r[2] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn weights_as_json() {
    let r = json(&dot_teleport(&["weights", "--points", "3", "--format", "json"]));
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["u_over_t"], 0.0);
    assert_eq!(r["config"]["format"], "json");
}

#[test]
fn correlate_two_sites_at_u_zero() {
    let r = json(&dot_teleport(&["correlate", "--sites", "2", "--u", "0", "--site", "1"]));
    let branches = r["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 4);
    for b in branches {
        assert!((b["probability"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn correlate_four_sites() {
    let r = json(&dot_teleport(&["correlate", "--sites", "4", "--u", "4", "--site", "3"]));
    assert!(r["branches"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["point_mass"] == true));
    assert_eq!(r["total_electrons"], 4);
}

#[test]
fn correlate_validation() {
    assert_eq!(
        dot_teleport(&["correlate", "--sites", "3", "--u", "4", "--site", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        dot_teleport(&["correlate", "--sites", "4", "--site", "4"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let p = path.to_str().unwrap();
    let o = dot_teleport(&["weights", "--points", "5", "--out", p]);
    assert!(o.status.success() && o.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    let piped = stdout(&dot_teleport(&["weights", "--points", "5"]));
    // Only the echoed output path differs.
    assert_eq!(
        file.lines().skip(1).collect::<Vec<_>>(),
        piped.lines().skip(1).collect::<Vec<_>>()
    );
    assert!(file.lines().next().unwrap().contains("w.csv"));
}

#[test]
fn unwritable_output_is_reported() {
    let o = dot_teleport(&["weights", "--points", "2", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("cannot write"));
}

#[test]
fn help_exits_cleanly() {
    assert!(dot_teleport(&["--help"]).status.success());
    assert_eq!(dot_teleport(&["frobnicate"]).status.code(), Some(1));
}
