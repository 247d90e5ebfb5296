use std::process::Command;

use adm::sweep::{parse_csv, run_sweep, to_csv, Axis, MonteCarloPoint, SweepResult, SweepRow, SweepSpec};
use adm::SystemConfig;
use proptest::prelude::*;

fn adm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adm"))
}

#[test]
fn sweeps_follow_expected_trends() {
    let base = SystemConfig::default();
    let nr = run_sweep(&SweepSpec::new(base, Axis::Receptors, vec![200.0, 400.0, 600.0, 800.0, 1000.0])).unwrap();
    assert!(nr.mean_beps().windows(2).all(|w| w[1] <= w[0]));
    let g = run_sweep(&SweepSpec::new(base, Axis::Similarity, vec![2.0, 3.0, 5.0, 8.0])).unwrap();
    assert!(g.mean_beps().windows(2).all(|w| w[1] <= w[0]));
    let nc = run_sweep(&SweepSpec::new(base, Axis::Channels, vec![2.0, 3.0, 4.0, 5.0, 6.0])).unwrap();
    assert!(nc.mean_beps().windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(nc.rows[0].bep.len(), 2);
    assert_eq!(nc.rows[4].bep.len(), 6);
}

#[test]
fn sweep_with_montecarlo_is_reproducible() {
    let base = SystemConfig {
        receptors: 200,
        channels: 3,
        ..Default::default()
    };
    let spec = SweepSpec::new(base, Axis::Similarity, vec![2.0, 5.0]).with_montecarlo(2000, 9);
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    assert_eq!(to_csv(&a, 3), to_csv(&b, 3));
    assert!(a.rows.iter().all(|r| r.montecarlo.is_some()));
}

proptest! {
    #[test]
    fn csv_round_trip(rows in proptest::collection::vec(
        (1.0f64..1e4, proptest::collection::vec(1e-300f64..0.5, 1..6), proptest::option::of((0.0f64..0.5, 0.0f64..0.01))),
        0..6,
    )) {
        let result = SweepResult {
            axis: Axis::Ratio,
            rows: rows.into_iter().map(|(value, bep, mc)| {
                let mean_bep = bep.iter().sum::<f64>() / bep.len() as f64;
                SweepRow {
                    value,
                    bep,
                    mean_bep,
                    montecarlo: mc.map(|(mean_bep, half_width)| MonteCarloPoint { mean_bep, half_width }),
                }
            }).collect(),
        };
        let back = parse_csv(&to_csv(&result, 3)).unwrap();
        prop_assert_eq!(back.rows.len(), result.rows.len());
        let close = |a: f64, b: f64| a == b || ((a - b) / b).abs() <= 1e-9;
        for (x, y) in back.rows.iter().zip(&result.rows) {
            prop_assert!(close(x.value, y.value));
            prop_assert!(close(x.mean_bep, y.mean_bep));
            prop_assert_eq!(x.bep.len(), y.bep.len());
            for (a, b) in x.bep.iter().zip(&y.bep) {
                prop_assert!(close(*a, *b));
            }
            prop_assert_eq!(x.montecarlo.is_some(), y.montecarlo.is_some());
            if let (Some(a), Some(b)) = (x.montecarlo, y.montecarlo) {
                prop_assert!(close(a.mean_bep, b.mean_bep) && close(a.half_width, b.half_width));
            }
        }
    }
}

#[test]
fn cli_analyze_emits_json() {
    let out = adm().args(["analyze", "--channels", "3", "--receptors", "500"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["channels"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["receptors"], 500);
    let mean = v["mean_bep"].as_f64().unwrap();
    assert!(mean > 0.0 && mean < 0.5);
}

#[test]
fn cli_config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("system.toml");
    std::fs::write(&cfg, "receptors = 300\nchannels = 4\ngamma = 3.0\n").unwrap();
    let out = adm()
        .args(["analyze", "--config", cfg.to_str().unwrap(), "--channels", "2", "--variance-mode", "full"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["receptors"], 300);
    assert_eq!(v["config"]["channels"], 2);
    assert_eq!(v["config"]["gamma"], 3.0);
    assert_eq!(v["config"]["variance_mode"], "full");
}

#[test]
fn cli_sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nr.csv");
    let svg = dir.path().join("nr.svg");
    let status = adm()
        .args(["sweep", "--axis", "receptors", "--values", "200,400,600"])
        .arg("--out-csv")
        .arg(&csv)
        .arg("--out-plot")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("receptors,bep_ch1,bep_ch2,bep_ch3,bep_ch4,bep_ch5,bep_mean\n"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn cli_exit_codes() {
    let bad = adm().args(["analyze", "--gamma", "0.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let few = adm().args(["analyze", "--receptors", "2"]).output().unwrap();
    assert_eq!(few.status.code(), Some(2));
    let unsorted = adm()
        .args(["sweep", "--axis", "similarity", "--values", "5,2", "--out-csv", "/dev/null"])
        .output()
        .unwrap();
    assert_eq!(unsorted.status.code(), Some(2));
    // gamma -> 1 drives S singular.
    let ill = adm()
        .args(["analyze", "--channels", "12", "--gamma", "1.0001"])
        .output()
        .unwrap();
    assert_eq!(ill.status.code(), Some(3), "{}", String::from_utf8_lossy(&ill.stderr));
    let unwritable = adm()
        .args(["sweep", "--axis", "receptors", "--values", "200,400", "--out-csv", "/nonexistent/dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(1));
}
