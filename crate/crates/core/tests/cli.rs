use std::process::{Command, Output};

use repeater_rate::harness::{read_csv, ResultRow, CSV_HEADER};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repeater-rate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_emits_header_and_thirty_rows() {
    let out = cli(&["run", "fig2c", "--rounds", "1000"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 31);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1..].iter().all(|l| l.starts_with("MM,")));
}

#[test]
fn reruns_are_byte_identical_and_seed_sensitive() {
    let a = cli(&["run", "fig5b", "--rounds", "500", "--seed", "42"]);
    let b = cli(&["run", "fig5b", "--rounds", "500", "--seed", "42"]);
    let c = cli(&["run", "fig5b", "--rounds", "500", "--seed", "43"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_file_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("rows.json");
    let csv_path = dir.path().join("rows.csv");
    for (fmt, path) in [("json", &json_path), ("csv", &csv_path)] {
        let out = cli(&[
            "run",
            "fig5a",
            "--rounds",
            "300",
            "--format",
            fmt,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let from_json: Vec<ResultRow> =
        serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    let from_csv = read_csv(std::fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(from_json.len(), 30);
    assert_eq!(from_json, from_csv);
}

#[test]
fn config_file_with_infeasible_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    std::fs::write(
        &path,
        r#"{"preset": "fig5b", "L_km": [50, 190], "p_m": [1.0], "rounds": 200}"#,
    )
    .unwrap();
    let out = cli(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].feasible);
    assert!(!rows[1].feasible);
    assert_eq!(rows[1].mc_rate, None);
    let last = stdout(&out).lines().last().unwrap().to_string();
    assert!(last.contains(",,,"), "{last}");
}

#[test]
fn analytic_matches_closed_form() {
    let out = cli(&["analytic", "fig2c", "--set", "L_km=10", "--set", "p_m=1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].analytic_rate - 2466.2099600419238).abs() < 1e-9);
    assert_eq!(rows[0].trials, 3);
    assert_eq!(rows[0].mc_rate, None);
}

#[test]
fn config_errors_exit_one() {
    for args in [
        vec!["run", "fig9"],
        vec!["run", "custom"],
        vec!["run", "fig2c", "--set", "bogus=1"],
        vec!["run", "fig2c", "--set", "p_m=2"],
        vec!["run", "fig2c", "--set", "scheme=XX"],
        vec!["run", "fig2c", "--rounds", "0"],
        vec!["run", "fig2c", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        let out = cli(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_two() {
    let out = cli(&["analytic", "fig2c", "--out", "/nonexistent-dir/rows.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn swap_reports_budgets_and_chain_factor() {
    let out = cli(&["swap", "--pairs", "1000", "--links", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let chain = v["chain_factor"].as_f64().unwrap();
    assert!((chain - 0.0012783960243203797).abs() < 1e-15);
    let perfect = v["perfect"]["expected_successes"].as_f64().unwrap();
    let imperfect = v["imperfect"]["expected_successes"].as_f64().unwrap();
    assert!((imperfect / perfect - 0.477).abs() < 1e-12);
}

#[test]
fn list_presets_names_everything() {
    let out = cli(&["list-presets"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in repeater_rate::harness::presets::PRESET_NAMES {
        assert!(text.contains(name), "{name}");
    }
}
