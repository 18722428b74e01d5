use std::process::Command;

use constrained_oco::harness::{read_csv, ExperimentConfig};

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oco-bench"))
}

#[test]
fn smoke_preset_writes_a_standard_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("smoke.csv");
    let status = bench().args(["--preset", "smoke", "--out"]).arg(&path).status().unwrap();
    assert!(status.success());

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "problem");
    assert_eq!(&headers[headers.len() - 1], "lambda_norm");
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let algos = ExperimentConfig::preset("smoke").unwrap().algos.len();
    assert_eq!(rows.len(), 100 * algos);
    for row in &rows {
        let t: f64 = row[4].parse().unwrap();
        let cum: f64 = row[5].parse().unwrap();
        let avg: f64 = row[6].parse().unwrap();
        assert_eq!(cum / t, avg);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let run = || bench().args(["--preset", "smoke", "--seed", "5,6"]).output().unwrap();
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        r#"
horizons = [60]
seeds = [2]

[problem]
kind = "olr"
dim = 3
samples = 4
bound = 5.0

[[algo]]
name = "malm"

[[algo]]
name = "ny"
nu = 3.0
"#,
    )
    .unwrap();
    let out = bench().arg("--config").arg(&cfg_path).args(["--T", "40"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells = read_csv(&out.stdout[..]).unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().all(|(k, s)| k.problem == "olr" && s.horizon() == 40));
}

#[test]
fn tau_sweep_from_the_command_line() {
    let out = bench()
        .args(["--problem", "oqcqp", "--T", "60", "--sweep", "tau=0,5", "--algo", "malm,czp"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells = read_csv(&out.stdout[..]).unwrap();
    let mut taus: Vec<(String, usize)> = cells.keys().map(|k| (k.algo.clone(), k.tau)).collect();
    taus.sort();
    assert_eq!(taus, [("czp".into(), 0), ("czp".into(), 5), ("malm".into(), 0), ("malm".into(), 5)]);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["--preset", "smoke", "--sweep", "tau="],
        vec!["--preset", "nope"],
        vec!["--problem", "knapsack"],
        vec!["--preset", "smoke", "--tau", "100"],
        vec!["--preset", "smoke", "--algo", "mosp", "--tau", "2"],
        vec!["--bogus-flag"],
        vec![],
    ] {
        let out = bench().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn numeric_failure_exits_with_three_and_names_the_round() {
    let out = bench().args(["--preset", "smoke", "--algo", "malm", "--tol-inner", "1e-300"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("round 0"), "{err}");
    assert!(err.contains("malm"), "{err}");
}
