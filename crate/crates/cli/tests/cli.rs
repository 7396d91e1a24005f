use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinbeam"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .env_remove("TWINBEAM_SEED")
        .output()
        .expect("spawn twinbeam")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = run(
            &[
                "simulate-nrf",
                "--trials",
                "500",
                "--grid",
                "0:1:3",
                "--seed",
                "11",
                "--out",
                name,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
}

#[test]
fn env_seed_fallback_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate-nrf", "--trials", "300", "--grid", "0.5:0.5:1"];
    let flag = run(&[&args[..], &["--seed", "21", "--out", "flag.csv"]].concat(), dir.path());
    assert!(flag.status.success());
    let env = bin()
        .args([&args[..], &["--out", "env.csv"]].concat())
        .current_dir(dir.path())
        .env("TWINBEAM_SEED", "21")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(read(dir.path(), "flag.csv"), read(dir.path(), "env.csv"));
}

#[test]
fn empty_grid_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["nrf-sweep", "--grid", "0:1:0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn single_trial_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate-nrf", "--trials", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"optimize_eta": {"eta1": 1.5}}"#,
    )
    .unwrap();
    let out = run(&["optimize-eta", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta1"));
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"optimize_eta": {"etaa1": 0.7}}"#,
    )
    .unwrap();
    let out = run(&["optimize-eta", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nrf_sweep_schema_with_and_without_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["nrf-sweep", "--grid", "0:1:3", "--out", "plain.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(dir.path(), "plain.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eta2,model,sigma_p,sigma_sp,sigma_rho,sigma_d,sigma_total"
    );
    // 4 default models x 3 grid points
    assert_eq!(lines.count(), 12);

    let out = run(
        &[
            "nrf-sweep",
            "--grid",
            "0:1:3",
            "--trials",
            "200",
            "--seed",
            "5",
            "--out",
            "mc.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(dir.path(), "mc.csv");
    assert!(text.starts_with(
        "eta2,model,sigma_p,sigma_sp,sigma_rho,sigma_d,sigma_total,mc_sigma,mc_stderr"
    ));
}

#[test]
fn optimize_eta_closed_and_numeric_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"optimize_eta": {"eta1": 0.75, "fano": 4.0, "rho": 0.45}}"#,
    )
    .unwrap();
    let out = run(
        &["optimize-eta", "--config", "cfg.json", "--out", "opt.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "opt.csv");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let diff: f64 = row[5].parse().unwrap();
    assert!(diff <= 1e-4, "closed vs numeric diff {diff}");
    assert_eq!(row[6], "interior");
}

#[test]
fn scenario_sweep_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "scenario-sweep",
            "--grid",
            "log:0.01:100:5",
            "--out",
            "sc.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "sc.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_value,p,sigma_p,sigma_sp,sigma_rho,sigma_d,sigma_total"
    );
    // 3 default offsets x 5 pump points
    assert_eq!(lines.count(), 15);
}

#[test]
fn simulate_nrf_tracks_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "simulate-nrf",
            "--trials",
            "20000",
            "--grid",
            "0:1:5",
            "--seed",
            "3",
            "--out",
            "sim.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    for line in read(dir.path(), "sim.csv").lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (mc, se, analytic) = (row[1], row[2], row[3]);
        assert!(
            (mc - analytic).abs() <= 4.0 * se,
            "mc {mc} vs analytic {analytic} (se {se})"
        );
    }
}

#[test]
fn estimator_bench_rows_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"estimator_bench": {"alpha_values": [0.3], "sigma_star_values": [0.2, 0.5],
            "calibration_trials": 2000, "measurement_trials": 2000}}"#,
    )
    .unwrap();
    let out = run(
        &[
            "estimator-bench",
            "--config",
            "cfg.json",
            "--seed",
            "8",
            "--out",
            "est.csv",
            "--plot",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "est.csv");
    assert!(text.starts_with(
        "estimator,alpha,sigma_star,epsilon,mean,bias,variance,mse,gamma_empirical,gamma_analytic"
    ));
    // 2 grid points x 4 estimators
    assert_eq!(text.lines().count(), 9);
    assert!(dir.path().join("est.svg").exists());
}
