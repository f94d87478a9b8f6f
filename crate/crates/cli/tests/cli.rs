use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use noisemoments::inference::{autocor_estimate, autocov_estimate};
use noisemoments::simulator::simulate_path;
use noisemoments::{NoiseEstimator, NoiseRegime, SimulationConfig, TuningWindows};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisemoments"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["estimate", "--bogus"]), 1);
    assert_eq!(code(&["estimate", "-i", "x.csv", "-o", "y", "--kpn", "3"]), 1);
    assert_eq!(code(&["estimate", "-i", "x.csv", "-o", "y", "--kn", "8", "--eta", "0.3"]), 1);
    assert_eq!(code(&["estimate", "-i", "x.csv", "-o", "y", "--lags", "5-2"]), 1);
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["simulate", "-n", "100", "--phi", "1.5", "-o", s(&p(&dir, "x"))]), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "out");
    assert_eq!(code(&["estimate", "-i", s(&p(&dir, "missing.csv")), "-o", s(&out)]), 2);

    let bad = p(&dir, "bad.csv");
    fs::write(&bad, "time,price\n0,100\n0.1,abc\n").unwrap();
    let o = run(&["estimate", "-i", s(&bad), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let empty = p(&dir, "empty.csv");
    fs::write(&empty, "time,price\n").unwrap();
    assert_eq!(code(&["estimate", "-i", s(&empty), "-o", s(&out)]), 2);

    let irregular = p(&dir, "irr.csv");
    fs::write(&irregular, "time,price\n0,100\n0.3,101\n0.4,100\n0.9,101\n").unwrap();
    assert_eq!(code(&["estimate", "-i", s(&irregular), "--regime", "no2", "-o", s(&out)]), 2);
}

#[test]
fn constant_input_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let input = p(&dir, "flat.csv");
    let rows: String = (0..200).map(|i| format!("{},100\n", i as f64 / 200.0)).collect();
    fs::write(&input, format!("time,price\n{rows}")).unwrap();
    let out = p(&dir, "flat");
    assert_eq!(code(&["estimate", "-i", s(&input), "--lags", "0-3", "--kn", "4", "-o", s(&out)]), 3);
    let report = json(&p(&dir, "flat.json"));
    assert_eq!(report["all_degenerate"], true);
    for row in report["autocov"].as_array().unwrap() {
        assert!(row["z"].is_null());
        assert!(!row["flags"].as_array().unwrap().is_empty());
    }
}

#[test]
fn empty_lag_list_gives_header_only_tables() {
    let dir = TempDir::new().unwrap();
    let prefix = p(&dir, "sim");
    assert_eq!(code(&["simulate", "-n", "2000", "--rescale", "-o", s(&prefix)]), 0);
    let out = p(&dir, "est");
    assert_eq!(code(&["estimate", "-i", s(&p(&dir, "sim.csv")), "--lags", "", "-o", s(&out)]), 0);
    let header = "j,estimate,variance,z,p_two,p_one,ci_lo,ci_hi,flags\n";
    assert_eq!(fs::read_to_string(p(&dir, "est_cov.csv")).unwrap(), header);
    assert_eq!(fs::read_to_string(p(&dir, "est_cor.csv")).unwrap(), header);
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for name in ["a", "b"] {
        let prefix = p(&dir, name);
        assert_eq!(code(&["simulate", "-n", "5000", "--seed", "11", "--regime", "no2", "-o", s(&prefix)]), 0);
        let est = p(&dir, &format!("{name}_est"));
        assert_eq!(code(&["estimate", "-i", s(&p(&dir, &format!("{name}.csv"))), "--lags", "0-5", "-o", s(&est)]), 0);
        let mc = p(&dir, &format!("{name}_mc"));
        assert_eq!(code(&["mc", "-n", "3000", "--rescale", "-m", "6", "--seed", "5", "--lags", "0-1", "-o", s(&mc)]), 0);
    }
    for suffix in [".csv", ".json", "_est_cov.csv", "_est_cor.csv", "_mc.json", "_mc_autocor1_qq.csv"] {
        let a = fs::read(p(&dir, &format!("a{suffix}"))).unwrap();
        let b = fs::read(p(&dir, &format!("b{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix}");
    }
    // the estimate report records its input path
    let mut a = json(&p(&dir, "a_est.json"));
    let mut b = json(&p(&dir, "b_est.json"));
    a["config"]["input"] = Value::Null;
    b["config"]["input"] = Value::Null;
    assert_eq!(a, b);
}

fn check_pipeline(regime: &str, cfg: SimulationConfig) {
    let dir = TempDir::new().unwrap();
    let prefix = p(&dir, "sim");
    let n = cfg.n.to_string();
    let seed = cfg.seed.to_string();
    assert_eq!(code(&["simulate", "-n", &n, "--seed", &seed, "--regime", regime, "--rescale", "-o", s(&prefix)]), 0);
    let out = p(&dir, "est");
    let input = p(&dir, "sim.csv");
    let args = ["estimate", "-i", s(&input), "--lags", "0-6", "--kn", "8", "--kpn", "4", "-o", s(&out)];
    assert_eq!(code(&args), 0);
    let report = json(&p(&dir, "est.json"));
    assert_eq!(report["config"]["regime"], cfg.regime.tag());
    assert_eq!(report["config"]["windows"]["source"], "explicit");

    let path = simulate_path(&cfg).unwrap();
    let est = NoiseEstimator::new(&path.series, TuningWindows::new(8, 4).unwrap());
    for lag in 0..=6 {
        let cov = autocov_estimate(&est, lag, cfg.regime, 0.0, 0.95).unwrap();
        let cor = autocor_estimate(&est, lag, cfg.regime, 0.0, 0.95).unwrap();
        let row_cov = &report["autocov"][lag];
        let row_cor = &report["autocor"][lag];
        assert_eq!(row_cov["estimate"].as_f64().unwrap(), cov.point, "lag {lag}");
        assert_eq!(row_cov["variance"].as_f64().unwrap(), cov.variance_est, "lag {lag}");
        assert_eq!(row_cov["z"].as_f64(), cov.z, "lag {lag}");
        assert_eq!(row_cor["estimate"].as_f64().unwrap(), cor.point, "lag {lag}");
        assert_eq!(row_cor["p_two"].as_f64(), cor.p_two_sided, "lag {lag}");
    }
}

#[test]
fn export_then_estimate_matches_in_memory_pipeline() {
    check_pipeline("no1", SimulationConfig::reference_irregular(6_000, 21).rescaled_to(6_000));
    check_pipeline("no2", SimulationConfig::reference_regular(6_000, 22).rescaled_to(6_000));
}

#[test]
fn auto_windows_and_duplicates_are_reported() {
    let dir = TempDir::new().unwrap();
    let prefix = p(&dir, "sim");
    assert_eq!(code(&["simulate", "-n", "8000", "--rescale", "-o", s(&prefix)]), 0);
    let csv = fs::read_to_string(p(&dir, "sim.csv")).unwrap();
    let mut lines: Vec<&str> = csv.lines().collect();
    let dup = lines[10];
    lines.insert(10, dup);
    let input = p(&dir, "dup.csv");
    fs::write(&input, lines.join("\n")).unwrap();
    let out = p(&dir, "est");
    assert_eq!(code(&["estimate", "-i", s(&input), "--lags", "0-2", "-o", s(&out)]), 0);
    let report = json(&p(&dir, "est.json"));
    assert_eq!(report["config"]["duplicates"], 1);
    assert_eq!(report["config"]["regime"], NoiseRegime::Independent.tag());
    let w = &report["config"]["windows"];
    assert_eq!(w["source"], "auto");
    assert!(w["k_n"].as_u64().unwrap() >= 2);
    assert!(w["rule"]["eta"].is_number());
}

#[test]
fn mc_report_carries_the_acceptance_fields() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "mc");
    assert_eq!(code(&["mc", "-n", "4000", "--rescale", "-m", "8", "--lags", "0-2", "--kn", "8", "-o", s(&out)]), 0);
    let report = json(&p(&dir, "mc.json"));
    let reports = report["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    for r in reports {
        let kept = r["sample"].as_array().unwrap().len() as u64;
        assert_eq!(kept + r["excluded"].as_u64().unwrap(), 8);
        assert!(r["coverage"]["0.95"].is_number());
        assert!(r["ks"].is_number());
        assert_eq!(r["qq"].as_array().unwrap().len() as u64, kept);
    }
    let qq = fs::read_to_string(p(&dir, "mc_autocov0_qq.csv")).unwrap();
    assert!(qq.starts_with("theoretical,empirical\n"));
    let cov = fs::read_to_string(p(&dir, "mc_autocor2_coverage.csv")).unwrap();
    assert!(cov.starts_with("level,coverage\n"));
}
