use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hdmean::datagen::{build_scenario, generate, MeanConfig};
use hdmean::power::{evaluate_request, PowerRequest};
use hdmean::{GroupedSample, InnovationLaw, ScenarioKind};
use serde_json::Value;

fn hdmean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdmean"))
        .args(args)
        .env_remove("HDMEAN_THREADS")
        .output()
        .expect("binary starts")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn sample_csv(s: &GroupedSample) -> String {
    let mut text = String::from("group");
    for q in 0..s.dim() {
        text.push_str(&format!(",x{}", q + 1));
    }
    text.push('\n');
    for (i, g) in s.groups().iter().enumerate() {
        for row in g.rows() {
            text.push_str(&(i + 1).to_string());
            for v in row {
                text.push_str(&format!(",{v:e}"));
            }
            text.push('\n');
        }
    }
    text
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&hdmean(&["--help"])), 0);
    assert_eq!(code(&hdmean(&["--version"])), 0);
}

#[test]
fn unknown_subcommand_is_a_parse_error() {
    assert_eq!(code(&hdmean(&["frobnicate"])), 1);
    assert_eq!(code(&hdmean(&["test"])), 1);
}

#[test]
fn test_reports_documented_keys() {
    let dir = tempfile::tempdir().unwrap();
    let sc = build_scenario(ScenarioKind::Scenario2, 50).unwrap();
    let means = MeanConfig::null(vec![30, 30, 30], 50).unwrap();
    let data = generate(&sc, &means, InnovationLaw::StdNormal, 17).unwrap();
    let path = write(dir.path(), "null.csv", &sample_csv(&data));
    let out = hdmean(&["test", "--data", s(&path), "--weights", "identity"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "degenerate",
            "k",
            "level",
            "n_i",
            "p",
            "p_value",
            "reject",
            "sigma_hat",
            "t_n",
            "z_score"
        ]
    );
    assert_eq!(v["k"], 3);
    assert_eq!(v["p"], 50);
    assert_eq!(v["n_i"], serde_json::json!([30, 30, 30]));
    let p_value = v["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p_value));
}

#[test]
fn null_identical_groups_rarely_reject() {
    let dir = tempfile::tempdir().unwrap();
    let sc = build_scenario(ScenarioKind::Scenario2, 50).unwrap();
    let means = MeanConfig::null(vec![20, 20, 20], 50).unwrap();
    let mut rejections = 0;
    for seed in 0..20 {
        let data = generate(&sc, &means, InnovationLaw::StdNormal, seed).unwrap();
        let path = write(dir.path(), "null.csv", &sample_csv(&data));
        let out = hdmean(&["test", "--data", s(&path)]);
        assert_eq!(code(&out), 0);
        rejections += json(&out)["reject"].as_bool().unwrap() as usize;
    }
    assert!(rejections <= 5, "{rejections} of 20 rejected");
}

#[test]
fn strong_shift_fixture_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let p = 200;
    let sc = build_scenario(ScenarioKind::Scenario1, p).unwrap();
    let means = MeanConfig::null(vec![48, 60, 72], p).unwrap();
    let data = generate(&sc, &means, InnovationLaw::StdNormal, 23).unwrap();
    let mut groups = data.into_groups();
    groups[0].slice_mut(ndarray::s![.., ..40]).mapv_inplace(|v| v + 5.0);
    let data = GroupedSample::new(groups).unwrap();
    let path = write(dir.path(), "shift.csv", &sample_csv(&data));
    let out = hdmean(&["test", "--data", s(&path), "--level", "0.01"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["reject"], true);
    assert_eq!(v["level"], 0.01);
}

#[test]
fn test_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one_group = write(dir.path(), "k1.csv", "1,1,2\n1,2,3\n1,3,1\n1,4,4\n");
    assert_eq!(code(&hdmean(&["test", "--data", s(&one_group)])), 2);

    let malformed = write(dir.path(), "bad.csv", "1,1,2\n1,x,3\n");
    assert_eq!(code(&hdmean(&["test", "--data", s(&malformed)])), 1);

    let missing = dir.path().join("absent.csv");
    assert_eq!(code(&hdmean(&["test", "--data", s(&missing)])), 1);

    let constant = write(
        dir.path(),
        "flat.csv",
        "1,1,1\n1,1,1\n1,1,1\n1,1,1\n2,2,2\n2,2,2\n2,2,2\n2,2,2\n",
    );
    let out = hdmean(&["test", "--data", s(&constant)]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["reject"], false);

    let good = write(
        dir.path(),
        "ok.csv",
        "1,1,2\n1,2,3\n1,3,1\n1,4,4\n2,0,1\n2,1,0\n2,2,2\n2,5,1\n",
    );
    let weights = write(dir.path(), "w.csv", "omega_sq,alpha\n1.0,0.1\n2.0,0.1\n3.0,0.1\n");
    assert_eq!(
        code(&hdmean(&["test", "--data", s(&good), "--weights", s(&weights)])),
        2
    );
    let weights = write(dir.path(), "w2.csv", "omega_sq,alpha\n1.0,0.1\n2.0,0.1\n");
    assert_eq!(
        code(&hdmean(&["test", "--data", s(&good), "--weights", s(&weights)])),
        0
    );
    assert_eq!(code(&hdmean(&["test", "--data", s(&good), "--level", "1.5"])), 2);
}

const SINGLE_CELL: &str = r#"{
  "dims": [40],
  "n_stars": [20],
  "laws": ["std_t4"],
  "scenarios": ["scenario2"],
  "rhos": [0.2],
  "rs": [0.1],
  "replications": 30,
  "master_seed": 99
}"#;

#[test]
fn simulate_single_cell_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SINGLE_CELL);
    let csv = dir.path().join("out.csv");
    let out = hdmean(&["simulate", "--config", s(&cfg), "--out", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("p,n_star,law,scenario,rho,r,test,rejection_rate"));
    assert!(lines[1].starts_with("40,20,std_t4,scenario2,0.2,0.1,tw,"));
    assert!(lines[2].contains(",thb,"));
    // One summary line per test row of the cell.
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SINGLE_CELL);
    let a = hdmean(&["simulate", "--config", s(&cfg), "--threads", "1"]);
    let b = hdmean(&["simulate", "--config", s(&cfg), "--threads", "3"]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = hdmean(&["simulate", "--config", s(&cfg), "--seed", "100"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_preset_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sizes.csv");
    let out = hdmean(&["simulate", "--preset", "sizes2", "--reps", "3", "--out", s(&csv)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(text.lines().skip(1).all(|l| l.contains(",scenario2,")));
}

#[test]
fn simulate_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(
        dir.path(),
        "extra.json",
        &SINGLE_CELL.replace("\"dims\"", "\"colour\": 1, \"dims\""),
    );
    assert_eq!(code(&hdmean(&["simulate", "--config", s(&extra)])), 2);
    let odd = write(dir.path(), "odd.json", &SINGLE_CELL.replace("[20]", "[22]"));
    assert_eq!(code(&hdmean(&["simulate", "--config", s(&odd)])), 2);
    let zero = write(dir.path(), "zero.json", &SINGLE_CELL.replace("30", "0"));
    assert_eq!(code(&hdmean(&["simulate", "--config", s(&zero)])), 2);
    let broken = write(dir.path(), "broken.json", "{\"dims\": [");
    assert_eq!(code(&hdmean(&["simulate", "--config", s(&broken)])), 1);
    assert_eq!(code(&hdmean(&["simulate", "--preset", "table9"])), 2);
    assert_eq!(code(&hdmean(&["simulate", "--preset", "sizes1", "--threads", "0"])), 2);
}

const SCENARIO2_POWER: &str = r#"{
  "p": 60,
  "counts": [20, 25, 30],
  "level": 0.05,
  "covariance": {"scenario": "scenario2"},
  "sparse": {"nu": 0.25, "delta": 0.7}
}"#;

#[test]
fn power_matches_library_call() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "power.json", SCENARIO2_POWER);
    let out = hdmean(&["power", "--config", s(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let req: PowerRequest = serde_json::from_str(SCENARIO2_POWER).unwrap();
    let expected = serde_json::to_value(evaluate_request(&req).unwrap()).unwrap();
    assert_eq!(json(&out), expected);
    let v = json(&out);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "are_vs_hb",
            "assumption_c_diagnostic",
            "asymptotic_power",
            "equal_cov_power"
        ]
    );
    let asym = v["asymptotic_power"].as_f64().unwrap();
    assert!((asym - v["equal_cov_power"].as_f64().unwrap()).abs() < 1e-12);
    assert!(asym > 0.05 && asym < 1.0);
}

#[test]
fn power_trivial_cases() {
    let dir = tempfile::tempdir().unwrap();
    let equal = r#"{"p": 3, "counts": [5, 6], "level": 0.1,
        "covariance": {"shared": [[1, 0.2, 0], [0.2, 1, 0], [0, 0, 2]]},
        "means": [[1, 2, 3], [1, 2, 3]]}"#;
    let out = hdmean(&["power", "--config", s(&write(dir.path(), "eq.json", equal))]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["asymptotic_power"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(v["are_vs_hb"], Value::Null);

    let identity = r#"{"p": 3, "counts": [5, 6], "weights": "identity",
        "covariance": {"shared": [[1, 0.2, 0], [0.2, 1, 0], [0, 0, 2]]},
        "means": [[1, 0, 3], [0, 2, 3]]}"#;
    let v = json(&hdmean(&[
        "power",
        "--config",
        s(&write(dir.path(), "id.json", identity)),
    ]));
    assert!((v["are_vs_hb"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let too_big = r#"{"p": 2001, "counts": [5, 6], "covariance": {"scenario": "scenario1"}}"#;
    assert_eq!(
        code(&hdmean(&[
            "power",
            "--config",
            s(&write(dir.path(), "big.json", too_big))
        ])),
        2
    );
}

#[test]
fn oracle_check_exit_codes() {
    let out = hdmean(&["oracle-check", "--seed", "4", "--trials", "100"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["trials"], 100);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(code(&hdmean(&["oracle-check", "--trials", "0"])), 2);
}

#[test]
fn every_subcommand_is_deterministic() {
    let a = hdmean(&["oracle-check", "--seed", "9", "--trials", "20"]);
    let b = hdmean(&["oracle-check", "--seed", "9", "--trials", "20"]);
    assert_eq!(a.stdout, b.stdout);
}
