//! The `seglab` binary: file naming, exit codes and output schemas.

use std::path::Path;
use std::process::{Command, Output};

use seglab::config::{ExperimentConfig, GeneratorKind, MethodEntry, ProblemSource, ScheduleSpec};
use seglab_core::FiniteSumProblem;

fn seglab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seglab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn small_config(out: &str) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSource::Generator {
            kind: GeneratorKind::Monotone,
            seed: 5,
            d1: 4,
            d2: 4,
            n: 6,
        },
        methods: ["SEG-FFA", "SEG-RR"]
            .iter()
            .map(|m| MethodEntry {
                method: m.to_string(),
                name: None,
                schedule: None,
            })
            .collect(),
        default_schedule: Some(ScheduleSpec::Constant { eta: 0.01 }),
        budget_passes: 300,
        checkpoint_stride: 30,
        instance_count: 2,
        master_seed: 1,
        stepsize_grid: vec![],
        output_dir: out.into(),
    }
}

#[test]
fn gen_is_rerunnable_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--kind", "monotone", "--seed", "42", "--dx", "20", "--dy", "20", "--n", "40"];
    assert_eq!(code(&seglab(&args, dir.path())), 0);
    let path = dir.path().join("monotone-42.json");
    let first = std::fs::read(&path).unwrap();
    assert_eq!(code(&seglab(&args, dir.path())), 0);
    assert_eq!(first, std::fs::read(&path).unwrap());
    let p = FiniteSumProblem::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!((p.d1(), p.d2(), p.n()), (20, 20, 40));
}

#[test]
fn gen_divergence_instance() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&seglab(&["gen", "--kind", "divergence", "--L", "2"], dir.path())), 0);
    let text = std::fs::read_to_string(dir.path().join("divergence-0.json")).unwrap();
    let p = FiniteSumProblem::from_json(&text).unwrap();
    assert_eq!((p.n(), p.dim()), (2, 2));
    assert!((p.spectral_report().unwrap().smoothness_l - 2.0).abs() < 1e-12);
}

#[test]
fn gen_odd_n_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = seglab(&["gen", "--kind", "monotone", "--n", "41"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("even"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn run_writes_outputs_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config("out");
    std::fs::write(dir.path().join("cfg.json"), cfg.to_json()).unwrap();
    let o = seglab(&["run", "--config", "cfg.json", "--seed", "8"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let echoed = ExperimentConfig::from_path(&out.join("config.json")).unwrap();
    assert_eq!(echoed.master_seed, 8);
    for name in ["SEG-FFA-inst0.csv", "SEG-FFA-inst1.csv", "SEG-RR-inst0.csv", "SEG-RR-inst1.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("pass,epoch,grad_norm_sq,grad_norm_sq_ratio,dist_sq\n"));
    }
    let agg = std::fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("pass,method,geo_mean_ratio\n0,SEG-FFA,1e0\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 2);
}

#[test]
fn run_flags_divergence_in_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config("out");
    cfg.default_schedule = Some(ScheduleSpec::Constant { eta: 1e3 });
    std::fs::write(dir.path().join("cfg.json"), cfg.to_json()).unwrap();
    assert_eq!(code(&seglab(&["run", "--config", "cfg.json"], dir.path())), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    for m in summary.as_array().unwrap() {
        assert_eq!(m["diverged_instances"].as_array().unwrap().len(), 2);
    }
    let agg = std::fs::read_to_string(dir.path().join("out/aggregate.csv")).unwrap();
    let lines: Vec<&str> = agg.lines().filter(|l| l.contains("SEG-RR")).collect();
    assert!(lines.last().unwrap().ends_with(",inf"));
    assert_eq!(lines.iter().filter(|l| l.ends_with(",inf")).count(), 1);
}

#[test]
fn empty_method_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config("out");
    cfg.methods.clear();
    std::fs::write(dir.path().join("cfg.json"), cfg.to_json()).unwrap();
    let o = seglab(&["run", "--config", "cfg.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_and_unknown_suite_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&seglab(&["run", "--config", "nope.json"], dir.path())), 2);
    assert_eq!(code(&seglab(&["run"], dir.path())), 2);
    assert_eq!(code(&seglab(&["verify", "everything"], dir.path())), 2);
    assert_eq!(code(&seglab(&["frobnicate"], dir.path())), 2);
}

#[test]
fn single_cell_sweep_equals_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), small_config("run").to_json()).unwrap();
    assert_eq!(code(&seglab(&["run", "--config", "cfg.json"], dir.path())), 0);
    let o = seglab(&["sweep", "--config", "cfg.json", "--out", "sweep", "--grid", "0.01"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = std::fs::read_to_string(dir.path().join("run/aggregate.csv")).unwrap();
    let sweep = std::fs::read_to_string(dir.path().join("sweep/sweep.csv")).unwrap();
    let mut lines = sweep.lines();
    assert_eq!(lines.next(), Some("eta,pass,method,geo_mean_ratio"));
    let stripped: Vec<&str> = lines.map(|l| l.strip_prefix("1e-2,").unwrap()).collect();
    assert_eq!(stripped, run.lines().skip(1).collect::<Vec<_>>());
}

#[test]
fn sweep_without_grid_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), small_config("s").to_json()).unwrap();
    assert_eq!(code(&seglab(&["sweep", "--config", "cfg.json"], dir.path())), 2);
}

#[test]
fn verify_writes_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = seglab(&["verify", "counterexamples", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["suite"], "counterexamples");
    assert_eq!(r["passed"], true);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    for c in checks {
        for key in ["check_name", "expected", "observed", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    let again = seglab(&["verify", "counterexamples"], dir.path());
    assert_eq!(again.stdout, std::fs::read(dir.path().join("r.json")).unwrap());
}

#[test]
fn plot_one_series() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "pass,method,geo_mean_ratio\n0,SEG-FFA,1e0\n50,SEG-FFA,5e-1\n100,SEG-FFA,inf\n").unwrap();
    assert_eq!(code(&seglab(&["plot", "a.csv", "--out", "a.svg"], dir.path())), 0);
    let svg = std::fs::read_to_string(dir.path().join("a.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.contains("<!-- generator: seglab 0.1.0 -->"));
}

#[test]
fn plot_rejects_empty_and_mismatched_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    std::fs::write(dir.path().join("header.csv"), "pass,method,geo_mean_ratio\n").unwrap();
    std::fs::write(dir.path().join("ok.csv"), "pass,method,geo_mean_ratio\n0,SEG-RR,1e0\n").unwrap();
    std::fs::write(dir.path().join("other.csv"), "eta,pass,method,geo_mean_ratio\n1e-3,0,SEG-RR,1e0\n").unwrap();
    for args in [
        vec!["plot", "empty.csv", "--out", "x.svg"],
        vec!["plot", "header.csv", "--out", "x.svg"],
        vec!["plot", "ok.csv", "other.csv", "--out", "x.svg"],
    ] {
        assert_eq!(code(&seglab(&args, dir.path())), 2, "{args:?}");
    }
    assert!(!dir.path().join("x.svg").exists());
}
