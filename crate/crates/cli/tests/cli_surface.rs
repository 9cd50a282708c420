//! Tests of the external surface: subcommands through the real binary,
//! exit-code semantics, sweep behavior, manifest hashing, and a 2D run.

use std::path::Path;
use std::process::Command;

use fracp_cli::{run_evaluate, run_experiment, sweep, ExperimentConfig};

const BASE: &str = r#"
[params]
s = 0.5
p = 2.0
dim = 1

[domain]
shape = "interval"
a = -1.0
b = 1.0

[grid]
interior_nodes = 201

[problem]
f = { kind = "constant", value = 1.0 }
g = { kind = "constant", value = 0.0 }
c = { kind = "constant", value = 0.0 }

[checks]
names = ["min_principle", "hopf", "holder"]

[output]
seed = 42
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn fracp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracp"))
}

#[test]
fn verify_subcommand_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BASE);
    let out = dir.path().join("out");
    let status = fracp()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in ["min_principle", "hopf", "holder"] {
        assert!(out.join(format!("report_{name}.csv")).exists(), "{name}");
    }
    assert!(out.join("solution.csv").exists());
    assert!(out.join("solution.meta").exists());
    assert!(out.join("manifest.txt").exists());
    // Every CSV carries a header row.
    let reports = std::fs::read_to_string(out.join("reports.csv")).unwrap();
    assert!(reports.starts_with("check_name,status,tolerance,measured,narrative"));
    let solution = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(solution.starts_with("x,value,mask"));
}

#[test]
fn invalid_p_exits_two_with_named_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &BASE.replace("p = 2.0", "p = 0.5"));
    let out = fracp()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("p out of range"), "{stderr}");
}

#[test]
fn failing_check_exits_one_with_reports_written() {
    // The unit-amplitude logarithmic-estimate instance exceeds the ten-fold
    // stability band; the check fails honestly and the driver reports it.
    let text = BASE.replace(
        "names = [\"min_principle\", \"hopf\", \"holder\"]",
        "names = [\"log_lemma\"]",
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let status = fracp()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let report = std::fs::read_to_string(out.join("report_log_lemma.csv")).unwrap();
    assert!(report.contains(",fail,"), "{report}");
}

#[test]
fn check_flag_overrides_config_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BASE);
    let out = dir.path().join("out");
    let status = fracp()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--check", "min_principle"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("report_min_principle.csv").exists());
    assert!(!out.join("report_hopf.csv").exists());
}

#[test]
fn solve_subcommand_writes_solution_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BASE);
    let out = dir.path().join("out");
    let status = fracp()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("solution.csv").exists());
    assert!(!out.join("report_min_principle.csv").exists());
}

#[test]
fn evaluate_reports_interior_constancy() {
    let text = format!(
        "{BASE}\n[evaluate]\nfunction = {{ kind = \"bump\" }}\npoints = [[-0.5], [0.0], [0.5]]\n"
    );
    let cfg = ExperimentConfig::parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let results = run_evaluate(&cfg, dir.path()).unwrap();
    assert_eq!(results.len(), 3);
    let (lo, hi) = results.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(l, h), (_, v, _)| (l.min(*v), h.max(*v)),
    );
    assert!((hi - lo) / hi.abs() < 1e-2, "spread {lo} .. {hi}");
    let csv = std::fs::read_to_string(dir.path().join("evaluate.csv")).unwrap();
    assert!(csv.starts_with("x,value,error_estimate"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweep_grid_nodes_is_cauchy_mid_domain() {
    let text = BASE.replace(
        "names = [\"min_principle\", \"hopf\", \"holder\"]",
        "names = []",
    );
    let cfg = ExperimentConfig::parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = sweep(
        &cfg,
        text.as_bytes(),
        "grid_nodes",
        &[101.0, 201.0, 401.0],
        dir.path(),
        None,
    )
    .unwrap();
    assert!(outcome.all_passed);
    let mids: Vec<f64> = outcome.rows.iter().map(|r| r.u_mid).collect();
    for w in mids.windows(2) {
        let rel = (w[1] - w[0]).abs() / w[1].abs();
        assert!(rel < 0.05, "consecutive mid values {w:?} differ by {rel:.3}");
    }
    assert!(dir.path().join("run_002/solution.csv").exists());
}

#[test]
fn sweep_with_empty_values_writes_empty_table() {
    let cfg = ExperimentConfig::parse(BASE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = sweep(&cfg, BASE.as_bytes(), "s", &[], dir.path(), None).unwrap();
    assert!(outcome.all_passed);
    assert!(outcome.rows.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "header only: {csv:?}");
}

#[test]
fn sweep_continues_past_failed_rows() {
    // p = 0.5 is rejected per-run; the sweep marks the row and finishes.
    let text = BASE.replace(
        "names = [\"min_principle\", \"hopf\", \"holder\"]",
        "names = []",
    );
    let cfg = ExperimentConfig::parse(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome = sweep(
        &cfg,
        text.as_bytes(),
        "p",
        &[0.5, 2.0],
        dir.path(),
        None,
    )
    .unwrap();
    assert_eq!(outcome.rows.len(), 2);
    assert!(outcome.rows[0].status.starts_with("error"));
    assert_eq!(outcome.rows[1].status, "pass");
    assert!(outcome.any_precondition);
}

#[test]
fn manifest_hash_tracks_config_content() {
    let cfg = ExperimentConfig::parse(BASE).unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let dir_c = tempfile::tempdir().unwrap();
    run_experiment(&cfg, BASE.as_bytes(), dir_a.path(), None, Some(&[])).unwrap();
    run_experiment(&cfg, BASE.as_bytes(), dir_b.path(), None, Some(&[])).unwrap();
    // Content change that parses to the same structure still changes the
    // hash: the manifest tracks bytes.
    let altered = format!("{BASE}# trailing note\n");
    let cfg2 = ExperimentConfig::parse(&altered).unwrap();
    run_experiment(&cfg2, altered.as_bytes(), dir_c.path(), None, Some(&[])).unwrap();

    let hash = |p: &Path| -> String {
        std::fs::read_to_string(p.join("manifest.txt"))
            .unwrap()
            .lines()
            .find(|l| l.starts_with("config_sha256"))
            .unwrap()
            .to_string()
    };
    assert_eq!(hash(dir_a.path()), hash(dir_b.path()));
    assert_ne!(hash(dir_a.path()), hash(dir_c.path()));
}

const BALL_2D: &str = r#"
[params]
s = 0.5
p = 2.0
dim = 2

[domain]
shape = "ball"
center = [0.0, 0.0]
radius = 1.0

[grid]
interior_nodes = 21
collar_factor = 1.0

[problem]
f = { kind = "constant", value = 1.0 }
g = { kind = "constant", value = 0.0 }
c = { kind = "constant", value = 0.0 }

[checks]
names = ["min_principle", "hopf"]

[output]
seed = 5
"#;

#[test]
fn two_dimensional_ball_run_passes() {
    let cfg = ExperimentConfig::parse(BALL_2D).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let outcome =
        run_experiment(&cfg, BALL_2D.as_bytes(), dir.path(), None, None).unwrap();
    assert!(outcome.all_passed, "reports: {:#?}", outcome.reports);
    assert!(outcome.stats.u_min_interior > 0.0);
    let solution = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(solution.starts_with("x,y,value,mask"));
}
