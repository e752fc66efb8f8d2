use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linksched"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn ring() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/accumulation_ring.scn")
}

fn write_config(dir: &Path) {
    fs::write(
        dir.join("cfg.toml"),
        "[scenario]\narea_side = 6.0\npairs = 5\nframe_length = 4\nruns = 2\n\n[experiment]\nalgorithms = [\"app\", \"pg\", \"opt\", \"dist\"]\n",
    )
    .unwrap();
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path());
    for name in ["a.scn", "b.scn"] {
        let out = run(
            &["gen", "--config", "cfg.toml", "--seed", "5", "--out", name],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = fs::read(dir.path().join("a.scn")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.scn")).unwrap());
    assert!(a.starts_with(b"linksched-scenario v1\n"));
    let out = run(&["gen", "--config", "cfg.toml", "--seed", "6"], dir.path());
    assert_ne!(out.stdout, a);
}

#[test]
fn schedule_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path());
    assert!(run(
        &["gen", "--config", "cfg.toml", "--seed", "2", "--out", "s.scn"],
        dir.path()
    )
    .status
    .success());
    for algo in ["app", "pg", "opt", "dist"] {
        let sched = format!("{algo}.sch");
        let out = run(
            &[
                "schedule",
                "--algo",
                algo,
                "--scenario",
                "s.scn",
                "--config",
                "cfg.toml",
                "--out",
                &sched,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = run(
            &["check", "--scenario", "s.scn", "--schedule", &sched],
            dir.path(),
        );
        let report = String::from_utf8_lossy(&out.stdout);
        assert!(report.contains("sinr: 0"), "{algo}: {report}");
        assert!(report.contains("half duplex: 0"), "{algo}: {report}");
    }
}

#[test]
fn check_flags_accumulated_interference() {
    let dir = tempfile::tempdir().unwrap();
    let ring = ring();
    let ring = ring.to_str().unwrap();
    let out = run(
        &[
            "schedule",
            "--algo",
            "pcg",
            "--scenario",
            ring,
            "--frame",
            "2",
            "--out",
            "p.sch",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = run(
        &["check", "--scenario", ring, "--schedule", "p.sch"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("sinr: 2 (slot 0 link 0"), "{report}");
    assert!(report.contains("feasible: false"));
}

#[test]
fn bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "bound",
            "--theorem",
            "1",
            "--theta",
            "0.5",
            "--delta-ratio",
            "0",
            "--a-hat",
            "20",
        ],
        dir.path(),
    );
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - (1.0 - (-2.5f64).exp())).abs() < 1e-12);

    let out = run(&["bound", "--theorem", "3", "--d-max", "2"], dir.path());
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    let rho = 4.0 * (30.0 * std::f64::consts::PI).powf(0.25);
    assert!((v / (16.0 * (rho + 2.0).powi(4) / 10.0) - 1.0).abs() < 1e-9);

    let out = run(
        &[
            "bound",
            "--theorem",
            "1",
            "--theta",
            "0.5",
            "--delta-ratio",
            "-0.2",
            "--a-hat",
            "4",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    let out = run(&["bound", "--theorem", "2", "--d-max", "2"], dir.path());
    assert!(!out.status.success());
    let out = run(&["bound", "--theorem", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--d-max"));
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let ring = ring();
    let out = run(
        &[
            "simulate",
            "--scenario",
            ring.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            "t.tsv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let trace = fs::read_to_string(dir.path().join("t.tsv")).unwrap();
    assert!(trace.starts_with("slot\tsensing\tgranted\tdenied\tcompleted\tsinr_db\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complete=true"));
}

#[test]
fn experiment_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path());
    let out = run(
        &[
            "experiment",
            "--config",
            "cfg.toml",
            "--seed",
            "4",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let results = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 4);
    assert!(results.starts_with("run,seed,algorithm,n,throughput,lp_bound,opt,delta_ratio,uncovered,slots_used,wall_ms,note\n"));
    let summary = fs::read_to_string(dir.path().join("r.summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4);
}

#[test]
fn failures_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["schedule", "--algo", "app", "--scenario", "missing.scn"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.scn"));

    fs::write(
        dir.path().join("bad.scn"),
        "linksched-scenario v1\nradio alpha=4\n",
    )
    .unwrap();
    let out = run(
        &["schedule", "--algo", "pg", "--scenario", "bad.scn"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    fs::write(dir.path().join("bad.toml"), "[scenario]\npairs = 0\n").unwrap();
    let out = run(&["gen", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["experiment"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));

    let ring = ring();
    let out = run(
        &[
            "schedule",
            "--algo",
            "opt",
            "--scenario",
            ring.to_str().unwrap(),
            "--frame",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}
