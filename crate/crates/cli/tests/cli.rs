use std::path::Path;
use std::process::{Command, Output};

fn trade_lab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trade-lab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const MINIMAL: &str = r#"{"env": "uniform_iid", "algo": "fbp", "T": [4096], "reps": 5, "seed": 1}"#;

#[test]
fn minimal_run_writes_two_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.json", MINIMAL);
    let out = trade_lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let traces = std::fs::read_to_string(dir.path().join("out/uniform_iid_fbp_traces.csv")).unwrap();
    let summary = std::fs::read_to_string(dir.path().join("out/uniform_iid_fbp_summary.csv")).unwrap();
    assert!(traces.starts_with("run_id,rep,t,cumulative_reward,pseudo_regret,empirical_regret\n"));
    assert!(summary.starts_with("T,mean_pseudo_regret,ci_lo,ci_hi,theoretical_upper_bound,lower_bound_reference\n"));
    assert_eq!(summary.lines().count(), 2);
    // 13 checkpoints per replication.
    assert_eq!(traces.lines().count(), 1 + 5 * 13);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "env": "t23_lower", "eps": 0.3, "algo": "scouting_bandits", "T": [1000, 5000], "reps": 4, "seed": 9}"#,
    );
    let mut bodies = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out_dir = format!("o{i}");
        let out = Command::new(env!("CARGO_BIN_EXE_trade-lab"))
            .args(["run", &cfg, "--out", &out_dir])
            .env("TRADE_LAB_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let d = dir.path().join(&out_dir);
        bodies.push((
            std::fs::read(d.join("t23_lower_scouting_bandits_traces.csv")).unwrap(),
            std::fs::read(d.join("t23_lower_scouting_bandits_summary.csv")).unwrap(),
        ));
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn feedback_mismatch_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"env": "uniform_iid", "algo": "scouting_bandits", "feedback": "full", "T": [100], "reps": 1, "seed": 1}"#,
    );
    let out = trade_lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("feedback mismatch"));
}

#[test]
fn schema_violations_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"env": "uniform_iid", "algo": "fbp", "T": [100], "reps": 0, "seed": 1}"#);
    let out = trade_lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("replications"));

    let cfg = write(dir.path(), "bad2.json", r#"{"env": {"family": "needle"}, "algo": "fbp", "T": [100], "reps": 1, "seed": 1}"#);
    let out = trade_lab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`x`"));

    let out = trade_lab(&["run", "does-not-exist.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_filter_runs_one_property() {
    let dir = tempfile::tempdir().unwrap();
    let out = trade_lab(&["verify", "--filter", "decomposition"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 1);
    assert!(stdout.contains("PASS decomposition"));

    let out = trade_lab(&["verify", "--filter", "no_such_property"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plotdata_from_summary_adds_reference_lines() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "s_summary.csv",
        "T,mean_pseudo_regret,ci_lo,ci_hi,theoretical_upper_bound,lower_bound_reference\n1000,10,9,11,,\n",
    );
    let out = trade_lab(&["plotdata", &csv], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "ref_t_2_3").unwrap();
    assert!((row[col].parse::<f64>().unwrap() - 100.0).abs() < 1e-9);

    let bad = write(dir.path(), "bad.csv", "T,mean_pseudo_regret\nabc,1\n");
    assert_ne!(trade_lab(&["plotdata", &bad], dir.path()).status.code(), Some(0));
}

#[test]
fn plotdata_curve_peaks_at_a_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let out = trade_lab(&["plotdata", "--instance", r#"{"family":"sqrt_lower","eps":0.7}"#], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<(f64, f64)> = stdout
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 1001);
    let best = rows.iter().copied().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    assert!((best.0 - 0.25).abs() < 1e-9, "{best:?}");
}

#[test]
fn bounds_prints_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = trade_lab(&["bounds", "--horizons", "1000,10000"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("adversarial"));
    assert!(stdout.contains("full_iid"));
}
