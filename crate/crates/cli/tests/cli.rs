//! End-to-end runs of the `ncg` binary.

use std::path::Path;
use std::process::{Command, Output};

fn ncg(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ncg"));
    cmd.args(args).env_remove("NCG_OUTPUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn entries(dir: &Path) -> Vec<String> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect()
        })
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn config_file_drives_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "host_complete = 6\nalpha = 1, 2, 4\ninit = empty\noutput_dir = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = ncg(&["sweep", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(2)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][3], "15");
    assert_eq!(rows[2][3], "5");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(json["runs"].as_array().unwrap().len(), 3);
    assert_eq!(json["runs"][2]["equilibrium"]["verdict"], "pass");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.conf");
    std::fs::write(&cfg, "host_complete = 4\nalpha = 1\n").unwrap();
    let o = ncg(
        &["sweep", "--config", cfg.to_str().unwrap(), "--alpha", "3"],
        &[("NCG_OUTPUT_DIR", dir.path())],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("3,1,4,3,"));
}

#[test]
fn config_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["sweep", "--alpha", "1"],
        vec!["sweep", "--host-complete", "4", "--alpha", "2,1"],
        vec!["sweep", "--host-complete", "4", "--alpha", ""],
        vec!["simulate", "--host-complete", "4", "--alpha", "1,2"],
        vec![
            "sweep",
            "--host-complete",
            "4",
            "--alpha",
            "1",
            "--init",
            "file:/nonexistent",
        ],
    ] {
        let o = ncg(&args, &[("NCG_OUTPUT_DIR", dir.path())]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("config error"),
            "{args:?}"
        );
        assert!(entries(dir.path()).is_empty(), "{args:?}");
    }
}

#[test]
fn non_convergence_exits_nonzero_with_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncg(
        &[
            "sweep",
            "--host-complete",
            "6",
            "--alpha",
            "1",
            "--max-steps",
            "4",
        ],
        &[("NCG_OUTPUT_DIR", dir.path())],
    );
    assert_eq!(o.status.code(), Some(3));
    let dump = std::fs::read_to_string(dir.path().join("trajectory-alpha-1_1.txt")).unwrap();
    assert_eq!(dump.lines().count(), 4);
    assert!(dump.starts_with("1 edge(0,1) add "));
}

#[test]
fn simulate_writes_a_network_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = ncg(
        &[
            "simulate",
            "--host-generator",
            "random:n=9,p=0.4",
            "--seed",
            "11",
            "--alpha",
            "5/2",
            "--policy",
            "random",
        ],
        &[("NCG_OUTPUT_DIR", p)],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let names = entries(p);
    assert!(
        names.contains(&"network-alpha-5_2.txt".to_string()),
        "{names:?}"
    );

    // rebuild the host file the generator used, then re-verify from disk
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("results.json")).unwrap()).unwrap();
    assert_eq!(json["runs"][0]["n"], 9);
    let host = ncg_cli::config::load_host(
        &ncg_cli::config::HostSource::Generator {
            name: "random".into(),
            params: vec![("n".into(), "9".into()), ("p".into(), "0.4".into())],
        },
        11,
    )
    .unwrap()
    .0;
    let host_file = p.join("host.txt");
    std::fs::write(&host_file, host.to_edge_list(&[])).unwrap();
    let o = ncg(
        &[
            "verify",
            "--host",
            host_file.to_str().unwrap(),
            "--alpha",
            "5/2",
            "--strategy",
            p.join("strategy-alpha-5_2.txt").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let o = ncg(
        &[
            "check-lemmas",
            "--host",
            host_file.to_str().unwrap(),
            "--alpha",
            "5/2",
            "--network",
            p.join("network-alpha-5_2.txt").to_str().unwrap(),
        ],
        &[],
    );
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 3);
}

#[test]
fn construct_emits_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    let o = ncg(
        &[
            "construct",
            "--k",
            "2",
            "--l",
            "3",
            "--output-dir",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        entries(dir.path()),
        ["g1.txt", "g2-payments.txt", "g2.txt", "host.txt"]
    );
    let host = std::fs::read_to_string(dir.path().join("host.txt")).unwrap();
    assert!(host.starts_with("# k=2 l=3 alpha=720\n"));
    assert!(host.lines().any(|l| l == "15 24"));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["n"], 15);

    let o = ncg(
        &[
            "construct",
            "--k",
            "1",
            "--l",
            "3",
            "--output-dir",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn verify_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let strategy = dir.path().join("s.txt");
    // the path 0-1-2 on K_3 at price 1/2: the missing edge is worth 2 to its endpoints
    std::fs::write(&strategy, "edge 0 1: 0=1/2\nedge 1 2: 1=1/2\n").unwrap();
    let o = ncg(
        &[
            "verify",
            "--host-complete",
            "3",
            "--alpha",
            "1/2",
            "--strategy",
            strategy.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["violations"][0]["kind"], "fundable-edge");

    std::fs::write(&strategy, "player 0: 1 2\n").unwrap();
    let o = ncg(
        &[
            "verify",
            "--host-complete",
            "3",
            "--alpha",
            "2",
            "--model",
            "unilateral",
            "--strategy",
            strategy.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
}

#[test]
fn optimum_reports_exact_and_lower_bound() {
    let o = ncg(&["optimum", "--host-complete", "3", "--alpha", "1"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["optimum"]["cost"], "9");
    assert_eq!(v["poa"], "1");
    let o = ncg(&["optimum", "--host-complete", "8", "--alpha", "1"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("optimum").is_none());
    assert_eq!(v["lower_bound"], "63");
}

#[test]
fn g2_seeded_run_on_the_lower_bound_family() {
    let mut pairs = ncg_cli::ConfigPairs::default();
    pairs.set("host_generator", "lower-bound:k=2,l=400");
    pairs.set("alpha", "suggested");
    pairs.set("init", "g2");
    let config = ncg_cli::ExperimentConfig::from_pairs(&pairs).unwrap();
    let result = ncg_cli::run_experiment(&config).unwrap();
    let run = &result.runs[0];
    assert_eq!(run.n, 2000);
    assert_eq!(run.alpha, ncg_core::rational::int(12 * 2000 * 4));
    // G_2 is already stable: one idle pass over the host edges
    assert!(run.converged);
    assert_eq!(run.steps, 3200);
    assert_eq!(run.edges.len(), 2000);
    let optimum = run.optimum.as_ref().unwrap();
    assert_eq!(optimum.basis, ncg_cli::experiment::OptimumBasis::LowerBound);
    assert!(optimum.poa > ncg_core::rational::int(1));
    assert_eq!(
        run.verdicts(),
        "equilibrium:pass;doubling-2k+2a/n:pass;doubling-2k+4sqrt(a/n):pass;stretch-3d+7a^(1/3)+5a^(1/3)d^(2/3):pass"
    );
}
