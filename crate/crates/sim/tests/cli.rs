//! End-to-end checks of the fdrelay binary: exit codes, output formats,
//! and byte-level determinism of result files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fdrelay(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fdrelay"));
    cmd.args(args).env_remove("FDRELAY_PARALLELISM");
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, edits: &[(&str, &str)]) -> String {
    let mut text = String::from(BASE_CONFIG);
    for (from, to) in edits {
        assert!(text.contains(from), "edit target {from:?} present");
        text = text.replace(from, to);
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const BASE_CONFIG: &str = r#"{
  "num_pairs": 2,
  "num_subcarriers": 2,
  "num_antennas": 16,
  "p_s": 1.0,
  "p_r": 1.0,
  "kappa_s_tilde": 0.01,
  "beta_d_tilde": 0.02,
  "kappa_r_tilde": 0.05,
  "beta_r_tilde": 0.05,
  "sigma2_n_r": 1.0,
  "sigma2_n_d": 1.0,
  "psi_hat_sr": 1.0,
  "psi_hat_rd": 1.0,
  "psi_hat_sd": 0.05,
  "psi_hat_rr": 1.0,
  "sigma2_e_sr": 0.1,
  "sigma2_e_rd": 0.1,
  "sigma2_e_sd": 0.005,
  "sigma2_e_rr": 0.1,
  "gamma0": 1.0
}"#;

#[test]
fn malformed_config_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{ not json").unwrap();
    let out = fdrelay(&["asymptote", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cannot parse"), "stderr: {stderr}");
}

#[test]
fn missing_config_exits_2() {
    let out = fdrelay(&["asymptote", "--config", "/nonexistent/x.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_1_and_prints_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "neg.json", &[("\"p_s\": 1.0", "\"p_s\": -1.0")]);
    let out = fdrelay(&["simulate", "--config", &path], &[]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("invalid config"), "stderr: {stderr}");
    assert!(stderr.contains("p_s"), "stderr: {stderr}");
}

#[test]
fn asymptote_prints_the_flat_fading_spot_value() {
    // kappa_s=0.01, beta_d=0.02, equal powers: min side gives SINR 50,
    // rate log2(51).
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "flat.json",
        &[
            ("\"kappa_r_tilde\": 0.05", "\"kappa_r_tilde\": 0.0"),
            ("\"beta_r_tilde\": 0.05", "\"beta_r_tilde\": 0.0"),
        ],
    );
    let out = fdrelay(&["asymptote", "--config", &path], &[]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let want = format!("{}", 51f64.log2());
    assert!(stdout.contains(&want), "stdout: {stdout}");
    assert!(stdout.contains("destination-distortion"), "stdout: {stdout}");
}

#[test]
fn simulate_is_deterministic_and_dumps_channels() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let dump = dir.path().join("channels.bin");
    let args = [
        "simulate",
        "--config",
        &path,
        "--seed",
        "9",
        "--trial",
        "2",
        "--dump-channels",
        dump.to_str().unwrap(),
    ];
    let a = fdrelay(&args, &[]);
    assert_eq!(a.status.code(), Some(0));
    let dump_a = fs::read(&dump).unwrap();
    // 16 bytes per complex scalar across sr, rd, sd, and rr blocks.
    let (l, k, n) = (2, 2, 16);
    assert_eq!(dump_a.len(), 16 * (2 * l * k * n + l * l * k + k * n * n));
    let b = fdrelay(&args, &[]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(fs::read(&dump).unwrap(), dump_a);
}

#[test]
fn sweep_files_are_byte_identical_across_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let mut outputs = Vec::new();
    for (tag, extra_args, envs) in [
        ("p1", vec!["--parallelism", "1"], vec![]),
        ("p8", vec!["--parallelism", "8"], vec![]),
        ("env4", vec![], vec![("FDRELAY_PARALLELISM", "4")]),
    ] {
        let out_path = dir.path().join(format!("{tag}.json"));
        let mut args = vec![
            "sweep",
            "--config",
            &path,
            "--n-values",
            "4,8",
            "--trials",
            "3",
            "--seed",
            "7",
            "--out",
            out_path.to_str().unwrap(),
        ];
        args.extend(extra_args);
        let out = fdrelay(&args, &envs);
        assert_eq!(out.status.code(), Some(0), "{tag}");
        outputs.push(fs::read(&out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn sweep_csv_has_the_plot_ready_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let out = fdrelay(
        &[
            "sweep",
            "--config",
            &path,
            "--n-values",
            "4,8",
            "--trials",
            "2",
            "--format",
            "csv",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pair,subcarrier,n,mean_rate,std_rate,asymptotic_rate,gap"
    );
    // one row per (pair, subcarrier, N)
    assert_eq!(lines.count(), 2 * 2 * 2);
}

#[test]
fn sweep_rejects_descending_n_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let out = fdrelay(
        &[
            "sweep", "--config", &path, "--n-values", "8,4", "--trials", "1",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("ascending"), "stderr: {stderr}");
}

#[test]
fn bad_parallelism_env_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let out = fdrelay(
        &[
            "sweep", "--config", &path, "--n-values", "4", "--trials", "1",
        ],
        &[("FDRELAY_PARALLELISM", "lots")],
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FDRELAY_PARALLELISM"), "stderr: {stderr}");
}

#[test]
fn verify_lemmas_emits_passing_reports_at_modest_n() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &[]);
    let out = fdrelay(
        &[
            "verify-lemmas",
            "--config",
            &path,
            "--n",
            "1024",
            "--trials",
            "50",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"check\""), "stdout: {stdout}");
    assert!(!stdout.contains("\"pass\": false"), "stdout: {stdout}");
}

#[test]
fn degenerate_channel_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "zero.json",
        &[("\"psi_hat_sr\": 1.0", "\"psi_hat_sr\": 0.0")],
    );
    let out = fdrelay(&["simulate", "--config", &path], &[]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("zero"), "stderr: {stderr}");
}
