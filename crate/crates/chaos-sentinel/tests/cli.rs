//! End-to-end checks of the command-line surface through the real binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaos-sentinel"))
}

fn read_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn run_twice_with_same_seeds_is_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [dir_a.path(), dir_b.path()] {
        let status = bin()
            .args([
                "run",
                "--preset",
                "reference",
                "--nodes-exp",
                "4",
                "--runs",
                "1",
                "--key-seed",
                "42",
                "--sim-seed",
                "7",
                "--traces",
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = read_sorted(dir_a.path());
    let b = read_sorted(dir_b.path());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn env_var_overrides_out_flag() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "run",
            "--preset",
            "reference",
            "--nodes-exp",
            "3",
            "--runs",
            "1",
            "--policy",
            "chaotic",
            "--out",
        ])
        .arg(flag_dir.path())
        .env("CHAOS_SENTINEL_OUT", env_dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(std::fs::read_dir(flag_dir.path()).unwrap().next().is_none());
    assert!(std::fs::read_dir(env_dir.path()).unwrap().next().is_some());
}

#[test]
fn invalid_config_exits_nonzero_with_message() {
    let out = bin()
        .args(["run", "--preset", "reference", "--t0", "7", "--t-active", "20"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not a positive integer"), "{stderr}");
}

#[test]
fn dump_bits_emits_exact_count_on_stdout() {
    let out = bin()
        .args(["dump-bits", "--key-seed", "9", "--count", "4096"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(out.stdout.len(), 4096);
    let again = bin()
        .args(["dump-bits", "--key-seed", "9", "--count", "4096"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, again.stdout);
    let other = bin()
        .args(["dump-bits", "--key-seed", "10", "--count", "4096"])
        .output()
        .unwrap();
    assert_ne!(out.stdout, other.stdout);
}

#[test]
fn config_file_is_loaded_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("setup.json");
    // start from an emitted header document: a prior run's config comment
    let mut cfg = serde_json::json!({
        "width_m": 40.0, "height_m": 40.0, "n_exp": 5, "aov_deg": 60.0,
        "sensing_range_m": 15.0, "t0_s": 5.0, "t_active_s": 20.0,
        "battery_init": 40, "capture_cost": 1, "intruder_speed_mps": 5.0,
        "first_intrusion_s": 10.0, "activation_fraction": 0.5,
        "mobility": "scan_line", "policy": "chaotic", "sim_seed": 3,
        "max_ticks": 5000
    });
    std::fs::write(&config_path, cfg.to_string()).unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "--runs", "1", "--policy", "chaotic", "--nodes-exp", "3", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(out_dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let active =
        std::fs::read_to_string(out_dir.path().join("chaotic_run0_active.csv")).unwrap();
    let header_line = active.lines().nth(1).unwrap();
    assert!(header_line.contains("\"width_m\":40.0"), "{header_line}");
    assert!(header_line.contains("\"n_exp\":3"), "flag overrides the file: {header_line}");
    cfg["n_exp"] = serde_json::json!(99); // far out of range
    std::fs::write(&config_path, cfg.to_string()).unwrap();
    let out = bin()
        .args(["run", "--runs", "1", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn observer_attack_on_periodic_reports_full_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--preset",
            "reference",
            "--nodes-exp",
            "3",
            "--runs",
            "1",
            "--policy",
            "periodic",
            "--attack",
            "observer",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"accuracy\": 1.0"), "{stdout}");
}
