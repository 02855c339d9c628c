use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_ctnoma-sim");

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn golden_run(workers: &str, out: &Path) {
    let status = Command::new(BIN)
        .args(["--config", &data("three_users.cfg"), "--sweep", "emax", "--values", "1,2"])
        .args(["--trials", "10", "--seed", "42", "--workers", workers, "--out"])
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn golden_file_is_reproduced_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let golden = fs::read(data("golden_emax_seed42.csv")).unwrap();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        golden_run(workers, &out);
        assert_eq!(fs::read(&out).unwrap(), golden, "workers = {workers}");
    }
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    golden_run("2", &out);
    let stdout = Command::new(BIN)
        .args(["--config", &data("three_users.cfg"), "--values", "1,2", "--trials", "10", "--seed", "42"])
        .output()
        .unwrap();
    assert!(stdout.status.success());
    assert_eq!(stdout.stdout, fs::read(&out).unwrap());
}

#[test]
fn empty_protocol_list_writes_header_only() {
    let out = Command::new(BIN)
        .args(["--protocols", "", "--trials", "1", "--values", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("{}\n", ctnoma_sim::output::HEADER));
}

#[test]
fn bad_input_exits_nonzero() {
    for args in [
        vec!["--values", "2,1"],
        vec!["--protocols", "noma"],
        vec!["--trials", "0"],
        vec!["--config", "/nonexistent.cfg"],
        vec!["--sweep", "bandwidth"],
    ] {
        let out = Command::new(BIN).args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn validate_reports_each_check() {
    let out = Command::new(BIN)
        .args(["--validate", "--trials", "1", "--values", "2", "--seed", "5"])
        .output()
        .unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success(), "{stderr}");
    assert_eq!(stderr.lines().filter(|l| l.starts_with("[ok]")).count(), 6, "{stderr}");
}
