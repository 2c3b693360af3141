use std::fs;
use std::process::Command;

fn dofdm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dofdm"))
}

#[test]
fn validate_rejects_short_destination_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    fs::write(&cfg, "n_cp2 = 4\n").unwrap();
    let out = dofdm().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let ok = dofdm().arg("validate").output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("ok:"));
}

#[test]
fn sweep_writes_the_result_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, "snr_db = [10.0]\ntau = [0.0, 0.5]\nmin_bit_errors = 50\nbatch_trials = 4\n").unwrap();
    let table = dir.path().join("out.csv");
    let status = dofdm()
        .args(["sweep", "--workers", "2", "--seed", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&table)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("scheme,code,channel,tau,snr_db"));
    assert!(lines[1].starts_with("D-OFDM1,od2,flat,0.0,10.0,"));
    assert!(lines[2].ends_with(",3"));
}

#[test]
fn oracle_command_reports_agreement() {
    let out = dofdm().args(["oracle", "--cases", "8"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("cases=8 "));
}
