use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_adasense")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn params_by_eps() {
    let (code, out, _) = run(&["params", "--p", "1", "--q", "2", "--eps", "0.1"]);
    assert_eq!(code, 0);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("0.1,,9,2,"), "{row}");
}

#[test]
fn params_zero_budget() {
    let (code, out, _) = run(&["params", "--budget", "0", "--m", "65536"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with(",0,0,"));
}

#[test]
fn adaptive_and_nonadaptive_rows() {
    let (code, out, _) = run(&["adaptive", "--m", "1024", "--L", "1", "--trials", "3", "--family", "spikes:2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().starts_with("adaptive,precond,1024,"));

    let (code, out, _) = run(&["nonadaptive", "--m", "1024", "--method", "countsketch", "--L", "2", "--trials", "3"]);
    assert_eq!(code, 0);
    let fields: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "countsketch");
    assert_eq!(fields[14], (33 * 64).to_string());
}

#[test]
fn compare_writes_csv_file() {
    let dir = std::env::temp_dir().join(format!("adasense-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cmp.csv");
    let (code, _, _) = run(&[
        "compare", "--m", "512", "--budget", "0,20000", "--family", "spikes:2,zero", "--trials", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 2 * 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_and_override() {
    let dir = std::env::temp_dir().join(format!("adasense-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# defaults\nm = 256\nL = 1\ntrials = 2\nfamily = spikes:1\n").unwrap();
    let (code, out, _) = run(&["adaptive", "--config", cfg.to_str().unwrap(), "--m", "300"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().nth(1).unwrap().starts_with("adaptive,precond,300,"));
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let (code, _, err) = run(&["adaptive", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn audit_reports_ok() {
    let (code, out, _) = run(&["audit", "--m", "4096", "--target", "spot", "--kstar", "6", "--trials", "20"]);
    assert_eq!(code, 0);
    assert!(out.contains("cap:       14"));
    assert!(out.contains("status:    ok"));
}

#[test]
fn parameter_errors_exit_nonzero() {
    let (code, _, err) = run(&["adaptive", "--m", "100"]);
    assert_eq!(code, 2);
    assert!(err.contains("required"));
    let (code, _, _) = run(&["adaptive", "--m", "100", "--L", "1", "--p", "2", "--q", "2"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["nonadaptive", "--m", "100", "--method", "nope", "--L", "1"]);
    assert_eq!(code, 2);
}
