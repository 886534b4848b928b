use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracinv(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracinv"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FRACINV_OUTPUT_ROOT")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn run_with_out_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.cfg"),
        "variant = mollified\nsigma = 0.01\n",
    )
    .unwrap();
    let out = fracinv(
        &["run", "--config", "a.cfg", "--out", "res", "--seed", "5"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let echoed = fs::read_to_string(dir.path().join("res/config.txt")).unwrap();
    assert!(echoed.contains("seed = 5\n"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged=true"));
}

#[test]
fn default_output_location() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ref.cfg"), "Nt = 32\n").unwrap();
    assert_eq!(
        code(&fracinv(&["run", "--config", "ref.cfg"], dir.path())),
        0
    );
    assert!(dir.path().join("runs/ref/trace.csv").exists());

    let out = Command::new(env!("CARGO_BIN_EXE_fracinv"))
        .args(["run", "--config", "ref.cfg"])
        .current_dir(dir.path())
        .env("FRACINV_OUTPUT_ROOT", "elsewhere")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("elsewhere/ref/summary.csv").exists());
}

#[test]
fn sweep_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "Nt = 32\nvariant = mollified\n").unwrap();
    let out = fracinv(
        &[
            "sweep", "--config", "s.cfg", "--param", "sigma", "--values", "0,0.02", "--out", "sw",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("sw/index.csv").exists());
    assert!(dir.path().join("sw/sigma_001/trace.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("bad_key.cfg"), "colour = blue\n").unwrap();
    fs::write(p.join("noisy_plain.cfg"), "sigma = 0.05\n").unwrap();
    fs::write(p.join("ok.cfg"), "Nt = 16\n").unwrap();
    fs::write(p.join("blocker"), "a file, not a directory").unwrap();

    assert_eq!(code(&fracinv(&["--help"], p)), 0);
    assert_eq!(code(&fracinv(&["frobnicate"], p)), 1);
    assert_eq!(code(&fracinv(&["run"], p)), 1);
    assert_eq!(code(&fracinv(&["check", "--suite", "nonsense"], p)), 1);
    assert_eq!(code(&fracinv(&["run", "--config", "bad_key.cfg"], p)), 1);
    assert_eq!(
        code(&fracinv(
            &["sweep", "--config", "ok.cfg", "--param", "K", "--values", "1"],
            p
        )),
        1
    );
    assert_eq!(
        code(&fracinv(&["run", "--config", "noisy_plain.cfg"], p)),
        2
    );
    assert_eq!(code(&fracinv(&["run", "--config", "missing.cfg"], p)), 3);
    assert_eq!(
        code(&fracinv(
            &["run", "--config", "ok.cfg", "--out", "blocker/x"],
            p
        )),
        3
    );
}

#[test]
fn empty_sweep_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "").unwrap();
    let out = fracinv(
        &[
            "sweep", "--config", "s.cfg", "--param", "alpha", "--values", "", "--out", "none",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("none").exists());
}

#[test]
fn check_suites_report_each_predicate() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["fraccalc", "forward", "rci"] {
        let out = fracinv(&["check", "--suite", suite], dir.path());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(code(&out), 0, "{suite}: {stdout}");
        assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
    }
    // the residual on the reference mesh sits above its target, which the
    // suite must surface as a failure
    let out = fracinv(&["check", "--suite", "duhamel"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 2);
    assert_eq!(code(&out), if stdout.contains("FAIL") { 2 } else { 0 });
}
