use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn phasefield(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasefield")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn bundled(name: &str, cwd: &Path) -> String {
    let o = phasefield(&["scenarios", "show", name], cwd);
    assert_eq!(code(&o), 0);
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let o = phasefield(&["run", "--scenario", "stefan_random", "--out", run], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["trajectory.csv", "energy.csv", "report.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file} differs between runs");
    }
}

#[test]
fn seed_changes_random_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    phasefield(&["run", "--scenario", "stefan_random", "--out", "a"], dir.path());
    phasefield(&["run", "--scenario", "stefan_random", "--seed", "99", "--out", "b"], dir.path());
    let a = fs::read(dir.path().join("a/trajectory.csv")).unwrap();
    let b = fs::read(dir.path().join("b/trajectory.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn run_from_config_file_with_method_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("heat.toml"), bundled("heat_decay", dir.path())).unwrap();
    let o = phasefield(&["run", "--config", "heat.toml", "--method", "rk4", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = fs::read_to_string(dir.path().join("o/report.json")).unwrap();
    assert!(report.contains("\"method\": \"rk4\""));
    assert!(!report.contains("wall_seconds"));
    let o = phasefield(&["run", "--config", "heat.toml", "--timing", "--out", "t"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dir.path().join("t/report.json")).unwrap().contains("wall_seconds"));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = bundled("zero", dir.path()).replace("n = 8", "n = ");
    fs::write(dir.path().join("bad.toml"), broken).unwrap();
    let o = phasefield(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(code(&phasefield(&["run", "--scenario", "missing"], dir.path())), 2);
    // the contraction sweep needs alpha equal to the latent heat
    let o = phasefield(&["sweep", "--scenario", "tanh_front", "--axis", "contraction-delta"], dir.path());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn failed_certificates_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let strict = bundled("regular_sign", dir.path()).replace("zeta_bound = 1.0", "zeta_bound = 0.5");
    fs::write(dir.path().join("strict.toml"), strict).unwrap();
    let o = phasefield(&["run", "--config", "strict.toml", "--out", "o"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL zeta-bound"));
    assert!(dir.path().join("o/report.json").exists());
}

#[test]
fn blow_up_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = bundled("heat_decay", dir.path()).replace("samples = 50", "samples = 50\nmax_norm = 1e-3");
    fs::write(dir.path().join("tiny.toml"), tiny).unwrap();
    let o = phasefield(&["run", "--config", "tiny.toml"], dir.path());
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}

#[test]
fn sweep_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = phasefield(
        &["--threads", "2", "sweep", "--scenario", "tanh_front", "--axis", "n-ladder", "--values", "8,16,32", "--out", "s"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("s/sweep.json").exists());
}

#[test]
fn selftest_and_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = phasefield(&["graph-selftest", "--out", "st"], dir.path());
    assert_eq!(code(&o), 0);
    let table = fs::read_to_string(dir.path().join("st/selftest.tsv")).unwrap();
    assert!(table.starts_with("subject\tproperty"));
    assert!(!table.contains("FAIL"));
    let o = phasefield(&["scenarios", "list"], dir.path());
    let listing = String::from_utf8(o.stdout).unwrap();
    for name in ["heat_decay", "zero", "obstacle_sign", "tanh_front", "contraction"] {
        assert!(listing.contains(name));
    }
}
