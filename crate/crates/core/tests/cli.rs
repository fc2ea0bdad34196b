use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crnoma(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crnoma"));
    cmd.args(args).env_remove("CRNOMA_OUT_DIR");
    cmd
}

fn ok(mut cmd: Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn greedy_det2(out: &Path, extra: &[&str]) -> Command {
    let mut args = vec!["run", "--scenario", "det2", "--policy", "greedy", "--episodes", "4", "--out"];
    args.push(out.to_str().unwrap());
    args.extend_from_slice(extra);
    crnoma(&args)
}

#[test]
fn lists_builtin_scenarios() {
    let out = ok(crnoma(&["list-scenarios"]));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["det2", "const-fading-M2", "const-fading-M10", "tv-fading-M2", "tv-fading-M10"] {
        assert!(text.contains(name), "{name} missing from:\n{text}");
    }
}

#[test]
fn run_writes_reproducible_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out = ok(greedy_det2(a.path(), &[]));
    ok(greedy_det2(b.path(), &[]));
    let file = "det2_greedy_seed0.csv";
    let first = fs::read_to_string(a.path().join(file)).unwrap();
    assert_eq!(first, fs::read_to_string(b.path().join(file)).unwrap());
    assert_eq!(first.lines().count(), 5);
    assert!(String::from_utf8(out.stdout).unwrap().contains("det2 greedy seed 0"));
}

#[test]
fn several_policies_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    ok(crnoma(&[
        "run", "--scenario", "det2", "--policy", "greedy,random,oracle", "--seed", "3,4", "--episodes", "2",
        "--out", dir.path().to_str().unwrap(),
    ]));
    for p in ["greedy", "random", "oracle"] {
        for s in [3, 4] {
            assert!(dir.path().join(format!("det2_{p}_seed{s}.csv")).exists());
        }
    }
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = crnoma(&["run", "--scenario", "det2", "--policy", "random", "--episodes", "2"]);
    cmd.env("CRNOMA_OUT_DIR", dir.path());
    ok(cmd);
    assert!(dir.path().join("det2_random_seed0.csv").exists());
}

#[test]
fn config_file_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("override.toml");
    fs::write(&cfg, "battery_capacity = 0.01\n").unwrap();
    let base = dir.path().join("base");
    let over = dir.path().join("over");
    ok(greedy_det2(&base, &[]));
    ok(greedy_det2(&over, &["--config", cfg.to_str().unwrap()]));
    let file = "det2_greedy_seed0.csv";
    assert_ne!(fs::read_to_string(base.join(file)).unwrap(), fs::read_to_string(over.join(file)).unwrap());
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = crnoma(&["run", "--scenario", "det2", "--policy", "telepathy", "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = crnoma(&["run", "--scenario", "nowhere", "--out", dir.path().to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "no_such_field = 1\n").unwrap();
    let out = greedy_det2(dir.path(), &["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checkpoint_is_written_for_ddpg() {
    let dir = tempfile::tempdir().unwrap();
    ok(crnoma(&[
        "run", "--scenario", "det2", "--episodes", "2", "--checkpoint", "--out", dir.path().to_str().unwrap(),
    ]));
    let params = crnoma::ddpg::checkpoint::load_from_path(&dir.path().join("det2_ddpg_seed0.ckpt")).unwrap();
    assert!(params.actor.net.is_finite());
}

#[test]
fn verify_passes() {
    let out = ok(crnoma(&["verify"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8);
}
