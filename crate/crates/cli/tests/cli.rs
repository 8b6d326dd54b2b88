use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn pilotwave(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotwave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

const SHORT: [&str; 4] = ["--set", "sim.t_max=20", "--set", "sim.stride=64"];

#[test]
fn quiet_memoryless_walker_writes_zeros() {
    let dir = TempDir::new().unwrap();
    let o = pilotwave(
        dir.path(),
        &["simulate", "--set", "model.alpha=0", "--set", "model.sigma=0", "--set", "sim.t_max=10"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("run_trajectory.csv");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,x,y,vx,vy\n"));
    let rows = rows(&path);
    assert_eq!(rows.len(), 10 * 64 / 16 + 1);
    assert!(rows.iter().all(|r| r[1..].iter().all(|&v| v == 0.0)));
    let err = stderr(&o);
    assert!(err.contains("truncation bound") && err.contains(" s"), "{err}");
}

#[test]
fn non_positive_step_is_a_config_error_naming_the_key() {
    let dir = TempDir::new().unwrap();
    for dt in ["0", "-0.01"] {
        let o = pilotwave(dir.path(), &["simulate", "--set", &format!("sim.dt={dt}")]);
        assert_eq!(code(&o), 2);
        assert!(stderr(&o).contains("sim.dt"), "{}", stderr(&o));
    }
    assert!(!dir.path().join("run_trajectory.csv").exists());
}

#[test]
fn reference_run_has_one_row_per_stride() {
    let dir = TempDir::new().unwrap();
    let o = pilotwave(dir.path(), &[&["simulate"][..], &SHORT].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // t_max / (dt stride) + 1 = 20 / (64 / 64) + 1
    let rows = rows(&dir.path().join("run_trajectory.csv"));
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    assert_eq!(rows[20][0], 20.0);
}

#[test]
fn seed_flag_changes_the_run_and_the_config_seed_is_reproduced() {
    let run = |extra: &[&str]| {
        let dir = TempDir::new().unwrap();
        let o = pilotwave(dir.path(), &[&["simulate"][..], &SHORT, extra].concat());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(dir.path().join("run_trajectory.csv")).unwrap()
    };
    let base = run(&[]);
    assert_eq!(base, run(&[]));
    assert_eq!(base, run(&["--seed", "1"]));
    assert_ne!(base, run(&["--seed", "2"]));
}

#[test]
fn saved_config_reproduces_the_run() {
    let first = TempDir::new().unwrap();
    let o = pilotwave(first.path(), &[&["simulate", "--seed", "5"][..], &SHORT].concat());
    assert_eq!(code(&o), 0);
    let saved = first.path().join("run_config.toml");

    let second = TempDir::new().unwrap();
    let o = pilotwave(second.path(), &["simulate", "--config", saved.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(first.path().join("run_trajectory.csv")).unwrap(),
        fs::read(second.path().join("run_trajectory.csv")).unwrap()
    );
    let without_dir = |p: &Path| {
        let text = fs::read_to_string(p).unwrap();
        text.lines().filter(|l| !l.starts_with("output.dir")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(without_dir(&saved), without_dir(&second.path().join("run_config.toml")));
}

#[test]
fn verify_accepts_the_reference_model_and_rejects_the_unshifted_potential() {
    let dir = TempDir::new().unwrap();
    let o = pilotwave(dir.path(), &["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("lambda"));

    let o = pilotwave(dir.path(), &["verify", "--set", "model.potential.shift=0"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn orbit_reports_the_reference_orbit_and_none_without_memory() {
    let dir = TempDir::new().unwrap();
    let o = pilotwave(dir.path(), &["orbit"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let found = rows(&dir.path().join("run_orbit.csv"));
    assert_eq!(found.len(), 1);
    assert!((found[0][0] - 0.920_391_86).abs() < 1e-6 && found[0][2] < 1e-10);

    let o = pilotwave(dir.path(), &["orbit", "--set", "model.alpha=0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "r0,omega,residual\n");
    assert_eq!(fs::read_to_string(dir.path().join("run_orbit.csv")).unwrap(), "r0,omega,residual\n");
}

#[test]
fn coupling_needs_matching_anchors() {
    let dir = TempDir::new().unwrap();
    let args = [
        "couple",
        "--set",
        "couple.past_b.variant=constant",
        "--set",
        "couple.past_b.x=1",
    ];
    let o = pilotwave(dir.path(), &[&args[..], &SHORT].concat());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("precondition"), "{}", stderr(&o));

    let o = pilotwave(dir.path(), &[&["couple"][..], &SHORT].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = rows(&dir.path().join("run_couple_a.csv"));
    let b = rows(&dir.path().join("run_couple_b.csv"));
    assert_eq!(a[0], b[0]);
    assert!(stderr(&o).contains("L1 distance"));
}

#[test]
fn pdf_of_a_stored_trajectory_is_normalized() {
    let dir = TempDir::new().unwrap();
    let o = pilotwave(dir.path(), &[&["simulate"][..], &SHORT].concat());
    assert_eq!(code(&o), 0);
    let traj = dir.path().join("run_trajectory.csv");
    let o = pilotwave(
        dir.path(),
        &["pdf", "--input", traj.to_str().unwrap(), "--set", "stats.bins=20", "--set", "stats.r_max=2"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join("run_pdf.csv");
    assert!(fs::read_to_string(&path).unwrap().starts_with("r_lo,r_hi,density\n"));
    let bins = rows(&path);
    assert_eq!(bins.len(), 20);
    let mass: f64 = bins.iter().map(|b| (b[1] - b[0]) * b[2]).sum();
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn moments_writes_the_series_and_the_structure_function() {
    let dir = TempDir::new().unwrap();
    let args = ["moments", "--set", "stats.ensemble=3", "--set", "sim.stride=16", "--set", "sim.t_max=60"];
    let o = pilotwave(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let series = rows(&dir.path().join("run_moments.csv"));
    assert_eq!(series.len(), 60 * 4 + 1);
    assert!(series.iter().all(|r| r[1] >= 0.0 && r[2] >= 0.0));
    let sf = fs::read_to_string(dir.path().join("run_structure.csv")).unwrap();
    let mut lines = sf.lines();
    assert!(lines.next().unwrap().starts_with("# slope_x="));
    assert_eq!(lines.next(), Some("lag,sx4,sv4"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn tabulated_past_is_read_from_a_file() {
    let dir = TempDir::new().unwrap();
    let past = dir.path().join("past.csv");
    fs::write(&past, "t,x,y,vx,vy\n-1,0.5,0,0,0\n-0.5,0.5,0,0,0\n0,0.5,0,0,0\n").unwrap();
    let args = [
        "simulate",
        "--set",
        "past.variant=tabulated",
        "--set",
        &format!("past.file=\"{}\"", past.display()),
        "--set",
        "past.extension=constant",
    ];
    let o = pilotwave(dir.path(), &[&args[..], &SHORT].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(rows(&dir.path().join("run_trajectory.csv"))[0][1], 0.5);

    // without an extension the samples do not reach back over the window
    let o = pilotwave(dir.path(), &[&args[..5], &SHORT].concat());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn file_problems_exit_with_code_5() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.toml");
    let o = pilotwave(dir.path(), &["verify", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 5);

    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "not a directory").unwrap();
    let o = pilotwave(&blocker.join("sub"), &["orbit"]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));

    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "a,b\n1,2\n").unwrap();
    let o = pilotwave(dir.path(), &["pdf", "--input", garbage.to_str().unwrap()]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&pilotwave(dir.path(), &["fly"])), 2);
    assert_eq!(code(&pilotwave(dir.path(), &["simulate", "--set", "nonsense"])), 2);
    let o = pilotwave(dir.path(), &["simulate", "--set", "model.bogus=1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("model.bogus"));
}
