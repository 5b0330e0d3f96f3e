use std::path::Path;
use std::process::{Command, Output};

fn tp_stokes(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tp-stokes"))
        .current_dir(dir)
        .env("TP_STOKES_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn zero_data_solves_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = tp_stokes(dir.path(), &["solve", "--out", "z", "--resolution-scale", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["manifest.json", "timings.json", "velocity.field", "residuals.csv"] {
        assert!(dir.path().join("z").join(f).is_file(), "{f}");
    }
}

#[test]
fn unknown_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", "version = 1\n[problem]\ntime_mode = 4\n");
    let out = tp_stokes(dir.path(), &["solve", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time_mode"));
}

#[test]
fn action_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.toml", "version = 1\naction = \"besov\"\n");
    assert_eq!(tp_stokes(dir.path(), &["solve", "--config", "a.toml"]).status.code(), Some(2));
}

#[test]
fn normal_boundary_flux_at_zero_frequency_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.toml",
        r#"version = 1
[problem]
time_modes = 8
tangential = 32
[data]
generator = "modes"
[[data.modes]]
slot = "boundary"
component = 1
time = 1
tangential = [0]
amplitude = [1.0, 0.0]
rate = 1.0
coeffs = [1.0]
"#,
    );
    let out = tp_stokes(dir.path(), &["solve", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn manifests_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.toml",
        "version = 1\n[problem]\ntime_modes = 8\ntangential = 32\n[data]\ngenerator = \"manufactured\"\nrecipe = \"swirl\"\n",
    );
    for o in ["a", "b"] {
        let out = tp_stokes(dir.path(), &["solve", "--config", "m.toml", "--out", o]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a/manifest.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/manifest.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flipped_boundary_pressure_fails_the_oracle_suite() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "v.toml", "version = 1\n[verify]\nsuites = [\"oracle\"]\n");
    let good = tp_stokes(dir.path(), &["verify", "--config", "v.toml", "--out", "g"]);
    assert_eq!(good.status.code(), Some(0), "{}", String::from_utf8_lossy(&good.stdout));
    let bad = tp_stokes(dir.path(), &["verify", "--config", "v.toml", "--out", "p", "--perturb-q0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL oracle"));
}
