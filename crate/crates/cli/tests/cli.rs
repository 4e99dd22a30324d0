use std::path::Path;
use std::process::{Command, Output};

fn oqdrive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oqdrive"))
        .args(args)
        .output()
        .expect("run oqdrive")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const UTILITIES: &str = "[utilities]
a1s = 85
b1s = 75
c1s = 40
d1s = 50
a1d = 25
b1d = 30
c1d = 75
d1d = 85
a2s = 85
b2s = 50
c2s = 85
d2s = 50
a2d = 25
b2d = 60
c2d = 25
d2d = 85
";

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn validate_default_passes() {
    let o = oqdrive(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("0 failed"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn injected_fault_is_located() {
    let o = oqdrive(&["validate", "--inject-fault", "3,0,8"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let line = out
        .lines()
        .find(|l| l.starts_with("FAIL"))
        .expect("a failing check");
    assert!(line.contains("generator_closed_form"), "{line}");
    assert!(line.contains("entry (33, 41) in block A_3"), "{line}");
}

#[test]
fn nonpositive_driver_utility_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &UTILITIES.replace("b2d = 60", "b2d = 0"));
    for cmd in ["validate", "pure-sweep", "mixed-sweep", "equilibrium"] {
        let mut args = vec![cmd, "--config", &cfg];
        if cmd == "equilibrium" {
            args.extend(["--p", "0.5", "--q", "0.5"]);
        }
        let o = oqdrive(&args);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("utilities.b2d"), "{}", stderr(&o));
    }
}

#[test]
fn malformed_config_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_config(dir.path(), &UTILITIES.replace("c1s = 40\n", ""));
    let o = oqdrive(&["pure-sweep", "--config", &missing]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c1s"));

    let o = oqdrive(&["pure-sweep", "--grid-step", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid.step"));

    let o = oqdrive(&["pure-sweep", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_failures_are_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = oqdrive(&["pure-sweep", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(o.status.code(), Some(3));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out");
    let o = oqdrive(&["pure-sweep", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains(target.to_str().unwrap()));
}

#[test]
fn pure_sweep_outputs_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg_body = format!("format = \"csv\"\n{UTILITIES}[grid]\nstep = 0.02\n");
    cfg_body.push_str("[cognition]\nalpha = 0.5\nlambda = 2\n");
    let cfg = write_config(dir.path(), &cfg_body);
    let out = dir.path().join("run");
    let o = oqdrive(&[
        "pure-sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--grid-step",
        "0.1",
        "--alpha",
        "0.2",
        "--lambda",
        "10",
        "--format",
        "both",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("pure.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "p,q,eq_count,eq1_car,eq1_driver,eq2_car,eq2_driver,flags"
    );
    assert_eq!(lines.len(), 1 + 11 * 11);
    assert!(lines.contains(&"0.9,0.9,1,N,C,,,"));
    assert!(lines.contains(&"0.1,0.1,1,A,S,,,"));
    let summary = std::fs::read_to_string(out.join("pure_summary.txt")).unwrap();
    assert!(summary.contains("alpha: 0.2  lambda: 10  grid_step: 0.1"));
    let ppm = std::fs::read(out.join("pure.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n88 88\n255\n"));
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["mixed-sweep", "pure-sweep"] {
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(format!("{sub}-{run}"));
            let o = oqdrive(&[sub, "--alpha", "0.8", "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
            let name = if sub == "mixed-sweep" {
                "mixed.csv"
            } else {
                "pure.csv"
            };
            outputs.push(std::fs::read(out.join(name)).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{sub}");
    }
}

#[test]
fn agnostic_and_mixed_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = oqdrive(&[
        "pure-sweep",
        "--agnostic",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("agnostic_summary.txt")).unwrap();
    assert!(summary.contains("mode: agnostic"));
    assert!(summary.contains("  0.3: 0.5 0.49 A->N"));

    let o = oqdrive(&[
        "mixed-sweep",
        "--alpha",
        "0.8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("mixed.csv")).unwrap();
    assert!(csv.starts_with("p,q,pc_star,pa_star,exists,flags\n"));
    assert!(csv.contains("\n0,0,,,0,\n"));
    assert!(csv
        .lines()
        .skip(1)
        .any(|l| l.split(',').nth(4) == Some("1")));

    let o = oqdrive(&["mixed-sweep", "--agnostic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evolve_writes_series() {
    let o = oqdrive(&[
        "evolve", "--p", "0.9", "--pa", "0", "--t-max", "200", "--steps", "40",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,pr_continue,pr_continue_closed_form");
    assert_eq!(lines.len(), 42);
    assert_eq!(lines[1], "0,0.5,0.5");
    assert_eq!(lines[41], "200,0.506086,0.506086");

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("series.csv");
    let o = oqdrive(&[
        "evolve",
        "--p",
        "0.5",
        "--pa",
        "1",
        "--steps",
        "5",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(file).unwrap().lines().count(), 7);

    let o = oqdrive(&["evolve", "--p", "1.5", "--pa", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn equilibrium_at_a_point() {
    let o = oqdrive(&["equilibrium", "--p", "0.9", "--q", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("pure: (N, C)"), "{out}");
    assert!(out.contains("agnostic: (N, C)"));

    let o = oqdrive(&["equilibrium", "--alpha", "0", "--p", "0.5", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("undefined"));
}
