use std::fs;
use std::process::{Command, Output};

fn csflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn zoo_list_shows_every_family() {
    let out = csflow(&["zoo", "list"]);
    assert!(out.status.success());
    for f in csflow_core::zoo::CATALOGUE {
        assert!(stdout(&out).contains(f.name), "{}", f.name);
    }
}

#[test]
fn emitted_snapshots_can_be_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eight.json");
    let p = path.to_str().unwrap();
    let out = csflow(&["zoo", "emit", "figure_eight_lift", "--param", "eps=0.3", "--n", "64", "--out", p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let check = csflow(&["check", p, "--all"]);
    assert!(check.status.success());
    let text = stdout(&check);
    assert!(text.contains("dim 3 samples 64"), "{text}");
    assert!(text.contains("uniformly_convex true"), "{text}");
    assert!(text.contains("slopes xyz0"), "{text}");
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[curve]\nfamily = \"circle\"\n[stop]\ndiameter_min = -1\n").unwrap();
    let out = csflow(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    assert_eq!(csflow(&["run", dir.path().join("none.toml").to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(csflow(&["report", dir.path().to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(csflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(csflow(&["zoo", "emit", "spiral"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    let out_dir = dir.path().join("out");
    // Stopping on the step budget fails the shrink-to-a-point verdict.
    fs::write(
        &cfg,
        format!(
            "[curve]\nfamily = \"ellipse\"\nn = 48\n[stop]\nmax_steps = 40\n[checks]\ntriple_budget = 2000\n\
             [output]\ndir = {:?}\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = csflow(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("step_budget"));
    let report = csflow(&["report", out_dir.to_str().unwrap()]);
    assert!(report.status.success());
    assert!(stdout(&report).contains("shrinks to a point"));
    assert!(csflow(&["plot", out_dir.to_str().unwrap(), "--frames", "2"]).status.success());
}
