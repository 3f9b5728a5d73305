//! End-to-end tests of the command-line surface: exit codes, formats, and
//! output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::atomic::{AtomicU32, Ordering};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dhgls"))
}

static DIR_COUNTER: AtomicU32 = AtomicU32::new(0);

fn scratch_dir() -> PathBuf {
    let id = DIR_COUNTER.fetch_add(1, Ordering::SeqCst);
    let dir = std::env::temp_dir().join(format!("dhgls-cli-test-{}-{}", std::process::id(), id));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn cp2_polytope_json() -> &'static str {
    r#"{
  "torus_dim": 2,
  "polytope": {
    "normals": [[1, 0], [0, 1], [-1, -1]],
    "offsets": ["0", "0", "1"]
  },
  "eta": [1, 2]
}"#
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn density_prints_exact_rationals() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let spec = spec.to_str().unwrap();

    let out = run(&["--spec", spec, "density", "--point", "1/4 1/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "1");

    let out = run(&["--spec", spec, "density", "--point", "2 1/2"]);
    assert_eq!(stdout_of(&out).trim(), "0");

    let out = run(&["--spec", spec, "density", "--point", "0 0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "WALL");

    let out = run(&["--spec", spec, "density", "--point", "0 0", "--strict"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn non_generic_eta_exits_2_with_offending_weight() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let out = run(&["--spec", spec.to_str().unwrap(), "--eta", "1 1", "polarize"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("non-generic polarizing vector"), "{err}");
    assert!(err.contains("(1, -1)") || err.contains("(-1, 1)"), "{err}");
}

#[test]
fn empty_fixed_points_give_empty_report() {
    let dir = scratch_dir();
    let spec = write_spec(
        &dir,
        "empty.json",
        r#"{"torus_dim": 2, "fixed_points": [], "eta": [1, 2]}"#,
    );
    let out = run(&["--spec", spec.to_str().unwrap(), "polarize"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).trim(), "");
}

#[test]
fn problem_can_come_from_stdin() {
    let mut child = bin()
        .args(["density", "--point", "1/4 1/4"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(cp2_polytope_json().as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
}

#[test]
fn check_identity_exit_codes() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let spec = spec.to_str().unwrap();

    let ok = run(&[
        "--spec",
        spec,
        "check-identity",
        "--grid-step",
        "1/5",
        "--bounds",
        "-1 2 -1 2",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout_of(&ok).contains("mismatches=0"));

    let bad = run(&[
        "--spec",
        spec,
        "check-identity",
        "--grid-step",
        "1/5",
        "--bounds",
        "-1 2 -1 2",
        "--flip-sign",
        "0",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!stdout_of(&bad).contains("mismatches=0"));
}

#[test]
fn grid_csv_is_byte_deterministic() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let spec = spec.to_str().unwrap();
    let out1 = dir.join("a.csv");
    let out2 = dir.join("b.csv");
    for (path, _) in [(&out1, 0), (&out2, 1)] {
        let out = run(&[
            "--spec",
            spec,
            "grid",
            "--grid-step",
            "1/7",
            "--bounds",
            "-1 2 -1 2",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(&out1).unwrap();
    let b = fs::read(&out2).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("x1,x2,density,regular\n"));
    assert!(!text.contains('\r'));
    // wall rows carry an empty density column
    assert!(text.lines().any(|l| l.ends_with(",,0")));
}

#[test]
fn empty_grid_bounds_write_header_only() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let out_path = dir.join("empty.csv");
    let out = run(&[
        "--spec",
        spec.to_str().unwrap(),
        "grid",
        "--grid-step",
        "1/2",
        "--bounds",
        "1 0 1 0",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&out_path).unwrap(),
        "x1,x2,density,regular\n"
    );
}

#[test]
fn grouped_grid_writes_one_csv_per_group() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let out_path = dir.join("fig2.csv");
    let out = run(&[
        "--spec",
        spec.to_str().unwrap(),
        "grid",
        "--grid-step",
        "1/4",
        "--bounds",
        "-1 2 -1 2",
        "--output",
        out_path.to_str().unwrap(),
        "--group-eta",
        "1 1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let g0 = dir.join("fig2.group0.csv");
    let g1 = dir.join("fig2.group1.csv");
    assert!(g0.exists() && g1.exists());
    let report = stdout_of(&out);
    assert!(report.contains("group 0: pairing 0"));
    assert!(report.contains("group 1: pairing 1"));
    // the grouped summand over the slant edge is negative above it
    let text = fs::read_to_string(&g1).unwrap();
    assert!(
        text.lines().any(|l| l.starts_with("1/2,3/4,-1,")),
        "expected a -1 cell in the grouped output:\n{text}"
    );
}

#[test]
fn toric_data_round_trips_through_a_problem_file() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let exported = dir.join("points.json");
    let out = run(&[
        "--spec",
        spec.to_str().unwrap(),
        "toric-data",
        "--output",
        exported.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("unimodular: true"));

    // the exported fixed-point file must give the same densities
    for point in ["1/4 1/4", "2 1/2", "5/7 1/7"] {
        let a = run(&[
            "--spec",
            spec.to_str().unwrap(),
            "density",
            "--point",
            point,
        ]);
        let b = run(&[
            "--spec",
            exported.to_str().unwrap(),
            "density",
            "--point",
            point,
        ]);
        assert_eq!(stdout_of(&a), stdout_of(&b), "at {point}");
    }
}

#[test]
fn subtorus_flag_restricts_the_problem() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let spec = spec.to_str().unwrap();
    // restrict along the circle t -> (t, 2t); density on (0,1) is x/2
    let out = run(&[
        "--spec",
        spec,
        "--subtorus",
        "1; 2",
        "--eta",
        "1",
        "density",
        "--point",
        "3/7",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_of(&out).trim(), "3/14");

    let sweep = run(&[
        "--spec",
        spec,
        "--subtorus",
        "1; 2",
        "--eta",
        "1",
        "check-identity",
        "--grid-step",
        "1/17",
        "--bounds",
        "-1 3",
    ]);
    assert_eq!(sweep.status.code(), Some(0));
    assert!(stdout_of(&sweep).contains("mismatches=0"));
}

#[test]
fn mc_reports_wall_with_exit_3() {
    let dir = scratch_dir();
    let spec = write_spec(&dir, "cp2.json", cp2_polytope_json());
    let out = run(&[
        "--spec",
        spec.to_str().unwrap(),
        "mc",
        "--point",
        "0 0",
        "--samples",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_of(&out).trim(), "WALL");
}

#[test]
fn mc_is_reproducible_for_a_fixed_seed() {
    let dir = scratch_dir();
    let spec = write_spec(
        &dir,
        "cone.json",
        r#"{
  "torus_dim": 2,
  "fixed_points": [
    {"point": ["0", "0"], "weights": [[1, 0], [0, 1], [1, 1]]}
  ],
  "eta": [1, 2]
}"#,
    );
    let args = [
        "--spec",
        spec.to_str().unwrap(),
        "mc",
        "--point",
        "1/2 2",
        "--samples",
        "200000",
        "--seed",
        "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout_of(&a), stdout_of(&b));
    assert!(stdout_of(&a).contains("exact 1/2"));
}
