//! End-to-end tests of the `tropfiber` binary: exit codes, report text,
//! JSON round-trips, determinism, and SVG structure.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tropfiber::tropical::PLComplex;
use tropfiber::Rat;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropfiber"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn r(n: i64, d: i64) -> Rat {
    Rat::ratio(n, d)
}

#[test]
fn validate_examples_pass() {
    for name in ["cp2.json", "blowup1.json", "blowup2a.json", "blowup2b.json"] {
        let out = run(&["validate", data(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert!(stdout(&out).contains("valid"));
    }
}

#[test]
fn validate_rejects_non_primitive_normal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("np.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"facets":[{"normal":[2,0],"offset":"0"},{"normal":[0,1],"offset":"0"},{"normal":[-1,-1],"offset":"-1"}]}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("non-primitive normal at facet 1"));
}

#[test]
fn truncated_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"dim\":2,\"face").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn detect_blowup2a_is_the_segment() {
    let out = run(&["detect", data("blowup2a.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let c: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(c.cells.len(), 1);
    assert_eq!(c.cells[0].dim_cell, 1);
    assert!(c.contains_point(&[r(5, 16), r(1, 4)]));
    assert!(!c.contains_point(&[r(1, 2), r(1, 4)]));
}

#[test]
fn detect_blowup2b_is_the_two_points() {
    let out = run(&["detect", data("blowup2b.json").to_str().unwrap()]);
    let c: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        c.isolated_points(),
        vec![vec![r(1, 1), r(1, 1)], vec![r(3, 1), r(5, 2)]]
    );
}

#[test]
fn detect_json_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("out.json");
    let out = run(&[
        "detect",
        data("cp2.json").to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let from_file: PLComplex =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let from_stdout: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(from_file, from_stdout);
    assert_eq!(from_file.isolated_points(), vec![vec![r(1, 3), r(1, 3)]]);
}

#[test]
fn trop_zero_direction_is_full_space() {
    let out = run(&["trop", data("cp2.json").to_str().unwrap(), "--m", "0,0"]);
    let c: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(c.cells.len(), 1);
    assert_eq!(c.cells[0].dim_cell, 2);
}

#[test]
fn malformed_direction_is_a_parse_error() {
    let out = run(&["trop", data("cp2.json").to_str().unwrap(), "--m", "1,x"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["trop", data("cp2.json").to_str().unwrap(), "--m", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn member_reports_per_direction_verdicts() {
    let file = data("blowup2a.json");
    let out = run(&["member", file.to_str().unwrap(), "--u", "5/16,1/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("strongly bulk-balanced: true"));

    let out = run(&["member", file.to_str().unwrap(), "--u", "1/2,1/4"]);
    let text = stdout(&out);
    assert!(text.contains("m = (1, 0): false"));
    assert!(text.contains("strongly bulk-balanced: false"));

    let out = run(&["member", file.to_str().unwrap(), "--u", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn member_single_direction() {
    let out = run(&[
        "member",
        data("blowup2b.json").to_str().unwrap(),
        "--u",
        "3,5/2",
        "--m",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("m = (1, 0): true"));
}

#[test]
fn leading_term_reports() {
    let out = run(&[
        "leading-term",
        data("cp2.json").to_str().unwrap(),
        "--u",
        "1/3,1/3",
    ]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text.matches("= 0").count(), 2);
    assert!(text.contains("verdict: solvable over the torus"));

    let out = run(&[
        "leading-term",
        data("blowup2a.json").to_str().unwrap(),
        "--u",
        "1/2,1/4",
    ]);
    assert!(stdout(&out).contains("verdict: not solvable over the torus"));

    let out = run(&[
        "leading-term",
        data("blowup2a.json").to_str().unwrap(),
        "--u",
        "0,1/4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn balanced_lists_isolated_points() {
    let out = run(&["balanced", data("cp2.json").to_str().unwrap()]);
    assert_eq!(stdout(&out), "(1/3, 1/3)\n");
}

#[test]
fn hausdorff_identical_files_bracket_zero() {
    let file = data("blowup2a.json");
    let out = run(&[
        "hausdorff",
        file.to_str().unwrap(),
        file.to_str().unwrap(),
        "--tol",
        "1/1000000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lower: Rat = text.lines().next().unwrap()[8..].parse().unwrap();
    let upper: Rat = text.lines().nth(1).unwrap()[8..].parse().unwrap();
    assert!(lower <= r(0, 1) && r(0, 1) <= upper);
    assert!(&upper - &lower <= r(1, 1000000));
}

#[test]
fn converge_upper_bounds_decrease() {
    let out = run(&[
        "converge",
        data("blowup2a.json").to_str().unwrap(),
        "--facet",
        "1",
        "--m",
        "1,0",
        "--steps",
        "6",
        "--tol",
        "1/100000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let uppers: Vec<Rat> = stdout(&out)
        .lines()
        .skip(1)
        .map(|line| line.split("  ").nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(uppers.len(), 6);
    assert!(uppers.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = run(&["detect", data("blowup2b.json").to_str().unwrap()]);
    let b = run(&["detect", data("blowup2b.json").to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn svg_has_one_path_per_facet_and_cell() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("fig.svg");
    let out = run(&[
        "detect",
        data("blowup2a.json").to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<g").count(), svg.matches("</g>").count());
    // 5 facets of the polygon, one path each.
    assert_eq!(svg.matches("class=\"facet\"").count(), 5);
    // One path per cell across the three primary tropicalizations plus the
    // emphasized detection locus.
    let d: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    let cell_paths = svg.matches("class=\"cell\"").count();
    assert!(cell_paths >= d.cells.len() + 3);

    let out = run(&["render", data("cp2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "render without --svg must fail");
}

#[test]
fn trop_poly_computes_a_tropical_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"terms":[["0",[1,0]],["0",[0,1]],["0",[0,0]]]}"#,
    )
    .unwrap();
    let out = run(&["trop-poly", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let c: PLComplex = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(c.cells.len(), 3);
    assert!(c.contains_point(&[r(0, 1), r(0, 1)]));
    assert!(c.contains_point(&[r(-2, 1), r(-2, 1)]));
    assert!(!c.contains_point(&[r(1, 1), r(2, 1)]));
}
