use std::fs;
use std::path::{Path, PathBuf};

use dispersal::cli::{run, table_io::CsvDoc, ExitStatus};
use tempfile::TempDir;

fn dispersal(args: &[&str]) -> ExitStatus {
    run(std::iter::once("dispersal").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_doc(p: &Path) -> CsvDoc {
    CsvDoc::parse(&fs::read_to_string(p).unwrap()).unwrap()
}

fn meta_f64(doc: &CsvDoc, key: &str) -> f64 {
    doc.get_meta(key).unwrap().parse().unwrap()
}

fn sweep_csv(dir: &TempDir, args: &[&str]) -> (ExitStatus, PathBuf) {
    let out = dir.path().join("sweep.csv");
    let mut full = vec!["sweep"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&out)]);
    (dispersal(&full), out)
}

#[test]
fn solve_manufactured_case_reproduces_capacity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pk.csv");
    let status = dispersal(&["solve", "--example", "pk_manufactured", "--d", "1.0", "--out", path_str(&out)]);
    assert_eq!(status, ExitStatus::SUCCESS);
    let doc = read_doc(&out);
    assert_eq!(doc.columns, ["x", "u", "K", "P", "r", "residual"]);
    assert_eq!(doc.rows.len(), 513);
    let u = doc.column("u").unwrap();
    let k = doc.column("K").unwrap();
    let gap = u.iter().zip(&k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap <= 1e-10, "max |u-K| = {gap}");
    assert!((meta_f64(&doc, "M") - meta_f64(&doc, "intK")).abs() <= 1e-8);
}

#[test]
fn solve_proportional_case_exceeds_capacity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex44.csv");
    let status = dispersal(&["solve", "--example", "ex4.4", "--d", "1.0", "--out", path_str(&out)]);
    assert_eq!(status, ExitStatus::SUCCESS);
    let doc = read_doc(&out);
    assert!(meta_f64(&doc, "M") > 2.0);
    assert!(meta_f64(&doc, "residual_norm") <= 1e-8);
    assert!(doc.column("u").unwrap().iter().all(|&v| v > 0.0));
}

#[test]
fn nonpositive_dispersal_rate_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bad.csv");
    for d in ["-1", "0"] {
        let status = dispersal(&["solve", "--example", "ex4.4", "--d", d, "--out", path_str(&out)]);
        assert_eq!(status, ExitStatus::CONFIG);
    }
    assert!(!out.exists());
}

#[test]
fn unknown_example_and_bad_flags_are_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sweep_csv(&dir, &["--example", "ex9.9"]).0, ExitStatus::CONFIG);
    assert_eq!(dispersal(&["sweep", "--bogus"]), ExitStatus::CONFIG);
    assert_eq!(dispersal(&["verify"]), ExitStatus::CONFIG);
}

#[test]
fn scenario_file_with_invalid_capacity_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "name = bad\nK = \"cos(pi*x)\"\nP = \"1\"\nr = \"1\"\n").unwrap();
    let (status, out) = sweep_csv(&dir, &[path_str(&cfg)]);
    assert_eq!(status, ExitStatus::CONFIG);
    assert!(!out.exists());
}

#[test]
fn sweep_reports_expected_profile_shapes() {
    let dir = TempDir::new().unwrap();
    for (id, shape) in [("ex4.2a", "unimodal_max"), ("ex4.2b", "increasing"), ("pk_manufactured", "flat")] {
        let (status, out) = sweep_csv(&dir, &["--example", id]);
        assert_eq!(status, ExitStatus::SUCCESS, "{id}");
        let doc = read_doc(&out);
        assert_eq!(doc.get_meta("profile_shape"), Some(shape), "{id}");
        assert_eq!(doc.rows.len(), 81);
        assert_eq!(doc.columns, ["d", "M", "M_minus_intK", "iterations", "residual", "method"]);
        if id == "pk_manufactured" {
            let worst = doc.column("M_minus_intK").unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(worst <= 1e-8);
        }
    }
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let status = dispersal(&["sweep", "--example", "ex4.3", "--out", path_str(out)]);
        assert_eq!(status, ExitStatus::SUCCESS);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn lambda_sweep_writes_tables_summary_and_figure() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("family");
    let fig = dir.path().join("family.svg");
    let status = dispersal(&[
        "lambda-sweep", "--example", "ex4.4", "--out", path_str(&out), "--plot", path_str(&fig),
    ]);
    assert_eq!(status, ExitStatus::SUCCESS);
    for l in ["-1", "0", "0.5", "1", "1.4", "2.3"] {
        assert!(out.join(format!("sweep_lambda_{l}.csv")).exists(), "lambda {l}");
    }
    let summary = read_doc(&out.join("summary.csv"));
    assert_eq!(summary.rows.len(), 6);
    let m_inf = summary.column("m_infinity").unwrap();
    assert!(m_inf.windows(2).all(|w| w[1] > w[0]));
    let svg = fs::read_to_string(&fig).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 6);
}

#[test]
fn lambda_sweep_single_values() {
    let dir = TempDir::new().unwrap();
    for (l, expect_above) in [("1", true), ("0", false)] {
        let out = dir.path().join(format!("l{l}"));
        let status = dispersal(&["lambda-sweep", "--example", "ex4.4", "--lambdas", l, "--out", path_str(&out)]);
        assert_eq!(status, ExitStatus::SUCCESS);
        let doc = read_doc(&out.join(format!("sweep_lambda_{l}.csv")));
        let gaps = doc.column("M_minus_intK").unwrap();
        assert!(gaps.iter().all(|&g| (g > 0.0) == expect_above), "lambda {l}");
    }
}

#[test]
fn verify_zero_correlation_examples_are_indeterminate() {
    let dir = TempDir::new().unwrap();
    for id in ["ex4.1a", "ex4.1b"] {
        let report = dir.path().join(format!("{id}.txt"));
        let status = dispersal(&["verify", "--example", id, "--report", path_str(&report)]);
        assert_eq!(status, ExitStatus::SUCCESS);
        let text = fs::read_to_string(&report).unwrap();
        let lem: Vec<&str> = text.lines().filter(|l| l.contains("| lem33_")).collect();
        assert_eq!(lem.len(), 2);
        assert!(lem.iter().all(|l| l.contains("| indeterminate")), "{id}: {lem:?}");
    }
}

#[test]
fn verify_all_has_no_violations() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("all.txt");
    assert_eq!(dispersal(&["verify", "--all", "--report", path_str(&report)]), ExitStatus::SUCCESS);
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.lines().last().unwrap().contains(" 0 violated"));
}

fn plot_from_sweep(dir: &TempDir, lambda: Option<&str>, example: &str) -> String {
    let csv = dir.path().join("in.csv");
    let svg = dir.path().join("out.svg");
    let mut args = vec!["sweep", "--example", example, "--out", path_str(&csv)];
    if let Some(l) = lambda {
        args.extend_from_slice(&["--lambda", l]);
    }
    assert_eq!(dispersal(&args), ExitStatus::SUCCESS);
    let status = dispersal(&["plot", "--in", path_str(&csv), "--out", path_str(&svg)]);
    assert_eq!(status, ExitStatus::SUCCESS);
    fs::read_to_string(&svg).unwrap()
}

/// Pixel y of the dashed reference line and of every curve vertex.
fn reference_and_curve(svg: &str) -> (f64, Vec<f64>) {
    let attr = |line: &str, name: &str| -> String {
        let start = line.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
        line[start..].split('"').next().unwrap().to_string()
    };
    let reference = svg.lines().find(|l| l.contains(r#"data-role="reference""#)).unwrap();
    let curve = svg.lines().find(|l| l.contains(r#"data-role="curve""#)).unwrap();
    let y_ref = attr(reference, "y1").parse().unwrap();
    let ys = attr(curve, "points")
        .split(' ')
        .map(|pt| pt.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    (y_ref, ys)
}

#[test]
fn plot_draws_curve_above_reference_for_proportional_case() {
    let dir = TempDir::new().unwrap();
    let svg = plot_from_sweep(&dir, Some("1"), "ex4.4");
    assert!(svg.contains("stroke-dasharray"));
    let (y_ref, ys) = reference_and_curve(&svg);
    assert_eq!(ys.len(), 81);
    // SVG y grows downward, so "above" means a smaller coordinate.
    assert!(ys.iter().all(|&y| y <= y_ref));
    assert!(ys.iter().any(|&y| y < y_ref - 1.0));
}

#[test]
fn plot_of_manufactured_case_lies_on_reference() {
    let dir = TempDir::new().unwrap();
    let (y_ref, ys) = reference_and_curve(&plot_from_sweep(&dir, None, "pk_manufactured"));
    assert!(ys.iter().all(|&y| (y - y_ref).abs() <= 0.01));
}

#[test]
fn plot_rejects_empty_or_unusable_csv() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("out.svg");
    for (name, body) in [("empty.csv", ""), ("header.csv", "d,M\n"), ("nod.csv", "x,M\n1,2\n")] {
        let csv = dir.path().join(name);
        fs::write(&csv, body).unwrap();
        let status = dispersal(&["plot", "--in", path_str(&csv), "--out", path_str(&svg)]);
        assert_eq!(status, ExitStatus::CONFIG, "{name}");
    }
    assert!(!svg.exists());
    let missing = dir.path().join("missing.csv");
    assert_eq!(dispersal(&["plot", "--in", path_str(&missing), "--out", path_str(&svg)]), ExitStatus::CONFIG);
}
