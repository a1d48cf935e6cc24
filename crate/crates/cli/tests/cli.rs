//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

use kleinian_dim::estdim::oracles;
use kleinian_dim::group::{builtin, to_config, Params, PointCloud};
use kleinian_dim::predict::{phase_grid, phase_plot, FIGURE_PANELS, PHASE_HEADER};

const CANTOR: f64 = 0.630_929_753_571_457_4;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kleinian-dim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_cloud(path: &Path, c: &PointCloud) {
    let mut buf = vec![];
    c.write_to(&mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

/// `key,value` line of a report or estimate.
fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(',')))
}

fn report_row<'a>(text: &'a str, name: &str) -> Vec<&'a str> {
    let line = text.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap_or_else(|| panic!("no row {name}"));
    line.split(',').collect()
}

#[test]
fn phase_tables_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    for (k_min, k_max, d) in FIGURE_PANELS {
        let out = dir.path().join(format!("phase_{k_min}{k_max}{d}.txt"));
        let o = run(&[
            "plot",
            "--phase",
            &k_min.to_string(),
            &k_max.to_string(),
            &d.to_string(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        let expected = phase_plot(k_min, k_max, d, &phase_grid(k_max, d, 200)).unwrap().to_text();
        assert_eq!(text, expected);
        assert!(text.starts_with(PHASE_HEADER));
        let svg = std::fs::read_to_string(out.with_extension("svg")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg.matches(r#"stroke-dasharray="6 4""#).count(), 2);
        assert_eq!(svg.matches(r#"stroke-dasharray="1 3""#).count(), 1);
    }
}

#[test]
fn phase_rows_show_the_kink() {
    let o = run(&["plot", "--phase", "1", "3", "4", "--points", "8"]);
    assert!(o.status.success());
    let rows: Vec<Vec<f64>> =
        stdout(&o).lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 8);
    // grid 1.5 + 2.5 i / 8; upper_reg = max(3, 2 delta - 1), kink at delta = 2
    for r in &rows {
        let expected = if r[0] <= 2.0 { 3.0 } else { 2.0 * r[0] - 1.0 };
        assert!((r[1] - expected).abs() < 1e-10, "{r:?}");
    }
    assert!(rows.iter().any(|r| r[0] < 2.0) && rows.iter().any(|r| r[0] > 2.0));
}

#[test]
fn invalid_phase_parameters_are_usage_errors() {
    for args in [["3", "5", "2"], ["0", "1", "2"], ["2", "1", "2"]] {
        let o = run(&["plot", "--phase", args[0], args[1], args[2]]);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["generate"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "--builtin", "nonesuch"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--builtin", "apollonian", "--tolerance", "assouad"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--builtin", "apollonian", "--tolerance", "nonesuch=1"]).status.code(), Some(1));
    let o = bin().env("KLEINIAN_DIM_THREADS", "zero").args(["plot", "--phase", "1", "1", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn thread_cap_is_honoured() {
    let o = bin().env("KLEINIAN_DIM_THREADS", "1").args(["plot", "--phase", "1", "1", "2", "--points", "3"]).output();
    assert!(o.unwrap().status.success());
}

#[test]
fn empty_word_budget_is_an_error() {
    let o = run(&["generate", "--builtin", "schottky", "--budget-words", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty limit sample"), "{}", stderr(&o));
}

#[test]
fn apollonian_cloud_is_large_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let o = run(&["generate", "--builtin", "apollonian", "--resolution", "1e-3", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("resolution: 0.001"));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next(), Some("ball,2,0.001"));
    assert!(text.lines().count() > 10_000);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn config_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let g = builtin("schottky", &Params::from_pairs(&[("d", 1.0)])).unwrap();
    let cfg = dir.path().join("g.toml");
    std::fs::write(&cfg, to_config(&g)).unwrap();
    let from_file = run(&["generate", "--config", cfg.to_str().unwrap(), "--resolution", "1e-4"]);
    let from_name = run(&["generate", "--builtin", "schottky", "--param", "d=1", "--resolution", "1e-4"]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    // the round trip through decimal text may move the last bit
    let a = PointCloud::read_from(from_file.stdout.as_slice()).unwrap();
    let b = PointCloud::read_from(from_name.stdout.as_slice()).unwrap();
    assert_eq!((a.len(), a.resolution), (b.len(), b.resolution));
    for (p, q) in a.points.iter().zip(&b.points) {
        assert!((0..3).all(|i| (p[i] - q[i]).abs() < 1e-12), "{p:?} {q:?}");
    }
    std::fs::write(&cfg, "model = \"halfspace\"\nd = 1\n").unwrap();
    assert_eq!(run(&["generate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn cantor_file_box_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cantor.txt");
    write_cloud(&path, &oracles::cantor(12).unwrap());
    let o = run(&["dimension", "--cloud", path.to_str().unwrap(), "--method", "box"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = field(&stdout(&o), "value").unwrap().parse().unwrap();
    assert!((v - CANTOR).abs() <= 0.02, "{v}");
}

#[test]
fn single_point_has_assouad_dimension_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.txt");
    std::fs::write(&path, "euclidean,1,0.001\n0.5\n").unwrap();
    let o = run(&["dimension", "--cloud", path.to_str().unwrap(), "--method", "assouad"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "value"), Some("0"));
}

#[test]
fn scales_below_resolution_name_the_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cantor.txt");
    write_cloud(&path, &oracles::cantor(6).unwrap());
    for method in ["box", "assouad", "lower"] {
        let o = run(&["dimension", "--cloud", path.to_str().unwrap(), "--method", method, "--scales", "1e-6:0.1:5"]);
        assert_eq!(o.status.code(), Some(2), "{method}");
        assert!(stderr(&o).contains("precondition violated"), "{}", stderr(&o));
        assert!(stderr(&o).contains("resolution"), "{}", stderr(&o));
    }
}

#[test]
fn apollonian_gasket_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("gasket.svg");
    let o = run(&["plot", "--gasket", "apollonian", "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.matches("<circle").count() >= 10_000);
}

#[test]
fn verify_apollonian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&["verify", "--builtin", "apollonian", "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    let row = report_row(&text, "assouad");
    assert_eq!(row[1].parse::<f64>().unwrap(), 1.305688);
    assert!((row[2].parse::<f64>().unwrap() - 1.305688).abs() <= 0.1);
    assert_eq!(row[4], "pass");
    // exit status is the conjunction of the rows
    let all = text.lines().skip_while(|l| !l.starts_with("name,")).skip(1).filter(|l| !l.starts_with("overall"));
    let passed = all.clone().all(|l| l.ends_with(",pass"));
    assert!(all.count() >= 8);
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 3 }));
    assert!(field(&text, "seed").is_some() && field(&text, "measure").is_some());
}

#[test]
fn verify_parabolic_free_shares_one_prediction() {
    let o = run(&["verify", "--builtin", "schottky"]);
    assert!(matches!(o.status.code(), Some(0 | 3)), "{}", stderr(&o));
    let text = stdout(&o);
    let preds: Vec<&str> =
        ["box", "assouad", "lower", "upper_reg", "lower_reg"].iter().map(|n| report_row(&text, n)[1]).collect();
    assert!(preds.iter().all(|p| *p == preds[0]), "{preds:?}");
    let delta: f64 = field(&text, "profile").unwrap().split(',').next().unwrap()[6..].parse().unwrap();
    assert!((preds[0].parse::<f64>().unwrap() - delta).abs() < 1e-9);
}

#[test]
fn verify_geometrically_infinite_reports_bounds() {
    let o = run(&["verify", "--builtin", "infinite_fuchsian"]);
    assert!(matches!(o.status.code(), Some(0 | 3)), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("geometrically infinite"));
    assert_eq!(report_row(&text, "box")[1], ">=0.650000000000");
    assert_eq!(report_row(&text, "lower")[1], "<=0.200000000000");
    assert_eq!(report_row(&text, "assouad")[1], ">=0.900000000000");
    assert!(!text.lines().any(|l| l.starts_with("delta,")));
}
