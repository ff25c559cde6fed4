use std::path::Path;
use std::process::{Command, Output};

use logse_lab::snapshot::{load, read_snapshot, write_snapshot, SnapshotMeta};
use logse_lab::{Command as LabCommand, ExperimentConfig};
use logse_core::{Complex64, GridFunction, GridSpec};
use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logse-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut out = vec![r.headers().unwrap().iter().map(String::from).collect()];
    out.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    out
}

fn out_dir(dir: &TempDir) -> String {
    dir.path().to_str().unwrap().to_string()
}

#[test]
fn echo_prints_resolved_defaults() {
    let o = lab(&["converge-time", "--echo"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "grid.h = 0.03125",
        "grid.lower = -5",
        "scheme.name = bdf1",
        "scheme.tau = 0.01",
        "scheme.t_final = 0.5",
        "scenario.omega = 1",
        "refinement.base = 0.1",
        "refinement.first = 1",
        "refinement.levels = 4",
        "acceptance.l2_min = 0.85",
    ] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn echo_reflects_overrides() {
    let o = lab(&["converge-space", "--echo", "--scheme.name", "bdf1", "--grid.h=1/16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("scheme.name = bdf1"));
    assert!(text.contains("grid.h = 0.0625"));
    assert!(text.contains("scenario.omega = 0"));
}

#[test]
fn two_levels_are_rejected_with_the_key() {
    let o = lab(&["converge-time", "--refinement.levels", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refinement.levels"));
}

#[test]
fn unknown_key_is_rejected() {
    let o = lab(&["simulate", "--grid.spacing", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.spacing"));
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "scheme.name = bdf2\nscheme.gamma = 1\n").unwrap();
    let o = lab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scheme.gamma"));
}

#[test]
fn figure_one_refinement_config_is_accepted() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("fig1.cfg");
    std::fs::write(
        &cfg,
        "# tau_j = 0.1 * 2^-j, j = 1..4\nrefinement.base = 0.1\nrefinement.first = 1\nrefinement.levels = 4\nscheme.name = bdf2\n",
    )
    .unwrap();
    let c = ExperimentConfig::from_args(LabCommand::ConvergeTime, Some(&cfg), &[]).unwrap();
    assert_eq!(c.refinement.values(), vec![0.05, 0.025, 0.0125, 0.00625]);
    assert_eq!(c.acceptance.l2_min, 1.8);
}

#[test]
fn synthetic_order_one_rows() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "converge-time",
        "--scenario.kind",
        "synthetic",
        "--scenario.order",
        "1",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&dir.path().join("report.csv"));
    assert_eq!(r[0], ["tau", "l2_error", "h1_error", "order_l2", "order_h1"]);
    assert_eq!(r.len(), 5);
    assert_eq!(r[1][3], "");
    for row in &r[2..] {
        let o: f64 = row[3].parse().unwrap();
        assert!((o - 1.0).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn synthetic_out_of_window_exits_three() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "converge-time",
        "--scenario.kind=synthetic",
        "--scenario.order=3",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zero_field_gives_degenerate_report() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "converge-time",
        "--scenario.kind",
        "zero",
        "--grid.h",
        "1/8",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("degenerate"));
    let r = rows(&dir.path().join("report.csv"));
    for row in &r[1..] {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn zero_simulation_stays_zero() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "simulate",
        "--scenario.kind",
        "zero",
        "--grid.h",
        "1/4",
        "--scheme.t_final",
        "0.1",
        "--output.series_stride",
        "1",
        "--output.snapshot_stride",
        "5",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&dir.path().join("series.csv"));
    assert_eq!(r[0], ["step", "t", "mass", "energy", "linf"]);
    assert_eq!(r.len(), 12);
    for row in &r[1..] {
        for v in &row[2..] {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
    }
    let last = load(&dir.path().join("snap_000010.bin")).unwrap();
    assert!(last.field.values().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    assert_eq!(last.meta.step, 10);
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let spec = GridSpec::new(&[(-1.0, 2.0), (0.5, 3.0)], &[5, 7]).unwrap();
    let u = GridFunction::from_fn(&spec, |x| Complex64::new(x[0].sin() / 3.0, (x[0] * x[1]).exp() * 1e-300));
    let meta = SnapshotMeta {
        step: 42,
        time: 0.1 + 0.2,
        scheme: "bdf2".into(),
        lambda: -1.0 / 3.0,
        tau: 1e-3,
    };
    let mut bytes = Vec::new();
    write_snapshot(&mut bytes, &meta, &u).unwrap();
    let back = read_snapshot(bytes.as_slice()).unwrap();
    assert_eq!(back.meta, meta);
    assert_eq!(back.field.spec(), u.spec());
    for (a, b) in back.field.values().iter().zip(u.values()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
    assert!(read_snapshot(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn conjugated_nonlinearity_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "properties",
        "--properties.samples",
        "2000",
        "--properties.oracle_cases",
        "5",
        "--properties.mutation",
        "conjugate",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let text = std::fs::read_to_string(dir.path().join("properties.txt")).unwrap();
    let fail = text.lines().find(|l| l.starts_with("FAIL ")).expect("a failing property");
    assert!(fail.contains("witness"), "{fail}");
    assert!(text.lines().last().unwrap().starts_with("FAIL"));
}

#[test]
fn unmutated_properties_pass() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "properties",
        "--properties.samples",
        "2000",
        "--properties.oracle_cases",
        "5",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn case_four_stays_mirror_symmetric() {
    let dir = TempDir::new().unwrap();
    let o = lab(&[
        "simulate",
        "--scenario.kind",
        "case-iv",
        "--scheme.t_final",
        "0.05",
        "--output.snapshot_stride",
        "50",
        "--output.dir",
        &out_dir(&dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let snap = load(&dir.path().join("snap_000050.bin")).unwrap();
    let u = &snap.field;
    let s = u.spec();
    let (nx, ny) = (s.cells(0), s.cells(1));
    let mut worst: f64 = 0.0;
    for j in 0..=nx {
        for k in 0..=ny {
            worst = worst.max((u.get(&[j, k]) - u.get(&[nx - j, k])).norm());
        }
    }
    assert!(worst <= 1e-8, "asymmetry {worst:e}");
}
