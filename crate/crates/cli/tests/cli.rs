use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use swtorus::lattice::{derive_seed, random_smooth_field, random_smooth_spinor, Field, Grid4, ScalarField2};
use swtorus::quat::Quaternion;
use swtorus::snapshot::{self, Record};
use swtorus::sw_ops::{GaugeField4, ReducedConfig};
use swtorus::symplectic::TangentVector4;
use tempfile::TempDir;

fn swtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swtorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn suite<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == name)
        .unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn verify_small_grid_is_fast_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let t = Instant::now();
    let first = swtorus(&["verify", "--grid", "4,4,4,4", "--seed", "7", "--workers", "1", "--out", &p(&dir, "a")]);
    assert!(t.elapsed() < Duration::from_secs(60), "took {:?}", t.elapsed());
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let second = swtorus(&["verify", "--grid", "4,4,4,4", "--seed", "7", "--workers", "3", "--out", &p(&dir, "b")]);
    assert_eq!(code(&second), 0);
    let a = std::fs::read(dir.path().join("a/verify.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/verify.json")).unwrap();
    assert_eq!(a, b);

    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["config"]["grid"]["sizes"], serde_json::json!([4, 4, 4, 4]));
    assert_eq!(report["ledger"]["forms"]["wedge_sign"], "plus");
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 11);
    assert!(suite(&report, "slice_identity")["fitted_constants"]["kappa"].is_number());
}

#[test]
fn corrupted_wedge_sign_breaks_only_definiteness() {
    let dir = TempDir::new().unwrap();
    let o = swtorus(&["verify", "--grid", "4,4,4,4", "--wedge-sign", "minus", "--out", &p(&dir, "v")]);
    assert_eq!(code(&o), 1);
    let report = json(&dir.path().join("v/verify.json"));
    assert_eq!(report["ledger"]["forms"]["wedge_sign"], "minus");
    assert_eq!(suite(&report, "cross_terms")["pass"], true);
    assert_eq!(suite(&report, "nondegeneracy")["pass"], false);
    assert_eq!(report["all_pass"], false);
}

#[test]
fn config_file_sections_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[grid]\nsizes = [4, 4, 4, 4]\nkahler = { profile = \"harmonic\", value = 0.3 }\n\
         [run]\nseed = 5\ndiagnostics = false\n[run.trials]\nquaternion = 100\n",
    )
    .unwrap();
    let o = swtorus(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", &p(&dir, "v")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("v/verify.json"));
    assert_eq!(report["seed"], 11);
    assert_eq!(report["config"]["grid"]["kahler"]["profile"], "harmonic");
    assert_eq!(report["config"]["run"]["trials"]["quaternion"], 100);
    assert_eq!(report["config"]["run"]["trials"]["gauge"], 100);
    assert_eq!(suite(&report, "moment_algebra")["trials"], 100);
    assert!(report["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[grid]\nsize = [4, 4, 4, 4]\n").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--config".into(), bad.to_string_lossy().into()],
        vec!["verify".into(), "--config".into(), p(&dir, "missing.toml")],
        vec!["verify".into(), "--grid".into(), "3,4,4,4".into()],
        vec!["verify".into(), "--grid".into(), "4,4,4".into()],
        vec!["verify".into(), "--scheme".into(), "upwind".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = swtorus(&args);
        assert_eq!(code(&o), 2, "{args:?}");
    }
}

#[test]
fn lift_of_zero_configuration_is_zero() {
    let dir = TempDir::new().unwrap();
    let grid = Grid4::unit([4, 5, 4, 6]).unwrap();
    let input = dir.path().join("zero.swf1");
    snapshot::write_records(&input, &snapshot::reduced_records(&ReducedConfig::zeros(grid.factor1()))).unwrap();
    let o = swtorus(&["lift", "--grid", "4,5,4,6", "--input", input.to_str().unwrap(), "--out", &p(&dir, "l")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("l/lift.json"));
    assert_eq!(report["residual_2d"], 0.0);
    assert_eq!(report["residual_4d"], 0.0);
    let (a, u) = snapshot::config4_from_records(snapshot::read_records(&dir.path().join("l/lift.swf1")).unwrap(), &grid)
        .unwrap();
    assert_eq!(a.max_abs(), 0.0);
    assert_eq!(u.max_abs(), 0.0);
}

#[test]
fn lift_rejects_bad_snapshots() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.swf1");
    std::fs::write(&bad, b"SWF0\0\0\0\0").unwrap();
    let wrong = dir.path().join("wrong.swf1");
    let g2 = Grid4::unit([6, 6, 4, 4]).unwrap().factor1();
    snapshot::write_records(&wrong, &snapshot::reduced_records(&ReducedConfig::zeros(g2))).unwrap();
    for input in [&bad, &wrong, &dir.path().join("absent.swf1")] {
        let o = swtorus(&["lift", "--grid", "4,4,4,4", "--input", input.to_str().unwrap(), "--out", &p(&dir, "l")]);
        assert_eq!(code(&o), 2, "{}", input.display());
    }
}

#[test]
fn solve_then_lift_preserves_the_residual() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("solve.toml");
    let l = std::f64::consts::TAU;
    std::fs::write(&cfg, format!("[grid]\nsizes = [16, 16, 4, 4]\nlengths = [{l}, {l}, {l}, {l}]\n")).unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = swtorus(&["solve", "--config", cfg, "--out", &p(&dir, "s")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let solve = json(&dir.path().join("s/solve.json"));
    assert_eq!(solve["converged"], true);
    let r2 = solve["residual"].as_f64().unwrap();
    assert!(r2 < 1e-6);
    assert_eq!(solve["residual_lift"].as_f64().unwrap(), r2);
    let csv = std::fs::read_to_string(dir.path().join("s/trace.csv")).unwrap();
    assert!(csv.starts_with("step,energy,curvature_residual,dirac_residual,grad_norm\n"));
    assert!(csv.lines().count() > 2);

    let o = swtorus(&["lift", "--config", cfg, "--input", &p(&dir, "s/reduced.swf1"), "--out", &p(&dir, "l")]);
    assert_eq!(code(&o), 0);
    let lift = json(&dir.path().join("l/lift.json"));
    assert_eq!(lift["residual_2d"].as_f64().unwrap(), r2);
    assert_eq!(lift["residual_4d"].as_f64().unwrap(), r2);
    assert_eq!(lift["residuals_match"], true);
}

#[test]
fn unconverged_solve_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, "[solver]\ndimension = 4\nmax_steps = 3\nreport_every = 1\n").unwrap();
    let o = swtorus(&["solve", "--grid", "4,4,4,4", "--config", cfg.to_str().unwrap(), "--out", &p(&dir, "s")]);
    assert_eq!(code(&o), 1);
    let solve = json(&dir.path().join("s/solve.json"));
    assert_eq!(solve["steps"], 3);
    assert_eq!(solve["converged"], false);
    assert!(solve["residual_lift"].is_null());
    let grid = Grid4::unit([4; 4]).unwrap();
    snapshot::config4_from_records(snapshot::read_records(&dir.path().join("s/config.swf1")).unwrap(), &grid).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("s/trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
}

fn write_tangent(path: &Path, t: &TangentVector4) {
    snapshot::write_records(path, &snapshot::tangent_records(t)).unwrap();
}

#[test]
fn pair_on_zero_tangents_is_zero() {
    let dir = TempDir::new().unwrap();
    let grid = Grid4::unit([4; 4]).unwrap();
    let z = dir.path().join("zero.swf1");
    write_tangent(&z, &TangentVector4::zeros(grid));
    let eps = dir.path().join("eps.swf1");
    snapshot::write_records(&eps, &[Record::scalar(&Field::<4>::zeros(grid))]).unwrap();
    let z = z.to_str().unwrap();
    let o = swtorus(&["pair", "--grid", "4,4,4,4", "--a", z, "--b", z, "--eps", eps.to_str().unwrap(), "--out", &p(&dir, "p")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("p/pair.json"));
    for (k, v) in report["pairings"].as_object().unwrap() {
        assert_eq!(v.as_f64(), Some(0.0), "{k}");
    }
    assert!(report["kappa"].is_null());
    assert!(report["kappa_m"].is_null());
}

/// Random harmonics on small grids are often mutually orthogonal; a
/// constant offset makes every pairing generic.
fn generic_tangent(grid: &Grid4, seed: u64) -> TangentVector4 {
    let c = |v: f64| Field::constant(*grid, v);
    let offset = TangentVector4::new(c(0.3), c(-0.2), c(0.4), c(0.1), Field::constant(*grid, Quaternion::new(0.5, -0.3, 0.2, 0.6)))
        .unwrap();
    TangentVector4::random(grid, seed, 2).axpy(1.0, &offset).unwrap()
}

#[test]
fn pair_reports_fitted_constants() {
    let dir = TempDir::new().unwrap();
    let grid = Grid4::unit([6, 4, 4, 6]).unwrap();
    let a = dir.path().join("a.swf1");
    let b = dir.path().join("b.swf1");
    write_tangent(&a, &generic_tangent(&grid, 1));
    write_tangent(&b, &generic_tangent(&grid, 2));
    let eps = dir.path().join("eps.swf1");
    snapshot::write_records(&eps, &[Record::scalar(&random_smooth_field(&grid, 3, 2).map(|v| v + 0.7))]).unwrap();
    let base = dir.path().join("base.swf1");
    let conn = GaugeField4::new(std::array::from_fn(|mu| random_smooth_field(&grid, derive_seed(4, mu as u64), 2))).unwrap();
    let u = random_smooth_spinor(&grid, 5, 2).map(|q| q + Quaternion::new(0.4, 0.1, -0.3, 0.2));
    snapshot::write_records(&base, &snapshot::config4_records(&conn, &u)).unwrap();

    let o = swtorus(&[
        "pair",
        "--grid",
        "6,4,4,6",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--eps",
        eps.to_str().unwrap(),
        "--base",
        base.to_str().unwrap(),
        "--out",
        &p(&dir, "p"),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("p/pair.json"));
    let pr = &report["pairings"];
    let f = |k: &str| pr[k].as_f64().unwrap();
    assert!((f("omega") - f("omega_full_wedge")).abs() < 1e-12 * f("omega").abs().max(1.0));
    assert!((f("pullback_sum") - f("omega1_first") - f("omega1_second")).abs() < 1e-12);
    assert!((report["kappa"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((report["kappa_m"].as_f64().unwrap() + 1.0).abs() < 1e-6);

    // a tangent snapshot on another grid is refused
    let other = Grid4::unit([4; 4]).unwrap();
    write_tangent(&a, &TangentVector4::zeros(other));
    let o = swtorus(&["pair", "--grid", "6,4,4,6", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn convergence_table_and_orders() {
    let dir = TempDir::new().unwrap();
    let o = swtorus(&["convergence", "--sizes", "4,8,16", "--out", &p(&dir, "c")]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("c/convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("operator,data,n,h,error,order"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 4 * 3);
    for r in &rows {
        if r[1] == "constant" {
            assert_eq!(r[4].parse::<f64>().unwrap(), 0.0, "{r:?}");
            assert_eq!(r[5], "");
        }
    }
    let order = |op: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == op && r[1] == "harmonic")
            .map(|r| r[5].parse().unwrap())
            .unwrap()
    };
    assert!((order("dirac_central") - 2.0).abs() < 0.2);
    assert!((order("dirac_link") - 1.0).abs() < 0.2);

    let again = TempDir::new().unwrap();
    swtorus(&["convergence", "--sizes", "4,8,16", "--out", &p(&again, "c")]);
    assert_eq!(csv, std::fs::read_to_string(again.path().join("c/convergence.csv")).unwrap());
}

#[test]
fn reduced_snapshot_roundtrips_through_lift() {
    let dir = TempDir::new().unwrap();
    let grid = Grid4::unit([4, 6, 4, 4]).unwrap();
    let c = ReducedConfig::random(grid.factor1(), 9, 0.5, 2);
    let input = dir.path().join("c.swf1");
    snapshot::write_records(&input, &snapshot::reduced_records(&c)).unwrap();
    let o = swtorus(&["lift", "--grid", "4,6,4,4", "--input", input.to_str().unwrap(), "--out", &p(&dir, "l")]);
    assert_eq!(code(&o), 0);
    let (a, _) = snapshot::config4_from_records(snapshot::read_records(&dir.path().join("l/lift.swf1")).unwrap(), &grid)
        .unwrap();
    let back: ScalarField2 = swtorus::lattice::restrict1(a.component(0), [0, 0]).unwrap();
    assert_eq!(back.data(), c.a0.data());
}
