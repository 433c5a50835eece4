use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use swtorus::convergence::{self, Operator, TestData};
use swtorus::lattice::{derive_seed, random_smooth_field, random_smooth_spinor, Grid4};
use swtorus::quat::FUNDAMENTAL_FIELD_SIGN;
use swtorus::snapshot;
use swtorus::solver::{descend, dirac_operator, solve_reduced, SolveTrace};
use swtorus::sw_ops::{curvature_residual, GaugeField4, ReducedConfig, ReducedDiscretization, SpinorField4};
use swtorus::symplectic::{
    moment_sides, omega, omega1_sigma, omega_cross_check, omega_y, pullback_sum, pushforward_psi1,
    pushforward_psi2, MomentPairing, WedgeStencil,
};
use swtorus::verify::{self, tol, Ledger};

use crate::config::RunConfig;

/// Outcome of a command that ran to completion.
pub enum Status {
    Pass,
    /// An invariant or convergence target was not met.
    Fail,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Fields shared by every JSON report.
#[derive(Serialize)]
struct Header {
    config: Value,
    seed: u64,
    ledger: Ledger,
}

impl Header {
    fn new(cfg: &RunConfig) -> Self {
        Self {
            config: cfg.to_json(),
            seed: cfg.run.seed,
            ledger: ledger(cfg),
        }
    }
}

fn ledger(cfg: &RunConfig) -> Ledger {
    Ledger {
        fundamental_field_sign: FUNDAMENTAL_FIELD_SIGN,
        forms: cfg.forms(),
        scheme: cfg.solver.scheme,
        convention: cfg.forms.convention,
    }
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.run.out.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

fn read_snapshot(path: &Path) -> Result<Vec<snapshot::Record>> {
    snapshot::read_records(path).with_context(|| format!("reading snapshot {}", path.display()))
}

pub fn verify(cfg: &RunConfig) -> Result<Status> {
    let params = cfg.verify_params();
    let report = verify::run(&params, cfg.to_json(), cfg.run.diagnostics)?;
    for s in &report.suites {
        println!(
            "{} {:<22} trials={:<6} max_defect={:.3e} tol={:.0e}",
            if s.pass { "PASS" } else { "FAIL" },
            s.name,
            s.trials,
            s.max_defect,
            s.tolerance
        );
    }
    let path = out_dir(cfg)?.join("verify.json");
    write_text(&path, &report.to_json())?;
    println!("report: {}", path.display());
    Ok(Status::from_pass(report.all_pass))
}

#[derive(Serialize)]
struct SolveReport {
    #[serde(flatten)]
    header: Header,
    dimension: usize,
    converged: bool,
    steps: usize,
    rejected: usize,
    energy: f64,
    /// Sup norm of the residual of the result.
    residual: f64,
    /// Sup norm of the residual of its lift, for the reduced flow.
    residual_lift: Option<f64>,
    fields: String,
    trace: String,
}

fn random_start(grid: &Grid4, cfg: &RunConfig) -> (GaugeField4, SpinorField4) {
    let s = &cfg.solver;
    let seed = derive_seed(cfg.run.seed, 4_500);
    let comps = std::array::from_fn(|mu| {
        let f = random_smooth_field(grid, derive_seed(seed, mu as u64), cfg.run.modes).scaled(s.amplitude);
        match mu {
            0 | 1 => f.map(|v| v + s.holonomy[mu]),
            _ => f,
        }
    });
    let u = random_smooth_spinor(grid, derive_seed(seed, 4), cfg.run.modes).map(|q| q.scale(s.amplitude));
    (GaugeField4::new(comps).expect("same grid"), u)
}

pub fn solve(cfg: &RunConfig) -> Result<Status> {
    let grid = cfg.grid()?;
    let settings = cfg.settings();
    let dir = out_dir(cfg)?;
    let (trace, residual, residual_lift, fields): (SolveTrace, f64, Option<f64>, PathBuf) = if cfg.solver.dimension == 2 {
        let mut c = ReducedConfig::random(
            grid.factor1(),
            derive_seed(cfg.run.seed, 4_500),
            cfg.solver.amplitude,
            cfg.run.modes,
        );
        c.a0 = c.a0.map(|v| v + cfg.solver.holonomy[0]);
        c.a1 = c.a1.map(|v| v + cfg.solver.holonomy[1]);
        let disc = ReducedDiscretization::for_grid(&grid, settings.scheme);
        let (c1, trace) = solve_reduced(&c, disc, &settings)?;
        let (r2, r4) = verify::lift_residuals(&c1, &grid, settings.scheme, settings.convention)?;
        let path = dir.join("reduced.swf1");
        snapshot::write_records(&path, &snapshot::reduced_records(&c1))?;
        (trace, r2, Some(r4), path)
    } else {
        let (a, u) = random_start(&grid, cfg);
        let (a1, u1, trace) = descend(&a, &u, &settings)?;
        let r = curvature_residual(&a1, &u1, settings.convention)?
            .max_abs()
            .max(dirac_operator(&a1, &u1, settings.scheme)?.max_abs());
        let path = dir.join("config.swf1");
        snapshot::write_records(&path, &snapshot::config4_records(&a1, &u1))?;
        (trace, r, None, path)
    };
    let trace_path = dir.join("trace.csv");
    write_text(&trace_path, &trace.to_csv())?;
    let report = SolveReport {
        header: Header::new(cfg),
        dimension: cfg.solver.dimension,
        converged: trace.converged,
        steps: trace.steps,
        rejected: trace.rejected,
        energy: trace.last().map_or(0.0, |r| r.energy),
        residual,
        residual_lift,
        fields: file_name(&fields),
        trace: file_name(&trace_path),
    };
    write_json(&dir.join("solve.json"), &report)?;
    println!(
        "{} after {} steps, residual {:.3e}{}",
        if trace.converged { "converged" } else { "not converged" },
        trace.steps,
        residual,
        residual_lift.map_or(String::new(), |r| format!(", lifted {r:.3e}"))
    );
    println!("fields: {}", fields.display());
    Ok(Status::from_pass(trace.converged))
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

#[derive(Serialize)]
struct LiftReport {
    #[serde(flatten)]
    header: Header,
    input: String,
    residual_2d: f64,
    residual_4d: f64,
    residual_mismatch: f64,
    residuals_match: bool,
    fields: String,
}

pub fn lift(cfg: &RunConfig, input: &Path) -> Result<Status> {
    let grid = cfg.grid()?;
    let c = snapshot::reduced_from_records(read_snapshot(input)?, &grid.factor1())
        .with_context(|| format!("{} does not match the first factor of the grid", input.display()))?;
    let (r2, r4) = verify::lift_residuals(&c, &grid, cfg.solver.scheme, cfg.forms.convention)?;
    let (a, u) = c.lift(&grid)?;
    let dir = out_dir(cfg)?;
    let path = dir.join("lift.swf1");
    snapshot::write_records(&path, &snapshot::config4_records(&a, &u))?;
    let mismatch = (r4 - r2).abs();
    let ok = mismatch <= tol::LIFT * r2.max(1.0);
    write_json(
        &dir.join("lift.json"),
        &LiftReport {
            header: Header::new(cfg),
            input: input.display().to_string(),
            residual_2d: r2,
            residual_4d: r4,
            residual_mismatch: mismatch,
            residuals_match: ok,
            fields: file_name(&path),
        },
    )?;
    println!("residual 2d {r2:.6e}, 4d {r4:.6e}, mismatch {mismatch:.1e}");
    println!("fields: {}", path.display());
    Ok(Status::from_pass(ok))
}

#[derive(Serialize)]
struct Pairings {
    omega: f64,
    omega_full_wedge: f64,
    omega_y: f64,
    omega1_first: f64,
    omega1_second: f64,
    pullback_sum: f64,
    moment_omega: Option<f64>,
    moment_derivative: Option<f64>,
}

#[derive(Serialize)]
struct PairReport {
    #[serde(flatten)]
    header: Header,
    pairings: Pairings,
    /// `Ω_Y / (Ψ1*Ω1 + Ψ2*Ω1)`, absent when the denominator vanishes.
    kappa: Option<f64>,
    /// `Ω(V_ε, b) / D_b P_ε` with the cup wedge, absent without `--eps`.
    kappa_m: Option<f64>,
}

pub struct PairInputs<'a> {
    pub a: &'a Path,
    pub b: &'a Path,
    pub eps: Option<&'a Path>,
    pub base: Option<&'a Path>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

pub fn pair(cfg: &RunConfig, inputs: PairInputs) -> Result<Status> {
    let grid = cfg.grid()?;
    let k = cfg.grid.kahler.build(&grid)?;
    let conv = cfg.forms();
    let (p, q) = (cfg.grid.p, cfg.grid.q);
    let tangent = |path: &Path| {
        snapshot::tangent_from_records(read_snapshot(path)?, &grid)
            .with_context(|| format!("{} is not a tangent snapshot on the grid", path.display()))
    };
    let a = tangent(inputs.a)?;
    let b = tangent(inputs.b)?;
    let cross = omega_cross_check(&a, &b, &k, conv)?;
    let mut pairings = Pairings {
        omega: omega(&a, &b, &k, conv)?,
        omega_full_wedge: cross.full,
        omega_y: omega_y(&a, &b, p, q, &k, conv)?,
        omega1_first: omega1_sigma(&pushforward_psi1(&a, p)?, &pushforward_psi1(&b, p)?, k.f1(), conv)?,
        omega1_second: omega1_sigma(&pushforward_psi2(&a, q)?, &pushforward_psi2(&b, q)?, k.f2(), conv)?,
        pullback_sum: pullback_sum(&a, &b, p, q, &k, conv)?,
        moment_omega: None,
        moment_derivative: None,
    };
    let mut kappa_m = None;
    if let Some(eps_path) = inputs.eps {
        let eps = snapshot::scalar4_from_records(read_snapshot(eps_path)?, &grid)
            .with_context(|| format!("{} is not a scalar snapshot on the grid", eps_path.display()))?;
        let (ba, bu) = match inputs.base {
            Some(path) => snapshot::config4_from_records(read_snapshot(path)?, &grid)
                .with_context(|| format!("{} is not a configuration snapshot on the grid", path.display()))?,
            None => (GaugeField4::zeros(grid), SpinorField4::zeros(grid)),
        };
        let m = moment_sides(&eps, &b, &ba, &bu, &k, conv.with_stencil(WedgeStencil::Cup), MomentPairing::Scalar)?;
        pairings.moment_omega = Some(m.omega);
        pairings.moment_derivative = Some(m.derivative);
        kappa_m = ratio(m.omega, m.derivative);
    }
    let report = PairReport {
        header: Header::new(cfg),
        kappa: ratio(pairings.omega_y, pairings.pullback_sum),
        kappa_m,
        pairings,
    };
    let path = out_dir(cfg)?.join("pair.json");
    write_json(&path, &report)?;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.12}"));
    println!(
        "omega {:.6e}, omega_y {:.6e}, kappa {}, kappa_m {}",
        report.pairings.omega,
        report.pairings.omega_y,
        show(report.kappa),
        show(report.kappa_m)
    );
    println!("report: {}", path.display());
    Ok(Status::Pass)
}

pub fn convergence(cfg: &RunConfig) -> Result<Status> {
    let sizes = &cfg.run.convergence_sizes;
    let mut studies = Vec::new();
    for data in [TestData::Harmonic, TestData::Constant] {
        for op in Operator::ALL {
            studies.push(convergence::study(op, sizes, data)?);
        }
    }
    for st in studies.iter().filter(|s| s.data == TestData::Harmonic) {
        println!(
            "{:<14} order {} (nominal {})",
            st.operator.name(),
            st.order.map_or("n/a".into(), |o| format!("{o:.3}")),
            st.operator.nominal_order()
        );
    }
    let path = out_dir(cfg)?.join("convergence.csv");
    write_text(&path, &convergence::to_csv(&studies))?;
    println!("table: {}", path.display());
    Ok(Status::Pass)
}
