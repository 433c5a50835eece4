//! Seeded property suites and the report they produce.
//!
//! Every suite draws its random data from its own ChaCha stream derived from
//! the run seed, so suites are independent of each other and of the order
//! in which they run. Reports contain no timestamps.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convergence::{self, Operator, TestData};
use crate::error::{Error, Result};
use crate::lattice::{derive_seed, random_smooth_field, random_smooth_spinor, Field, Grid4, KahlerData, GENERATOR};
use crate::quat::{fundamental_field, kahler_pairing, moment_map, moment_pairing_scalar, MomentValue, Quaternion, FUNDAMENTAL_FIELD_SIGN};
use crate::solver::{dirac_operator, solve_reduced, SolveSettings};
use crate::sw_ops::{
    curvature, dirac, fhat, gauge_transform, reduced_residual, residual_chi, Convention,
    DiracScheme, GaugeField4, ReducedConfig, ReducedDiscretization, SpinorField4, DIRAC_PREFIXES,
};
use crate::symplectic::{
    fit_proportionality, moment_sides, omega, omega_at, omega_cross_check, omega_y, pullback_sum, twist,
    FormConventions, MomentPairing, Sign, TangentVector4, WedgeStencil,
};

/// Choice of conformal factors `f1`, `f2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", content = "value", rename_all = "snake_case")]
pub enum KahlerProfile {
    Constant(f64),
    /// `1 + a·sin·cos` on each factor.
    Harmonic(f64),
}

impl KahlerProfile {
    pub fn build(self, grid: &Grid4) -> Result<KahlerData> {
        match self {
            KahlerProfile::Constant(v) => KahlerData::new(
                Field::constant(grid.factor1(), v),
                Field::constant(grid.factor2(), v),
            ),
            KahlerProfile::Harmonic(a) => KahlerData::harmonic(grid, a),
        }
    }
}

impl Default for KahlerProfile {
    fn default() -> Self {
        KahlerProfile::Constant(1.0)
    }
}

/// Number of random trials per suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialCounts {
    pub quaternion: usize,
    pub gauge: usize,
    pub lift: usize,
    pub cross_terms: usize,
    pub omega: usize,
    pub definiteness: usize,
    pub slice: usize,
    pub moment: usize,
}

impl Default for TrialCounts {
    fn default() -> Self {
        Self {
            quaternion: 10_000,
            gauge: 100,
            lift: 50,
            cross_terms: 1000,
            omega: 100,
            definiteness: 1000,
            slice: 100,
            moment: 100,
        }
    }
}

/// Parameters of the reduced solve used by the lift suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftSolve {
    pub sizes: [usize; 2],
    pub length: f64,
    pub transverse_sizes: [usize; 2],
    /// Amplitude of the random start.
    pub amplitude: f64,
    /// Constant background `(a0, a1)`; a holonomy away from the trivial one
    /// removes the kernel of the Dirac operator.
    pub holonomy: [f64; 2],
    pub settings: SolveSettings,
}

impl Default for LiftSolve {
    fn default() -> Self {
        Self {
            sizes: [16, 16],
            length: 2.0 * std::f64::consts::PI,
            transverse_sizes: [4, 4],
            amplitude: 0.1,
            holonomy: [0.5, 0.35],
            settings: SolveSettings {
                max_steps: 100_000,
                step_size: 0.05,
                tol: 1e-7,
                ..SolveSettings::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub grid_sizes: [usize; 4],
    pub grid_lengths: [f64; 4],
    pub kahler: KahlerProfile,
    pub seed: u64,
    pub scheme: DiracScheme,
    pub convention: Convention,
    pub forms: FormConventions,
    pub p: [usize; 2],
    pub q: [usize; 2],
    pub trials: TrialCounts,
    pub modes: usize,
    pub convergence_sizes: Vec<usize>,
    pub lift_solve: LiftSolve,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            grid_sizes: [8; 4],
            grid_lengths: [1.0; 4],
            kahler: KahlerProfile::default(),
            seed: 0,
            scheme: DiracScheme::Link,
            convention: Convention::Paper,
            forms: FormConventions::FROZEN,
            p: [0, 0],
            q: [0, 0],
            trials: TrialCounts::default(),
            modes: 3,
            convergence_sizes: vec![4, 8, 16],
            lift_solve: LiftSolve::default(),
        }
    }
}

impl VerifyParams {
    pub fn grid(&self) -> Result<Grid4> {
        Grid4::new(self.grid_sizes, self.grid_lengths)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.grid()?;
        self.kahler.build(&g)?;
        let [n2, n3] = g.factor2().sizes();
        let [n0, n1] = g.factor1().sizes();
        if self.p[0] >= n2 || self.p[1] >= n3 || self.q[0] >= n0 || self.q[1] >= n1 {
            return Err(Error::IndexOutOfRange(format!("slice points p={:?} q={:?} outside the grid", self.p, self.q)));
        }
        if self.convergence_sizes.len() < 2 {
            return Err(Error::InvalidSettings("convergence ladder needs at least two grids".into()));
        }
        self.lift_solve.settings.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub fitted_constants: BTreeMap<String, f64>,
    pub seed: u64,
}

impl SuiteResult {
    fn new(name: &str, trials: usize, max_defect: f64, tolerance: f64, seed: u64) -> Self {
        Self {
            name: name.into(),
            trials,
            max_defect,
            tolerance,
            pass: max_defect < tolerance,
            fitted_constants: BTreeMap::new(),
            seed,
        }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.fitted_constants.insert(key.into(), v);
        self
    }
}

/// Tolerances of the suites, in the units of the reported defects.
pub mod tol {
    pub const MOMENT_ALGEBRA: f64 = 1e-13;
    pub const HAMILTONIAN: f64 = 1e-12;
    pub const GAUGE: f64 = 1e-12;
    pub const LIFT: f64 = 1e-14;
    pub const LIFT_SOLVE: f64 = 1e-6;
    pub const CROSS_TERMS: f64 = 1e-12;
    pub const OMEGA: f64 = 1e-12;
    pub const SLICE: f64 = 1e-10;
    pub const SLICE_VARIANCE: f64 = 1e-10;
    pub const MOMENT: f64 = 1e-6;
    pub const ORDER: f64 = 0.2;
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

fn random_quaternion(r: &mut ChaCha8Rng, scale: f64) -> Quaternion {
    Quaternion::new(
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
        r.gen_range(-scale..scale),
    )
}

fn random_config(grid: &Grid4, seed: u64, modes: usize) -> (GaugeField4, SpinorField4) {
    let a = GaugeField4::new(std::array::from_fn(|mu| random_smooth_field(grid, derive_seed(seed, mu as u64), modes)))
        .expect("same grid");
    (a, random_smooth_spinor(grid, derive_seed(seed, 4), modes))
}

fn variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Closed-form μ against `½h̄ih`.
pub fn moment_algebra(params: &VerifyParams) -> SuiteResult {
    let mut r = rng(params.seed, 1);
    let n = params.trials.quaternion;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let h = random_quaternion(&mut r, 2.0);
        let o = (h.conj() * (Quaternion::I * h)).scale(0.5);
        let m = moment_map(h);
        worst = worst
            .max((m - MomentValue::new(o.x, o.y, o.z)).max_abs())
            .max(o.w.abs());
    }
    SuiteResult::new("moment_algebra", n, worst, tol::MOMENT_ALGEBRA, params.seed)
}

/// `ω(L_ζ h, v) + c·Re(h̄v) = 0`.
pub fn hamiltonian_identity(params: &VerifyParams) -> SuiteResult {
    let mut r = rng(params.seed, 2);
    let n = params.trials.quaternion;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let c = r.gen_range(-2.0..2.0);
        let h = random_quaternion(&mut r, 2.0);
        let v = random_quaternion(&mut r, 2.0);
        worst = worst.max((kahler_pairing(fundamental_field(c, h), v) + moment_pairing_scalar(c, h, v)).abs());
    }
    SuiteResult::new("hamiltonian_identity", n, worst, tol::HAMILTONIAN, params.seed)
        .with("fundamental_field_sign", FUNDAMENTAL_FIELD_SIGN)
}

/// Curvature, `F̂`, χ invariant and each Clifford component of `𝒟_A u`
/// covariant under lattice gauge transformations (link scheme). Defects
/// are relative to `max(1, field scale)`.
pub fn gauge_exactness(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let n = params.trials.gauge;
    let mut worst: f64 = 0.0;
    for t in 0..n {
        let s = derive_seed(params.seed, 3_000 + t as u64);
        let (a, u) = random_config(&grid, s, params.modes);
        let theta = random_smooth_field(&grid, derive_seed(s, 9), params.modes).scaled(std::f64::consts::PI);
        let (ag, ug) = gauge_transform(&theta, &a, &u)?;
        let f0 = curvature(&a);
        let f1 = curvature(&ag);
        let d0 = dirac(&a, &u, DiracScheme::Link)?;
        let d1 = dirac(&ag, &ug, DiracScheme::Link)?;
        let scale = 1f64.max(f0.max_abs()).max(d0.iter().fold(0.0, |m, d| m.max(d.max_abs())));
        let mut defect: f64 = 0.0;
        for (p, q) in f0.components().iter().zip(f1.components()) {
            defect = defect.max(p.sub(q)?.max_abs());
        }
        let h0 = fhat(&a, params.convention);
        let h1 = fhat(&ag, params.convention);
        defect = defect.max(h0.zip_map(&h1, |x, y| (x - y).max_abs())?.max_abs());
        let c0 = residual_chi(&a, &u, params.convention)?;
        let c1 = residual_chi(&ag, &ug, params.convention)?;
        defect = defect.max(c0.zip_map(&c1, |x, y| (x - y).max_abs())?.max_abs());
        for mu in 0..4 {
            let p = DIRAC_PREFIXES[mu];
            let expected = theta.zip_map(&d0[mu], |th, q| p * Quaternion::exp_i(-th) * p.conj() * q)?;
            defect = defect.max(expected.zip_map(&d1[mu], |x, y| (x - y).max_abs())?.max_abs());
        }
        worst = worst.max(defect / scale);
    }
    Ok(SuiteResult::new("gauge_exactness", n, worst, tol::GAUGE, params.seed))
}

/// Residuals of a lifted configuration are the lift of the reduced residuals.
pub fn lift_commutation(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let g2 = grid.factor1();
    let disc = ReducedDiscretization::for_grid(&grid, params.scheme);
    let n = params.trials.lift;
    let mut worst: f64 = 0.0;
    for t in 0..n {
        let c = ReducedConfig::random(g2, derive_seed(params.seed, 4_000 + t as u64), 1.0, params.modes);
        let (k2, d2) = reduced_residual(&c, disc)?;
        let (a, u) = c.lift(&grid)?;
        let k4 = crate::sw_ops::curvature_residual(&a, &u, params.convention)?;
        let d4 = dirac_operator(&a, &u, params.scheme)?;
        let k2l = crate::lattice::lift1(&k2, &grid)?;
        let d2l = crate::lattice::lift1(&d2, &grid)?;
        let scale = 1f64.max(k4.max_abs()).max(d4.max_abs());
        let defect = k4
            .zip_map(&k2l, |x, y| (x - y).max_abs())?
            .max_abs()
            .max(d4.zip_map(&d2l, |x, y| (x - y).max_abs())?.max_abs());
        worst = worst.max(defect / scale);
    }
    Ok(SuiteResult::new("lift_commutation", n, worst, tol::LIFT, params.seed))
}

/// Reduced solve from a seeded start and the residuals of its lift.
pub struct LiftSolveOutcome {
    pub config: ReducedConfig,
    pub trace: crate::solver::SolveTrace,
    /// Sup norm of the reduced residual.
    pub residual_2d: f64,
    /// Sup norm of the 4D residual of the lift.
    pub residual_4d: f64,
}

pub fn run_lift_solve(params: &VerifyParams) -> Result<LiftSolveOutcome> {
    let ls = params.lift_solve;
    let l = ls.length;
    let grid = Grid4::new(
        [ls.sizes[0], ls.sizes[1], ls.transverse_sizes[0], ls.transverse_sizes[1]],
        [l; 4],
    )?;
    let mut c = ReducedConfig::random(grid.factor1(), derive_seed(params.seed, 4_500), ls.amplitude, params.modes);
    c.a0 = c.a0.map(|v| v + ls.holonomy[0]);
    c.a1 = c.a1.map(|v| v + ls.holonomy[1]);
    let disc = ReducedDiscretization::for_grid(&grid, params.scheme);
    let settings = SolveSettings {
        scheme: params.scheme,
        convention: params.convention,
        ..ls.settings
    };
    let (c1, trace) = solve_reduced(&c, disc, &settings)?;
    let (residual_2d, residual_4d) = lift_residuals(&c1, &grid, params.scheme, params.convention)?;
    Ok(LiftSolveOutcome {
        config: c1,
        trace,
        residual_2d,
        residual_4d,
    })
}

/// Sup norms `(reduced, lifted)` of the full residual of `c` and of its
/// lift to `grid`, whose first factor must be the grid of `c`.
pub fn lift_residuals(
    c: &ReducedConfig,
    grid: &Grid4,
    scheme: DiracScheme,
    convention: Convention,
) -> Result<(f64, f64)> {
    let disc = ReducedDiscretization::for_grid(grid, scheme);
    let (k2, d2) = reduced_residual(c, disc)?;
    let (a, u) = c.lift(grid)?;
    let k4 = crate::sw_ops::curvature_residual(&a, &u, convention)?;
    let d4 = dirac_operator(&a, &u, scheme)?;
    Ok((k2.max_abs().max(d2.max_abs()), k4.max_abs().max(d4.max_abs())))
}

/// A reduced solve reaches a small residual and its lift has the same one.
pub fn lift_solve(params: &VerifyParams) -> Result<SuiteResult> {
    let out = run_lift_solve(params)?;
    let mismatch = (out.residual_4d - out.residual_2d).abs();
    let mut r = SuiteResult::new("lift_solve", 1, out.residual_2d, tol::LIFT_SOLVE, params.seed)
        .with("residual_2d", out.residual_2d)
        .with("residual_4d", out.residual_4d)
        .with("residual_mismatch", mismatch)
        .with("steps", out.trace.steps as f64);
    r.pass = r.pass && out.trace.converged && mismatch <= tol::LIFT * out.residual_2d.max(f64::MIN_POSITIVE);
    Ok(r)
}

/// Ω from the full wedge with ω equals the cross-term-free formula.
pub fn cross_terms(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let k = params.kahler.build(&grid)?;
    let n = params.trials.cross_terms;
    let mut worst: f64 = 0.0;
    for t in 0..n {
        let s = derive_seed(params.seed, 5_000 + t as u64);
        let a = TangentVector4::random(&grid, derive_seed(s, 0), params.modes);
        let b = TangentVector4::random(&grid, derive_seed(s, 1), params.modes);
        let cc = omega_cross_check(&a, &b, &k, params.forms)?;
        worst = worst.max((cc.full - cc.decomposed).abs() / cc.full.abs().max(1.0));
    }
    Ok(SuiteResult::new("cross_terms", n, worst, tol::CROSS_TERMS, params.seed))
}

/// Antisymmetry, bilinearity, base-point independence and gauge invariance of Ω.
pub fn omega_algebra(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let k = params.kahler.build(&grid)?;
    let conv = params.forms;
    let n = params.trials.omega;
    let mut r = rng(params.seed, 6);
    let (mut anti, mut bil, mut base, mut gauge): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for t in 0..n {
        let s = derive_seed(params.seed, 6_000 + t as u64);
        let a = TangentVector4::random(&grid, derive_seed(s, 0), params.modes);
        let b = TangentVector4::random(&grid, derive_seed(s, 1), params.modes);
        let c = TangentVector4::random(&grid, derive_seed(s, 2), params.modes);
        let lam = r.gen_range(-2.0..2.0);
        let ab = omega(&a, &b, &k, conv)?;
        let ba = omega(&b, &a, &k, conv)?;
        let cb = omega(&c, &b, &k, conv)?;
        let scale = 1f64.max(ab.abs()).max((lam * cb).abs());
        anti = anti.max((ab + ba).abs() / scale).max(omega(&a, &a, &k, conv)?.abs() / scale);
        let lhs = omega(&a.axpy(lam, &c)?, &b, &k, conv)?;
        bil = bil.max((lhs - ab - lam * cb).abs() / scale);

        let (a0, u0) = random_config(&grid, derive_seed(s, 3), params.modes);
        let (a1, u1) = random_config(&grid, derive_seed(s, 4), params.modes);
        let w0 = omega_at((&a0, &u0), &a, &b, &k, conv)?;
        let w1 = omega_at((&a1, &u1), &a, &b, &k, conv)?;
        base = base.max((w0 - w1).abs() / scale);

        let theta = random_smooth_field(&grid, derive_seed(s, 5), params.modes).scaled(std::f64::consts::PI);
        let wg = omega(&a.rotate_spinor(&theta)?, &b.rotate_spinor(&theta)?, &k, conv)?;
        gauge = gauge.max((wg - ab).abs() / scale);
    }
    let worst = anti.max(bil).max(base).max(gauge);
    Ok(SuiteResult::new("omega_algebra", n, worst, tol::OMEGA, params.seed)
        .with("antisymmetry", anti)
        .with("bilinearity", bil)
        .with("base_point", base)
        .with("gauge", gauge))
}

/// Smallest `Ω(a, twist a)/‖a‖²` over random `a`.
fn definiteness_constant(params: &VerifyParams, conv: FormConventions, n: usize) -> Result<f64> {
    let grid = params.grid()?;
    let k = params.kahler.build(&grid)?;
    let mut c = f64::INFINITY;
    for t in 0..n {
        let a = TangentVector4::random(&grid, derive_seed(params.seed, 7_000 + t as u64), params.modes);
        c = c.min(omega(&a, &twist(&a, conv), &k, conv)? / a.norm_sq());
    }
    Ok(c)
}

/// `Ω(a, twist a) ≥ c‖a‖²` with `c > 0`, and `= 0` at `a = 0`.
pub fn nondegeneracy(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let k = params.kahler.build(&grid)?;
    let n = params.trials.definiteness;
    let c = definiteness_constant(params, params.forms, n)?;
    let z = TangentVector4::zeros(grid);
    let at_zero = omega(&z, &twist(&z, params.forms), &k, params.forms)?;
    // the defect is how far c falls short of positivity
    let defect = (-c).max(at_zero.abs());
    let mut r = SuiteResult::new("nondegeneracy", n, defect, 0.0, params.seed).with("c", c);
    r.pass = c > 0.0 && at_zero == 0.0;
    Ok(r)
}

/// `Ω_Y = κ(Ψ1*Ω1 + Ψ2*Ω1)` with one global κ.
pub fn slice_identity(params: &VerifyParams) -> Result<SuiteResult> {
    let main = params.grid()?;
    let other = Grid4::new([5, 6, 4, 7], [1.1, 0.9, 1.3, 0.8])?;
    let profiles = [params.kahler, KahlerProfile::Constant(2.0), KahlerProfile::Harmonic(0.4)];
    let mut groups: Vec<(Grid4, KahlerProfile, [usize; 2], [usize; 2])> = Vec::new();
    for g in [main, other] {
        let [n0, n1, n2, n3] = g.sizes();
        for prof in profiles {
            groups.push((g, prof, [0, 0], [0, 0]));
            groups.push((g, prof, [n2 - 1, n3 / 2], [n0 / 2, n1 - 1]));
        }
    }
    groups[0].2 = params.p;
    groups[0].3 = params.q;
    let n = params.trials.slice;
    let mut pairs = Vec::with_capacity(n);
    let mut group_pairs: Vec<Vec<(f64, f64)>> = vec![Vec::new(); groups.len()];
    for t in 0..n {
        let gi = t % groups.len();
        let (g, prof, p, q) = groups[gi];
        let k = prof.build(&g)?;
        let s = derive_seed(params.seed, 8_000 + t as u64);
        let a = TangentVector4::random(&g, derive_seed(s, 0), params.modes);
        let b = TangentVector4::random(&g, derive_seed(s, 1), params.modes);
        let y = omega_y(&a, &b, p, q, &k, params.forms)?;
        let x = pullback_sum(&a, &b, p, q, &k, params.forms)?;
        pairs.push((x, y));
        group_pairs[gi].push((x, y));
    }
    let kappa = fit_proportionality(&pairs);
    let worst = pairs
        .iter()
        .map(|(x, y)| (y - kappa * x).abs() / y.abs().max(x.abs()).max(1.0))
        .fold(0.0, f64::max);
    let kappas: Vec<f64> = group_pairs
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| fit_proportionality(g))
        .collect();
    let var = variance(&kappas);
    let mut r = SuiteResult::new("slice_identity", n, worst, tol::SLICE, params.seed)
        .with("kappa", kappa)
        .with("kappa_reference", 1.0)
        .with("kappa_variance", var);
    r.pass = r.pass && var < tol::SLICE_VARIANCE;
    Ok(r)
}

/// Pairs `(D_b P_ε, Ω(V_ε, b))` over random triples and the relative
/// defect after fitting one κ_m, plus the variance of per-group fits.
fn moment_study(
    params: &VerifyParams,
    conv: FormConventions,
    mode: MomentPairing,
    n: usize,
) -> Result<(f64, f64, f64)> {
    let grid = params.grid()?;
    let profiles = [params.kahler, KahlerProfile::Harmonic(0.4)];
    let mut pairs = Vec::with_capacity(n);
    let mut groups: Vec<Vec<(f64, f64)>> = vec![Vec::new(); profiles.len()];
    for t in 0..n {
        let gi = t % profiles.len();
        let k = profiles[gi].build(&grid)?;
        let s = derive_seed(params.seed, 9_000 + t as u64);
        let (a, u) = random_config(&grid, derive_seed(s, 0), params.modes);
        let eps = random_smooth_field(&grid, derive_seed(s, 1), params.modes);
        let b = TangentVector4::random(&grid, derive_seed(s, 2), params.modes);
        let m = moment_sides(&eps, &b, &a, &u, &k, conv, mode)?;
        pairs.push((m.derivative, m.omega));
        groups[gi].push((m.derivative, m.omega));
    }
    let kappa = fit_proportionality(&pairs);
    let worst = pairs
        .iter()
        .map(|(d, w)| (w - kappa * d).abs() / w.abs().max(1.0))
        .fold(0.0, f64::max);
    let kappas: Vec<f64> = groups.iter().map(|g| fit_proportionality(g)).collect();
    Ok((kappa, worst, variance(&kappas)))
}

/// `Ω(V_ε, b) = κ_m·D_b P_ε` with the cup wedge and the scalar pairing.
pub fn moment_identity(params: &VerifyParams) -> Result<SuiteResult> {
    let conv = params.forms.with_stencil(WedgeStencil::Cup);
    let n = params.trials.moment;
    let (kappa, worst, var) = moment_study(params, conv, MomentPairing::Scalar, n)?;
    let mut r = SuiteResult::new("moment_identity", n, worst, tol::MOMENT, params.seed)
        .with("kappa_m", kappa)
        .with("kappa_m_variance", var);
    r.pass = r.pass && var < tol::SLICE_VARIANCE;
    Ok(r)
}

/// Fitted orders of the discretized operators on a doubling ladder.
pub fn discretization_orders(params: &VerifyParams) -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    let mut r = SuiteResult::new("discretization_orders", 0, 0.0, tol::ORDER, params.seed);
    let mut constant_ok = true;
    for op in Operator::ALL {
        let st = convergence::study(op, &params.convergence_sizes, TestData::Harmonic)?;
        let order = st.order.unwrap_or(f64::NAN);
        let dev = (order - op.nominal_order()).abs();
        worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
        r.fitted_constants.insert(format!("order_{}", op.name()), order);
        let cst = convergence::study(op, &params.convergence_sizes, TestData::Constant)?;
        constant_ok &= cst.rows.iter().all(|row| row.error == 0.0);
        r.trials += st.rows.len() + cst.rows.len();
    }
    r.max_defect = worst;
    r.pass = worst < tol::ORDER && constant_ok;
    Ok(r)
}

/// Runs every suite in order.
pub fn run_suites(params: &VerifyParams) -> Result<Vec<SuiteResult>> {
    params.validate()?;
    Ok(vec![
        moment_algebra(params),
        hamiltonian_identity(params),
        gauge_exactness(params)?,
        lift_commutation(params)?,
        lift_solve(params)?,
        cross_terms(params)?,
        omega_algebra(params)?,
        nondegeneracy(params)?,
        slice_identity(params)?,
        moment_identity(params)?,
        discretization_orders(params)?,
    ])
}

/// Measurements that document known limits; they never affect the exit status.
pub fn run_diagnostics(params: &VerifyParams) -> Result<Vec<SuiteResult>> {
    params.validate()?;
    let n = params.trials.moment.min(20);
    let mut out = Vec::new();

    // Scalar pairing with the collocated wedge: consistent κ_m but O(h) defect.
    let conv = params.forms.with_stencil(WedgeStencil::Collocated);
    let (kappa, worst, var) = moment_study(params, conv, MomentPairing::Scalar, n)?;
    out.push(
        SuiteResult::new("moment_identity_collocated", n, worst, tol::MOMENT, params.seed)
            .with("kappa_m", kappa)
            .with("kappa_m_variance", var),
    );

    // Pairing through the first component of χ only.
    for c in [Convention::Paper, Convention::Standard] {
        let conv = params.forms.with_stencil(WedgeStencil::Cup);
        let (kappa, worst, var) = moment_study(params, conv, MomentPairing::FirstComponent(c), n)?;
        let name = match c {
            Convention::Paper => "moment_identity_first_component_paper",
            Convention::Standard => "moment_identity_first_component_standard",
        };
        out.push(
            SuiteResult::new(name, n, worst, tol::MOMENT, params.seed)
                .with("kappa_m", kappa)
                .with("kappa_m_variance", var),
        );
    }

    out.push(cup_doubler(params)?);

    // Definiteness for every sign combination of the collocated ledger.
    let mut scan = SuiteResult::new("sign_scan", 0, 0.0, 0.0, params.seed);
    let m = params.trials.definiteness.min(20);
    for conv in FormConventions::all(WedgeStencil::Collocated) {
        let c = definiteness_constant(params, conv, m)?;
        let tag = |s: Sign| if s == Sign::Plus { "+" } else { "-" };
        scan.fitted_constants.insert(
            format!("c[w{} s1{} s2{}]", tag(conv.wedge_sign), tag(conv.twist_signs.0), tag(conv.twist_signs.1)),
            c,
        );
        scan.trials += m;
    }
    scan.pass = true;
    out.push(scan);
    Ok(out)
}

/// The cup wedge pairs the staggered mode `α0 = (−1)^{x0}` to zero against
/// every tangent, while the collocated wedge does not.
pub fn cup_doubler(params: &VerifyParams) -> Result<SuiteResult> {
    let grid = params.grid()?;
    let k = params.kahler.build(&grid)?;
    if grid.size(0) % 2 != 0 {
        let mut r = SuiteResult::new("cup_doubler", 0, f64::NAN, 0.0, params.seed);
        r.pass = true;
        return Ok(r);
    }
    let g = grid;
    let stag = Field::from_fn(g, |i| if g.coords(i)[0] % 2 == 0 { 1.0 } else { -1.0 });
    let a = TangentVector4::new(stag, Field::zeros(g), Field::zeros(g), Field::zeros(g), Field::zeros(g))?;
    let cup = params.forms.with_stencil(WedgeStencil::Cup);
    let col = params.forms.with_stencil(WedgeStencil::Collocated);
    let mut cup_max: f64 = 0.0;
    let trials = 10;
    for t in 0..trials {
        let b = TangentVector4::random(&grid, derive_seed(params.seed, 9_500 + t), params.modes);
        let norm = (a.norm_sq() * b.norm_sq()).sqrt();
        cup_max = cup_max.max(omega(&a, &b, &k, cup)?.abs() / norm);
    }
    let col_twist = omega(&a, &twist(&a, col), &k, col)? / a.norm_sq();
    let mut r = SuiteResult::new("cup_doubler", trials as usize, cup_max, 0.0, params.seed)
        .with("cup_max_ratio", cup_max)
        .with("collocated_twist_ratio", col_twist);
    r.pass = true;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ledger {
    pub fundamental_field_sign: f64,
    pub forms: FormConventions,
    pub scheme: DiracScheme,
    pub convention: Convention,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub seed: u64,
    pub generator: &'static str,
    pub ledger: Ledger,
    pub suites: Vec<SuiteResult>,
    pub diagnostics: Vec<SuiteResult>,
    pub all_pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs suites and diagnostics and assembles the report. `config` is echoed
/// verbatim.
pub fn run(params: &VerifyParams, config: serde_json::Value, diagnostics: bool) -> Result<Report> {
    let suites = run_suites(params)?;
    let diagnostics = if diagnostics { run_diagnostics(params)? } else { Vec::new() };
    let all_pass = suites.iter().all(|s| s.pass);
    Ok(Report {
        config,
        seed: params.seed,
        generator: GENERATOR,
        ledger: Ledger {
            fundamental_field_sign: FUNDAMENTAL_FIELD_SIGN,
            forms: params.forms,
            scheme: params.scheme,
            convention: params.convention,
        },
        suites,
        diagnostics,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyParams {
        VerifyParams {
            grid_sizes: [4; 4],
            trials: TrialCounts {
                quaternion: 100,
                gauge: 3,
                lift: 3,
                cross_terms: 3,
                omega: 3,
                definiteness: 5,
                slice: 12,
                moment: 4,
            },
            convergence_sizes: vec![4, 8],
            ..VerifyParams::default()
        }
    }

    #[test]
    fn quaternion_suites_pass() {
        let p = small();
        assert!(moment_algebra(&p).pass);
        assert!(hamiltonian_identity(&p).pass);
    }

    #[test]
    fn form_suites_pass_on_small_grid() {
        let p = small();
        for r in [
            gauge_exactness(&p).unwrap(),
            lift_commutation(&p).unwrap(),
            cross_terms(&p).unwrap(),
            omega_algebra(&p).unwrap(),
            nondegeneracy(&p).unwrap(),
            slice_identity(&p).unwrap(),
            moment_identity(&p).unwrap(),
        ] {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn flipped_wedge_sign_fails_only_definiteness_among_form_suites() {
        let mut p = small();
        p.forms = p.forms.with_wedge_sign(Sign::Minus);
        assert!(cross_terms(&p).unwrap().pass);
        assert!(!nondegeneracy(&p).unwrap().pass);
    }

    #[test]
    fn slice_points_are_validated() {
        let mut p = small();
        p.p = [4, 0];
        assert!(p.validate().is_err());
    }

    #[test]
    fn cup_doubler_is_degenerate() {
        let r = cup_doubler(&small()).unwrap();
        assert!(r.max_defect < 1e-14);
        assert!(r.fitted_constants["collocated_twist_ratio"] > 0.2);
    }
}
