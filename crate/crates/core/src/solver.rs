//! Gradient flow for the residual energy
//! `E = ‖F̂_A − μ∘u‖² + ‖𝒟_A u‖²` on the 4-torus and its reduction to Σ.
//!
//! Gradients are `L²` gradients (derivative divided by the cell volume),
//! assembled from the adjoints of the forward differences, the site average
//! and the link phases. Descent uses a fixed step that is halved whenever a
//! step would increase the energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{bwd_diff, Field, Grid, ScalarField2, ScalarField4};
use crate::quat::{moment_gradients, MomentValue, Quaternion};
use crate::sw_ops::{
    covariant_derivative, curvature_residual, dirac, reduced_dirac_terms, reduced_residual,
    site_average_adjoint, Convention, DiracScheme, GaugeField4, ReducedConfig, ReducedDiscretization, SelfDualTriple, SpinorField4,
    DIRAC_PREFIXES, PLANES,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    pub max_steps: usize,
    pub step_size: f64,
    /// Target for the residual norm `√E`.
    pub tol: f64,
    pub scheme: DiracScheme,
    pub convention: Convention,
    pub report_every: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            max_steps: 100_000,
            step_size: 1e-2,
            tol: 1e-8,
            scheme: DiracScheme::Link,
            convention: Convention::Paper,
            report_every: 100,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidSettings(format!("step_size must be positive, got {}", self.step_size)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSettings(format!("tol must be positive, got {}", self.tol)));
        }
        if self.report_every == 0 {
            return Err(Error::InvalidSettings("report_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub energy: f64,
    /// `‖F̂_A − μ∘u‖`.
    pub curvature_residual: f64,
    /// `‖𝒟_A u‖`.
    pub dirac_residual: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub steps: usize,
    pub rejected: usize,
    pub final_step_size: f64,
}

impl SolveTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_residual(&self) -> f64 {
        self.last().map_or(0.0, |r| r.energy.sqrt())
    }

    /// `step,energy,curvature_residual,dirac_residual,grad_norm` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,energy,curvature_residual,dirac_residual,grad_norm\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{:e},{:e},{:e},{:e}\n",
                r.step, r.energy, r.curvature_residual, r.dirac_residual, r.grad_norm
            ));
        }
        s
    }
}

/// The two squared residual norms making up the energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    pub curvature: f64,
    pub dirac: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.curvature + self.dirac
    }
}

fn integral_norm_sq<const D: usize>(f: &SelfDualTriple<D>) -> f64 {
    f.map(|m| m.norm_sq()).integral()
}

fn spinor_norm_sq<const D: usize>(f: &Field<D, Quaternion>) -> f64 {
    f.map(|q| q.norm_sq()).integral()
}

/// `𝒟_A u = −D0u + i D1u + j D2u + k D3u`, summed into one spinor.
pub fn dirac_operator(a: &GaugeField4, u: &SpinorField4, scheme: DiracScheme) -> Result<SpinorField4> {
    let parts = dirac(a, u, scheme)?;
    Ok(sum_terms(&parts))
}

fn sum_terms<const D: usize>(parts: &[Field<D, Quaternion>; 4]) -> Field<D, Quaternion> {
    Field::from_fn(*parts[0].grid(), |i| {
        let mut s = Quaternion::ZERO;
        for p in parts {
            s += p.data()[i];
        }
        s
    })
}

/// `Σ_μ ‖p_μ D_μ u‖²`, the norm of the Dirac residual as a field with one
/// spinor per Clifford direction. Each term is gauge invariant, whereas the
/// norm of the summed spinor is not: `j` and `k` anticommute with the `i`
/// of the gauge phase.
fn clifford_norm_sq<const D: usize>(parts: &[Field<D, Quaternion>; 4]) -> f64 {
    parts.iter().map(spinor_norm_sq).sum()
}

pub fn energy_parts(a: &GaugeField4, u: &SpinorField4, settings: &SolveSettings) -> Result<EnergyParts> {
    let r = curvature_residual(a, u, settings.convention)?;
    let d = dirac(a, u, settings.scheme)?;
    Ok(EnergyParts {
        curvature: integral_norm_sq(&r),
        dirac: clifford_norm_sq(&d),
    })
}

pub fn energy(a: &GaugeField4, u: &SpinorField4, settings: &SolveSettings) -> Result<f64> {
    Ok(energy_parts(a, u, settings)?.total())
}

/// `−2 Σ_k r_k ∇μ_k(u)`, the spinor gradient of `|r|²` with `r = F̂ − μ(u)`.
fn moment_term(r: MomentValue, u: Quaternion) -> Quaternion {
    let g = moment_gradients(u);
    let r = r.to_array();
    (g[0].scale(r[0]) + g[1].scale(r[1]) + g[2].scale(r[2])).scale(-2.0)
}

/// `Σ_c coeff[c][p]·r_c`, the residual seen by plane `p`.
fn plane_weight<const D: usize>(r: &SelfDualTriple<D>, coeff: &[[f64; 6]; 3], p: usize) -> Option<Field<D>> {
    if coeff.iter().all(|c| c[p] == 0.0) {
        return None;
    }
    Some(r.map(|m| {
        let v = m.to_array();
        coeff[0][p] * v[0] + coeff[1][p] * v[1] + coeff[2][p] * v[2]
    }))
}

/// Gradient of `|plaquette-average|²` terms: adds `2·∂P^T·avg^T(w)` into
/// the `μ` and `ν` components.
fn add_plaquette_adjoint<const D: usize>(
    ga: &mut [Vec<f64>],
    w: &Field<D>,
    mu: usize,
    nu: usize,
    (i_mu, i_nu): (usize, usize),
) {
    let wbar = site_average_adjoint(w, mu, nu);
    // P = ∂⁺_μ A_ν − ∂⁺_ν A_μ and (∂⁺)^T = −∂⁻
    let d_mu = bwd_diff(&wbar, mu);
    let d_nu = bwd_diff(&wbar, nu);
    for (i, g) in ga[i_nu].iter_mut().enumerate() {
        *g -= 2.0 * d_mu.data()[i];
    }
    for (i, g) in ga[i_mu].iter_mut().enumerate() {
        *g += 2.0 * d_nu.data()[i];
    }
}

/// Adjoint contribution of one lattice covariant derivative with residual
/// `R` (already multiplied by the conjugate prefix).
#[allow(clippy::too_many_arguments)]
fn add_covariant_adjoint<const D: usize>(
    grid: &Grid<D>,
    ga: &mut [f64],
    gu: &mut [Quaternion],
    r: &[Quaternion],
    u: &[Quaternion],
    a: &[f64],
    mu: usize,
    scheme: DiracScheme,
) {
    let h = grid.spacing(mu);
    let n = grid.site_count();
    match scheme {
        DiracScheme::Link => {
            for x in 0..n {
                let link = Quaternion::exp_i(h * a[x]);
                let up = u[grid.neighbor(x, mu, 1)];
                ga[x] += 2.0 * r[x].dot(Quaternion::I * link * up);
            }
            for y in 0..n {
                let xm = grid.neighbor(y, mu, -1);
                let link = Quaternion::exp_i(h * a[xm]);
                gu[y] += (link.conj() * r[xm] - r[y]).scale(2.0 / h);
            }
        }
        DiracScheme::Central => {
            for x in 0..n {
                ga[x] += 2.0 * r[x].dot(Quaternion::I * u[x]);
            }
            for y in 0..n {
                let back = r[grid.neighbor(y, mu, -1)];
                let fwd = r[grid.neighbor(y, mu, 1)];
                gu[y] += (back - fwd).scale(1.0 / h) - (Quaternion::I * r[y]).scale(2.0 * a[y]);
            }
        }
    }
}

/// Analytic `L²` gradient of [`energy`].
pub fn gradient(
    a: &GaugeField4,
    u: &SpinorField4,
    settings: &SolveSettings,
) -> Result<(GaugeField4, SpinorField4)> {
    let grid = *a.grid();
    grid.check_same(u.grid())?;
    let n = grid.site_count();
    let r = curvature_residual(a, u, settings.convention)?;
    let coeff = settings.convention.coefficients();

    let mut ga: Vec<Vec<f64>> = vec![vec![0.0; n]; 4];
    for (p, &(mu, nu)) in PLANES.iter().enumerate() {
        if let Some(w) = plane_weight(&r, &coeff, p) {
            add_plaquette_adjoint(&mut ga, &w, mu, nu, (mu, nu));
        }
    }

    let ud = u.data();
    let mut gu: Vec<Quaternion> = (0..n).map(|i| moment_term(r.data()[i], ud[i])).collect();
    for (mu, g) in ga.iter_mut().enumerate() {
        let dm = covariant_derivative(a, u, mu, settings.scheme)?;
        add_covariant_adjoint(
            &grid,
            g,
            &mut gu,
            dm.data(),
            ud,
            a.component(mu).data(),
            mu,
            settings.scheme,
        );
    }

    let comps: Vec<ScalarField4> = ga
        .into_iter()
        .map(|v| Field::from_vec(grid, v))
        .collect::<Result<_>>()?;
    Ok((
        GaugeField4::new(comps.try_into().expect("four components"))?,
        Field::from_vec(grid, gu)?,
    ))
}

struct Flow<S> {
    parts: Box<dyn Fn(&S) -> Result<EnergyParts>>,
    /// Returns the gradient and its squared `L²` norm.
    grad: Box<dyn Fn(&S) -> Result<(S, f64)>>,
    /// `x − τ·g`.
    step: Box<dyn Fn(&S, f64, &S) -> Result<S>>,
}

fn record(step: usize, e: EnergyParts, gn2: f64) -> TraceRecord {
    TraceRecord {
        step,
        energy: e.total(),
        curvature_residual: e.curvature.sqrt(),
        dirac_residual: e.dirac.sqrt(),
        grad_norm: gn2.sqrt(),
    }
}

fn run_flow<S: Clone>(start: S, settings: &SolveSettings, flow: Flow<S>) -> Result<(S, SolveTrace)> {
    settings.validate()?;
    let mut x = start;
    let mut e = (flow.parts)(&x)?;
    let mut tau = settings.step_size;
    let mut trace = SolveTrace::default();
    let mut step = 0;
    loop {
        let converged = e.total().sqrt() < settings.tol;
        let (g, gn2) = (flow.grad)(&x)?;
        let at_checkpoint = step % settings.report_every == 0;
        if converged || step >= settings.max_steps || gn2 == 0.0 {
            trace.records.push(record(step, e, gn2));
            trace.converged = converged;
            break;
        }
        if at_checkpoint {
            trace.records.push(record(step, e, gn2));
        }
        let mut accepted = false;
        while tau > f64::MIN_POSITIVE {
            let trial = (flow.step)(&x, tau, &g)?;
            let et = (flow.parts)(&trial)?;
            if et.total() <= e.total() {
                x = trial;
                e = et;
                accepted = true;
                break;
            }
            trace.rejected += 1;
            tau *= 0.5;
        }
        if !accepted {
            trace.records.push(record(step, e, gn2));
            break;
        }
        step += 1;
    }
    trace.steps = step;
    trace.final_step_size = tau;
    Ok((x, trace))
}

fn gauge_norm_sq(g: &GaugeField4) -> f64 {
    g.inner(g).expect("same grid")
}

/// Gradient descent on `E` from `(A, u)`. Non-convergence is reported in
/// the trace, not as an error.
pub fn descend(
    a: &GaugeField4,
    u: &SpinorField4,
    settings: &SolveSettings,
) -> Result<(GaugeField4, SpinorField4, SolveTrace)> {
    a.grid().check_same(u.grid())?;
    let s = *settings;
    let flow: Flow<(GaugeField4, SpinorField4)> = Flow {
        parts: Box::new(move |x| energy_parts(&x.0, &x.1, &s)),
        grad: Box::new(move |x| {
            let (ga, gu) = gradient(&x.0, &x.1, &s)?;
            let n2 = gauge_norm_sq(&ga) + gu.inner(&gu)?;
            Ok(((ga, gu), n2))
        }),
        step: Box::new(|x, tau, g| {
            Ok((x.0.axpy(-tau, &g.0)?, x.1.zip_map(&g.1, |p, q| p - q.scale(tau))?))
        }),
    };
    let ((a1, u1), trace) = run_flow((a.clone(), u.clone()), settings, flow)?;
    Ok((a1, u1, trace))
}

/// Squared norms of the two reduced residuals.
pub fn reduced_energy_parts(c: &ReducedConfig, disc: ReducedDiscretization) -> Result<EnergyParts> {
    let (k, _) = reduced_residual(c, disc)?;
    Ok(EnergyParts {
        curvature: integral_norm_sq(&k),
        dirac: clifford_norm_sq(&reduced_dirac_terms(c, disc)),
    })
}

pub fn reduced_energy(c: &ReducedConfig, disc: ReducedDiscretization) -> Result<f64> {
    Ok(reduced_energy_parts(c, disc)?.total())
}

/// `T^T w` for `T φ = ½(∂⁺φ(x) + ∂⁺φ(x − μ̂))`.
fn transverse_adjoint(w: &ScalarField2, mu: usize) -> ScalarField2 {
    let fwd = w.shifted(mu, 1);
    let avg = w.zip_map(&fwd, |p, q| 0.5 * (p + q)).expect("same grid");
    bwd_diff(&avg, mu).scaled(-1.0)
}

/// Analytic `L²` gradient of [`reduced_energy`], packed as a configuration.
pub fn reduced_gradient(c: &ReducedConfig, disc: ReducedDiscretization) -> Result<ReducedConfig> {
    let grid = *c.grid();
    let n = grid.site_count();
    let (k, _) = reduced_residual(c, disc)?;
    let terms = reduced_dirac_terms(c, disc);
    let ud = c.u.data();

    let mut ga: Vec<Vec<f64>> = vec![vec![0.0; n]; 4];
    add_plaquette_adjoint(&mut ga, &k.component(0), 0, 1, (0, 1));
    let (r2, r3) = (k.component(1), k.component(2));
    // K2 = T0 φ1 − T1 φ2,  K3 = T0 φ2 + T1 φ1
    let g_phi1 = transverse_adjoint(&r2, 0).add(&transverse_adjoint(&r3, 1))?;
    let g_phi2 = transverse_adjoint(&r3, 0).sub(&transverse_adjoint(&r2, 1))?;
    for (i, (p1, p2)) in g_phi1.data().iter().zip(g_phi2.data()).enumerate() {
        ga[2][i] += 2.0 * p1;
        ga[3][i] += 2.0 * p2;
    }

    let mut gu: Vec<Quaternion> = (0..n).map(|i| moment_term(k.data()[i], ud[i])).collect();
    let comps = c.gauge_components();
    for mu in 0..4 {
        // strip the Clifford prefix; the energy only sees |p_μ T| = |T|
        let pc = DIRAC_PREFIXES[mu].conj();
        let rm: Vec<Quaternion> = terms[mu].data().iter().map(|q| pc * *q).collect();
        let a = comps[mu].data();
        if mu < 2 {
            add_covariant_adjoint(&grid, &mut ga[mu], &mut gu, &rm, ud, a, mu, disc.scheme);
            continue;
        }
        let tau = disc.transverse[mu - 2];
        for x in 0..n {
            match disc.scheme {
                DiracScheme::Link => {
                    let link = Quaternion::exp_i(tau * a[x]);
                    ga[mu][x] += 2.0 * rm[x].dot(Quaternion::I * link * ud[x]);
                    gu[x] += (link.conj() * rm[x] - rm[x]).scale(2.0 / tau);
                }
                DiracScheme::Central => {
                    ga[mu][x] += 2.0 * rm[x].dot(Quaternion::I * ud[x]);
                    gu[x] -= (Quaternion::I * rm[x]).scale(2.0 * a[x]);
                }
            }
        }
    }

    let mut it = ga.into_iter().map(|v| Field::from_vec(grid, v));
    ReducedConfig::new(
        it.next().expect("a0")?,
        it.next().expect("a1")?,
        it.next().expect("phi1")?,
        it.next().expect("phi2")?,
        Field::from_vec(grid, gu)?,
    )
}

fn reduced_axpy(x: &ReducedConfig, s: f64, g: &ReducedConfig) -> Result<ReducedConfig> {
    ReducedConfig::new(
        x.a0.axpy(s, &g.a0)?,
        x.a1.axpy(s, &g.a1)?,
        x.phi1.axpy(s, &g.phi1)?,
        x.phi2.axpy(s, &g.phi2)?,
        x.u.zip_map(&g.u, |p, q| p + q.scale(s))?,
    )
}

fn reduced_norm_sq(g: &ReducedConfig) -> f64 {
    let forms: f64 = g
        .gauge_components()
        .iter()
        .map(|f| f.inner(f).expect("same grid"))
        .sum();
    forms + g.u.inner(&g.u).expect("same grid")
}

/// Gradient descent on the reduced energy. `settings.scheme` is overridden
/// by `disc.scheme`.
pub fn solve_reduced(
    c: &ReducedConfig,
    disc: ReducedDiscretization,
    settings: &SolveSettings,
) -> Result<(ReducedConfig, SolveTrace)> {
    let flow: Flow<ReducedConfig> = Flow {
        parts: Box::new(move |x| reduced_energy_parts(x, disc)),
        grad: Box::new(move |x| {
            let g = reduced_gradient(x, disc)?;
            let n2 = reduced_norm_sq(&g);
            Ok((g, n2))
        }),
        step: Box::new(|x, tau, g| reduced_axpy(x, -tau, g)),
    };
    run_flow(c.clone(), settings, flow)
}
