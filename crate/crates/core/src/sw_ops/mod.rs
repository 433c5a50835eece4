//! Seiberg–Witten operators on the lattice 4-torus.
//!
//! The connection is `A = i(A0 dx0 + A1 dx1 + A2 dx2 + A3 dx3)` with real
//! coefficient fields, and the section `u` is a quaternion per site. The
//! gauge group acts by `A ↦ A + i dθ`, `u ↦ exp(−iθ)·u`. Covariant
//! derivatives are `∂_μ + iA_μ` with `i` acting by left multiplication.
//!
//! Curvature is built from forward-difference plaquettes, which are exactly
//! gauge invariant. The self-dual triple `F̂_A` and everything downstream use
//! the site-averaged plaquette `½(P(x) + P(x − μ̂ − ν̂))`, centred on the site.

mod reduced;

pub use reduced::{
    lift_config, reduced_curvature, reduced_dirac_terms, reduced_residual, ReducedConfig,
    ReducedDiscretization,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{fwd_diff, Field, Grid, Grid4, ScalarField4};
use crate::quat::{moment_map, MomentValue, Quaternion};
use crate::symplectic::TangentVector4;

pub type SpinorField4 = Field<4, Quaternion>;
pub type SelfDualTriple<const D: usize> = Field<D, MomentValue>;

/// Coordinate planes `(μ, ν)` with `μ < ν`, in storage order.
pub const PLANES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Left prefixes of the `dx0..dx3` components of `𝒟_A u`.
pub const DIRAC_PREFIXES: [Quaternion; 4] = [
    Quaternion::new(-1.0, 0.0, 0.0, 0.0),
    Quaternion::I,
    Quaternion::J,
    Quaternion::K,
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiracScheme {
    /// `(exp(i h A_μ(x))·u(x+μ̂) − u(x)) / h`; exactly gauge covariant.
    #[default]
    Link,
    /// Central difference plus `iA_μ u` pointwise.
    Central,
}

/// Identification of the self-dual part of `F` with ℝ³.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `(F01 − F23, F02 − F13, F03 + F12)`, as written in the local equations.
    #[default]
    Paper,
    /// `(F01 + F23, F02 − F13, F03 + F12)`, the self-dual basis for `dx0∧dx1∧dx2∧dx3`.
    Standard,
}

impl Convention {
    /// Coefficients of the six plane components in each of the three outputs.
    pub fn coefficients(self) -> [[f64; 6]; 3] {
        let s23 = match self {
            Convention::Paper => -1.0,
            Convention::Standard => 1.0,
        };
        [
            [1.0, 0.0, 0.0, 0.0, 0.0, s23],
            [0.0, 1.0, 0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField4 {
    comps: [ScalarField4; 4],
}

impl GaugeField4 {
    pub fn new(comps: [ScalarField4; 4]) -> Result<Self> {
        let grid = *comps[0].grid();
        for c in &comps[1..] {
            grid.check_same(c.grid())?;
        }
        Ok(Self { comps })
    }

    pub fn zeros(grid: Grid4) -> Self {
        Self {
            comps: std::array::from_fn(|_| Field::zeros(grid)),
        }
    }

    pub fn grid(&self) -> &Grid4 {
        self.comps[0].grid()
    }

    pub fn component(&self, mu: usize) -> &ScalarField4 {
        &self.comps[mu]
    }

    pub fn components(&self) -> &[ScalarField4; 4] {
        &self.comps
    }

    pub fn into_components(self) -> [ScalarField4; 4] {
        self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// `self + s·other`, componentwise.
    pub fn axpy(&self, s: f64, other: &GaugeField4) -> Result<Self> {
        let mut comps = Vec::with_capacity(4);
        for mu in 0..4 {
            comps.push(self.comps[mu].axpy(s, &other.comps[mu])?);
        }
        Self::new(comps.try_into().expect("four components"))
    }

    /// Plain `L²` inner product summed over components.
    pub fn inner(&self, other: &GaugeField4) -> Result<f64> {
        let mut total = 0.0;
        for mu in 0..4 {
            total += self.comps[mu].inner(&other.comps[mu])?;
        }
        Ok(total)
    }
}

/// Six plane components `F_{μν}`, `μ < ν`, in [`PLANES`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature4 {
    comps: [ScalarField4; 6],
}

impl Curvature4 {
    pub fn plane(&self, mu: usize, nu: usize) -> &ScalarField4 {
        &self.comps[plane_index(mu, nu)]
    }

    pub fn components(&self) -> &[ScalarField4; 6] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }
}

pub fn plane_index(mu: usize, nu: usize) -> usize {
    PLANES
        .iter()
        .position(|&p| p == (mu, nu))
        .unwrap_or_else(|| panic!("({mu}, {nu}) is not an ordered plane"))
}

/// `P_{μν}(x) = (∂⁺_μ A_ν − ∂⁺_ν A_μ)(x)`, the plaquette based at `x`.
pub fn plaquette<const D: usize>(a_mu: &Field<D>, a_nu: &Field<D>, mu: usize, nu: usize) -> Field<D> {
    fwd_diff(a_nu, mu)
        .sub(&fwd_diff(a_mu, nu))
        .expect("components share a grid")
}

/// `½(P(x) + P(x − μ̂ − ν̂))`.
pub fn site_average<const D: usize>(p: &Field<D>, mu: usize, nu: usize) -> Field<D> {
    let back = p.shifted(mu, -1).shifted(nu, -1);
    p.zip_map(&back, |a, b| 0.5 * (a + b))
        .expect("same grid")
}

/// Adjoint of [`site_average`] with respect to the plain sum.
pub(crate) fn site_average_adjoint<const D: usize>(r: &Field<D>, mu: usize, nu: usize) -> Field<D> {
    let fwd = r.shifted(mu, 1).shifted(nu, 1);
    r.zip_map(&fwd, |a, b| 0.5 * (a + b)).expect("same grid")
}

/// Plaquette curvature `F_{μν} = ∂⁺_μ A_ν − ∂⁺_ν A_μ`.
pub fn curvature(a: &GaugeField4) -> Curvature4 {
    Curvature4 {
        comps: PLANES.map(|(mu, nu)| plaquette(a.component(mu), a.component(nu), mu, nu)),
    }
}

/// Site-averaged curvature, second-order accurate at lattice sites.
pub fn site_curvature(a: &GaugeField4) -> Curvature4 {
    let f = curvature(a);
    Curvature4 {
        comps: std::array::from_fn(|p| {
            let (mu, nu) = PLANES[p];
            site_average(&f.comps[p], mu, nu)
        }),
    }
}

fn combine<const D: usize>(planes: &[&Field<D>; 6], conv: Convention) -> SelfDualTriple<D> {
    let coeff = conv.coefficients();
    let grid = *planes[0].grid();
    Field::from_fn(grid, |i| {
        let k: [f64; 3] = std::array::from_fn(|c| {
            let mut s = 0.0;
            for p in 0..6 {
                s += coeff[c][p] * planes[p].data()[i];
            }
            s
        });
        MomentValue::new(k[0], k[1], k[2])
    })
}

/// `F̂_A`, the three self-dual components of the site-averaged curvature.
pub fn fhat(a: &GaugeField4, conv: Convention) -> SelfDualTriple<4> {
    let f = site_curvature(a);
    let planes: [&ScalarField4; 6] = std::array::from_fn(|p| &f.comps[p]);
    combine(&planes, conv)
}

/// `D_μ u = ∂_μ u + iA_μ u` in the chosen discretization.
pub fn covariant_derivative(
    a: &GaugeField4,
    u: &SpinorField4,
    mu: usize,
    scheme: DiracScheme,
) -> Result<SpinorField4> {
    let grid = *a.grid();
    grid.check_same(u.grid())?;
    let h = grid.spacing(mu);
    let am = a.component(mu).data();
    let ud = u.data();
    Ok(Field::from_fn(grid, |i| {
        covariant_site(&grid, ud, am[i], i, mu, h, scheme)
    }))
}

pub(crate) fn covariant_site<const D: usize>(
    grid: &Grid<D>,
    u: &[Quaternion],
    a_mu: f64,
    i: usize,
    mu: usize,
    h: f64,
    scheme: DiracScheme,
) -> Quaternion {
    match scheme {
        DiracScheme::Link => {
            let link = Quaternion::exp_i(h * a_mu);
            (link * u[grid.neighbor(i, mu, 1)] - u[i]).scale(1.0 / h)
        }
        DiracScheme::Central => {
            let d = (u[grid.neighbor(i, mu, 1)] - u[grid.neighbor(i, mu, -1)]).scale(1.0 / (2.0 * h));
            d + (Quaternion::I * u[i]).scale(a_mu)
        }
    }
}

/// The four `dx_μ` coefficient fields of `𝒟_A u`: `(−D0u, i·D1u, j·D2u, k·D3u)`.
pub fn dirac(a: &GaugeField4, u: &SpinorField4, scheme: DiracScheme) -> Result<[SpinorField4; 4]> {
    let mut out = Vec::with_capacity(4);
    for mu in 0..4 {
        let d = covariant_derivative(a, u, mu, scheme)?;
        let p = DIRAC_PREFIXES[mu];
        out.push(d.map(move |q| p * q));
    }
    Ok(out.try_into().expect("four components"))
}

/// `F̂_A − μ∘u`, site by site.
pub fn curvature_residual(a: &GaugeField4, u: &SpinorField4, conv: Convention) -> Result<SelfDualTriple<4>> {
    a.grid().check_same(u.grid())?;
    let fh = fhat(a, conv);
    fh.zip_map(u, |f, q| f - moment_map(q))
}

/// `χ(A, u) = ⅛(F̂_A − μ∘u)`.
pub fn residual_chi(a: &GaugeField4, u: &SpinorField4, conv: Convention) -> Result<SelfDualTriple<4>> {
    Ok(curvature_residual(a, u, conv)?.map(|m| m.scale(0.125)))
}

/// `A_μ ↦ A_μ + ∂⁺_μ θ`, `u ↦ exp(−iθ)·u`.
pub fn gauge_transform(
    theta: &ScalarField4,
    a: &GaugeField4,
    u: &SpinorField4,
) -> Result<(GaugeField4, SpinorField4)> {
    a.grid().check_same(theta.grid())?;
    a.grid().check_same(u.grid())?;
    let mut comps = Vec::with_capacity(4);
    for mu in 0..4 {
        comps.push(a.component(mu).add(&fwd_diff(theta, mu))?);
    }
    let a_new = GaugeField4::new(comps.try_into().expect("four components"))?;
    let u_new = theta.zip_map(u, |t, q| Quaternion::exp_i(-t) * q)?;
    Ok((a_new, u_new))
}

/// Infinitesimal gauge action: `δA_μ = ∂⁺_μ ε`, `δu = −iεu`.
pub fn gauge_tangent(eps: &ScalarField4, u: &SpinorField4) -> Result<TangentVector4> {
    eps.grid().check_same(u.grid())?;
    let zeta = eps.zip_map(u, |e, q| (Quaternion::I * q).scale(-e))?;
    TangentVector4::new(
        fwd_diff(eps, 0),
        fwd_diff(eps, 1),
        fwd_diff(eps, 2),
        fwd_diff(eps, 3),
        zeta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{random_smooth_field, random_smooth_spinor, Grid4};
    use std::f64::consts::PI;

    fn grid() -> Grid4 {
        Grid4::new([4, 5, 6, 4], [1.0, 1.3, 0.9, 1.1]).unwrap()
    }

    fn random_gauge(g: &Grid4, seed: u64) -> GaugeField4 {
        GaugeField4::new(std::array::from_fn(|mu| random_smooth_field(g, seed * 10 + mu as u64, 3)))
            .unwrap()
    }

    #[test]
    fn zero_curvature() {
        let g = grid();
        assert_eq!(curvature(&GaugeField4::zeros(g)).max_abs(), 0.0);
        assert_eq!(fhat(&GaugeField4::zeros(g), Convention::Paper).max_abs(), 0.0);
    }

    #[test]
    fn pure_gauge_is_flat() {
        let g = grid();
        let theta = random_smooth_field(&g, 3, 4);
        let (a, _) = gauge_transform(&theta, &GaugeField4::zeros(g), &Field::zeros(g)).unwrap();
        assert!(curvature(&a).max_abs() < 1e-12 * a.max_abs());
    }

    #[test]
    fn plaquette_first_order_on_sine() {
        let mut errs = Vec::new();
        for n in [8usize, 16, 32] {
            let g = Grid4::unit([n, 4, 4, 4]).unwrap();
            let mut comps: [ScalarField4; 4] = std::array::from_fn(|_| Field::zeros(g));
            comps[1] = Field::from_fn(g, |i| (2.0 * PI * g.position(i)[0]).sin());
            let f = curvature(&GaugeField4::new(comps).unwrap());
            let err = Field::from_fn(g, |i| {
                f.plane(0, 1).data()[i] - 2.0 * PI * (2.0 * PI * g.position(i)[0]).cos()
            })
            .max_abs();
            errs.push(err);
        }
        assert!(((errs[1] / errs[2]).log2() - 1.0).abs() < 0.1);
    }

    #[test]
    fn conventions_differ_by_twice_f23() {
        let g = grid();
        let a = random_gauge(&g, 1);
        let p = fhat(&a, Convention::Paper);
        let s = fhat(&a, Convention::Standard);
        let f23 = site_curvature(&a).plane(2, 3).clone();
        for i in 0..g.site_count() {
            let (pi, si) = (p.data()[i], s.data()[i]);
            assert!((si.m1 - pi.m1 - 2.0 * f23.data()[i]).abs() < 1e-12);
            assert_eq!(si.m2, pi.m2);
            assert_eq!(si.m3, pi.m3);
        }
    }

    #[test]
    fn fhat_matches_componentwise_expansion() {
        // K1 = ∂0A1 − ∂1A0 + ∂3A2 − ∂2A3 etc., each from its own site-averaged plaquette.
        let g = grid();
        let a = random_gauge(&g, 2);
        let avg = |mu: usize, nu: usize| {
            site_average(&plaquette(a.component(mu), a.component(nu), mu, nu), mu, nu)
        };
        let (f01, f02, f03, f12, f13, f23) = (avg(0, 1), avg(0, 2), avg(0, 3), avg(1, 2), avg(1, 3), avg(2, 3));
        let k = fhat(&a, Convention::Paper);
        for i in 0..g.site_count() {
            let m = k.data()[i];
            assert!((m.m1 - (f01.data()[i] - f23.data()[i])).abs() < 1e-12);
            assert!((m.m2 - (f02.data()[i] - f13.data()[i])).abs() < 1e-12);
            assert!((m.m3 - (f03.data()[i] + f12.data()[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_of_constant_spinor_without_connection() {
        let g = grid();
        let u = Field::constant(g, Quaternion::new(0.3, -0.2, 0.5, 0.1));
        for scheme in [DiracScheme::Link, DiracScheme::Central] {
            let d = dirac(&GaugeField4::zeros(g), &u, scheme).unwrap();
            assert!(d.iter().all(|c| c.max_abs() < 1e-14));
        }
    }

    #[test]
    fn link_covariant_derivative_is_gauge_covariant() {
        let g = grid();
        let a = random_gauge(&g, 4);
        let u = random_smooth_spinor(&g, 5, 3);
        let theta = random_smooth_field(&g, 6, 3);
        let (ag, ug) = gauge_transform(&theta, &a, &u).unwrap();
        for mu in 0..4 {
            let d = covariant_derivative(&a, &u, mu, DiracScheme::Link).unwrap();
            let dg = covariant_derivative(&ag, &ug, mu, DiracScheme::Link).unwrap();
            for i in 0..g.site_count() {
                let expected = Quaternion::exp_i(-theta.data()[i]) * d.data()[i];
                assert!((dg.data()[i] - expected).max_abs() < 1e-12 * (1.0 + d.max_abs()));
            }
        }
    }

    #[test]
    fn dirac_components_rotate_with_prefix_conjugated_phase() {
        // p·g⁻¹ = (p g⁻¹ p⁻¹)·p: phase g⁻¹ for dx0, dx1 and g for dx2, dx3.
        let g = grid();
        let a = random_gauge(&g, 7);
        let u = random_smooth_spinor(&g, 8, 3);
        let theta = random_smooth_field(&g, 9, 3);
        let (ag, ug) = gauge_transform(&theta, &a, &u).unwrap();
        let d = dirac(&a, &u, DiracScheme::Link).unwrap();
        let dg = dirac(&ag, &ug, DiracScheme::Link).unwrap();
        for mu in 0..4 {
            let p = DIRAC_PREFIXES[mu];
            for i in 0..g.site_count() {
                let ginv = Quaternion::exp_i(-theta.data()[i]);
                let phase = p * ginv * p.conj();
                let expected = phase * d[mu].data()[i];
                assert!((dg[mu].data()[i] - expected).max_abs() < 1e-12 * (1.0 + d[mu].max_abs()));
                assert!((dg[mu].data()[i].norm() - d[mu].data()[i].norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chi_values() {
        let g = grid();
        let zero = GaugeField4::zeros(g);
        assert_eq!(residual_chi(&zero, &Field::zeros(g), Convention::Paper).unwrap().max_abs(), 0.0);
        let u = Field::constant(g, Quaternion::ONE + Quaternion::J);
        let chi = residual_chi(&zero, &u, Convention::Paper).unwrap();
        assert!(chi.data().iter().all(|m| *m == MomentValue::new(0.0, 0.0, -0.125)));
    }

    #[test]
    fn chi_and_curvature_gauge_invariant() {
        let g = grid();
        let a = random_gauge(&g, 10);
        let u = random_smooth_spinor(&g, 11, 3);
        let theta = random_smooth_field(&g, 12, 4);
        let (ag, ug) = gauge_transform(&theta, &a, &u).unwrap();
        let scale = a.max_abs() + theta.max_abs();
        for p in 0..6 {
            let d = curvature(&a).components()[p].sub(&curvature(&ag).components()[p]).unwrap();
            assert!(d.max_abs() < 1e-12 * scale * 100.0);
        }
        for conv in [Convention::Paper, Convention::Standard] {
            let c0 = residual_chi(&a, &u, conv).unwrap();
            let c1 = residual_chi(&ag, &ug, conv).unwrap();
            let d = c0.zip_map(&c1, |x, y| x - y).unwrap();
            assert!(d.max_abs() < 1e-12 * scale * 100.0);
        }
    }

    #[test]
    fn gauge_transform_identity_and_composition() {
        let g = grid();
        let a = random_gauge(&g, 13);
        let u = random_smooth_spinor(&g, 14, 3);
        let (a0, u0) = gauge_transform(&Field::zeros(g), &a, &u).unwrap();
        assert_eq!(a0, a);
        assert_eq!(u0, u);

        let t1 = random_smooth_field(&g, 15, 3);
        let t2 = random_smooth_field(&g, 16, 3);
        let (a1, u1) = gauge_transform(&t1, &a, &u).unwrap();
        let (a12, u12) = gauge_transform(&t2, &a1, &u1).unwrap();
        let (as_, us) = gauge_transform(&t1.add(&t2).unwrap(), &a, &u).unwrap();
        assert!(a12.axpy(-1.0, &as_).unwrap().max_abs() < 1e-12);
        assert!(u12.zip_map(&us, |p, q| p - q).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn constant_gauge_rotation_keeps_norms() {
        let g = grid();
        let a = random_gauge(&g, 17);
        let u = random_smooth_spinor(&g, 18, 3);
        let theta = Field::constant(g, 0.9);
        let (ag, ug) = gauge_transform(&theta, &a, &u).unwrap();
        assert_eq!(ag, a);
        for (p, q) in u.data().iter().zip(ug.data()) {
            assert!((moment_map(*p) - moment_map(*q)).max_abs() < 1e-12);
        }
        let d = dirac(&a, &u, DiracScheme::Link).unwrap();
        let dg = dirac(&ag, &ug, DiracScheme::Link).unwrap();
        for mu in 0..4 {
            for i in 0..g.site_count() {
                assert!((d[mu].data()[i].norm() - dg[mu].data()[i].norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gauge_tangent_matches_finite_difference() {
        let g = grid();
        let a = random_gauge(&g, 19);
        let u = random_smooth_spinor(&g, 20, 3);
        let eps = random_smooth_field(&g, 21, 3);
        let v = gauge_tangent(&eps, &u).unwrap();
        let mut defects = Vec::new();
        for t in [1e-2, 5e-3] {
            let (at, ut) = gauge_transform(&eps.scaled(t), &a, &u).unwrap();
            let da = at.axpy(-1.0, &a).unwrap();
            let mut d = 0.0f64;
            for (mu, comp) in v.form_components().iter().enumerate() {
                let diff = da.component(mu).scaled(1.0 / t).sub(comp).unwrap();
                d = d.max(diff.max_abs());
            }
            let du = ut.zip_map(&u, |p, q| (p - q).scale(1.0 / t)).unwrap();
            d = d.max(du.zip_map(v.zeta(), |p, q| p - q).unwrap().max_abs());
            defects.push(d);
        }
        // O(t) defect: halving t halves it
        let ratio = defects[0] / defects[1];
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");

        let zero = gauge_tangent(&Field::zeros(g), &u).unwrap();
        assert_eq!(zero.norm_sq(), 0.0);
        let c = gauge_tangent(&Field::constant(g, 0.4), &u).unwrap();
        assert!(c.form_components().iter().all(|f| f.max_abs() == 0.0));
        for (z, q) in c.zeta().data().iter().zip(u.data()) {
            assert_eq!(*z, (Quaternion::I * *q).scale(-0.4));
        }
    }
}
