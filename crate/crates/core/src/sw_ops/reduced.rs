//! Dimensionally reduced equations on Σ and the lift to Σ×Σ.
//!
//! A reduced configuration is a connection `a = i(a0 dx0 + a1 dx1)`, two
//! Higgs components `φ1 = A2`, `φ2 = A3` and a spinor `ũ`, all depending on
//! `(x0, x1)` only. The stencils mirror the 4D operators evaluated on fields
//! that are constant along `(x2, x3)`, so lifting commutes with taking
//! residuals exactly.

use crate::error::{Error, Result};
use crate::lattice::{
    derive_seed, fwd_diff, lift1, random_smooth_field, random_smooth_spinor, Field, Grid2, Grid4,
    ScalarField2,
};
use crate::quat::{moment_map, MomentValue, Quaternion};

use super::{
    covariant_site, site_average, DiracScheme, GaugeField4, SelfDualTriple, SpinorField4,
    DIRAC_PREFIXES,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedConfig {
    pub a0: ScalarField2,
    pub a1: ScalarField2,
    pub phi1: ScalarField2,
    pub phi2: ScalarField2,
    pub u: Field<2, Quaternion>,
}

/// How the Higgs terms `j a2 ũ`, `k a3 ũ` are discretized.
///
/// With the link scheme the transverse covariant derivative of a lifted
/// field is `(exp(iτ a)·ũ − ũ)/τ`, so the transverse spacings `τ` of the
/// target 4D grid are part of the reduced operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDiscretization {
    pub scheme: DiracScheme,
    pub transverse: [f64; 2],
}

impl ReducedDiscretization {
    /// Matches the 4D operators on `grid`.
    pub fn for_grid(grid: &Grid4, scheme: DiracScheme) -> Self {
        Self {
            scheme,
            transverse: [grid.spacing(2), grid.spacing(3)],
        }
    }
}

impl ReducedConfig {
    pub fn new(
        a0: ScalarField2,
        a1: ScalarField2,
        phi1: ScalarField2,
        phi2: ScalarField2,
        u: Field<2, Quaternion>,
    ) -> Result<Self> {
        let g = *a0.grid();
        g.check_same(a1.grid())?;
        g.check_same(phi1.grid())?;
        g.check_same(phi2.grid())?;
        g.check_same(u.grid())?;
        Ok(Self { a0, a1, phi1, phi2, u })
    }

    pub fn zeros(grid: Grid2) -> Self {
        Self {
            a0: Field::zeros(grid),
            a1: Field::zeros(grid),
            phi1: Field::zeros(grid),
            phi2: Field::zeros(grid),
            u: Field::zeros(grid),
        }
    }

    /// Smooth random configuration with every component scaled by `amplitude`.
    pub fn random(grid: Grid2, seed: u64, amplitude: f64, modes: usize) -> Self {
        let f = |stream: u64| random_smooth_field(&grid, derive_seed(seed, stream), modes).scaled(amplitude);
        let u = random_smooth_spinor(&grid, derive_seed(seed, 4), modes).map(move |q| q.scale(amplitude));
        Self {
            a0: f(0),
            a1: f(1),
            phi1: f(2),
            phi2: f(3),
            u,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        self.a0.grid()
    }

    /// `(a0, a1, φ1, φ2)` in the order of the 4D components `A0..A3`.
    pub fn gauge_components(&self) -> [&ScalarField2; 4] {
        [&self.a0, &self.a1, &self.phi1, &self.phi2]
    }

    pub fn max_abs(&self) -> f64 {
        self.gauge_components()
            .iter()
            .fold(self.u.max_abs(), |m, c| m.max(c.max_abs()))
    }

    /// `A(x0, x1, x2, x3) = (a0, a1, φ1, φ2)(x0, x1)`, `u = ũ(x0, x1)`.
    pub fn lift(&self, target: &Grid4) -> Result<(GaugeField4, SpinorField4)> {
        lift_config(self, target)
    }
}

pub fn lift_config(c: &ReducedConfig, target: &Grid4) -> Result<(GaugeField4, SpinorField4)> {
    let comps = [
        lift1(&c.a0, target)?,
        lift1(&c.a1, target)?,
        lift1(&c.phi1, target)?,
        lift1(&c.phi2, target)?,
    ];
    Ok((GaugeField4::new(comps)?, lift1(&c.u, target)?))
}

/// `½(∂⁺_μ φ(x) + ∂⁺_μ φ(x − μ̂))`, the site-averaged plaquette of a
/// component that is constant along its transverse direction.
fn transverse_average(phi: &ScalarField2, mu: usize) -> ScalarField2 {
    let p = fwd_diff(phi, mu);
    let back = p.shifted(mu, -1);
    p.zip_map(&back, |a, b| 0.5 * (a + b)).expect("same grid")
}

/// Left side of the reduced curvature equations:
/// `(∂0a1 − ∂1a0, ∂0a2 − ∂1a3, ∂0a3 + ∂1a2)`.
pub fn reduced_curvature(c: &ReducedConfig) -> SelfDualTriple<2> {
    let f01 = site_average(&super::plaquette(&c.a0, &c.a1, 0, 1), 0, 1);
    let f02 = transverse_average(&c.phi1, 0);
    let f13 = transverse_average(&c.phi2, 1);
    let f03 = transverse_average(&c.phi2, 0);
    let f12 = transverse_average(&c.phi1, 1);
    let grid = *c.grid();
    Field::from_fn(grid, |i| {
        MomentValue::new(
            f01.data()[i],
            f02.data()[i] - f13.data()[i],
            f03.data()[i] + f12.data()[i],
        )
    })
}

/// The four terms `−D0ũ`, `i D1ũ`, `j T2ũ`, `k T3ũ` of the reduced Dirac
/// operator, where `T` is the transverse covariant derivative of a lifted
/// field (`i a ũ` in the central scheme).
pub fn reduced_dirac_terms(c: &ReducedConfig, disc: ReducedDiscretization) -> [Field<2, Quaternion>; 4] {
    let grid = *c.grid();
    let ud = c.u.data();
    let comps = c.gauge_components();
    std::array::from_fn(|mu| {
        let a = comps[mu].data();
        let p = DIRAC_PREFIXES[mu];
        Field::from_fn(grid, |i| {
            let d = if mu < 2 {
                covariant_site(&grid, ud, a[i], i, mu, grid.spacing(mu), disc.scheme)
            } else {
                transverse_site(ud[i], a[i], disc.transverse[mu - 2], disc.scheme)
            };
            p * d
        })
    })
}

pub(crate) fn transverse_site(u: Quaternion, a: f64, tau: f64, scheme: DiracScheme) -> Quaternion {
    match scheme {
        DiracScheme::Link => (Quaternion::exp_i(tau * a) * u - u).scale(1.0 / tau),
        DiracScheme::Central => Quaternion::ZERO + (Quaternion::I * u).scale(a),
    }
}

/// Residuals of the reduced equations: the curvature part `K − μ∘ũ` and the
/// Dirac part `−(∂0 + ia0)ũ + i(∂1 + ia1)ũ + j(ia2)ũ + k(ia3)ũ`.
pub fn reduced_residual(
    c: &ReducedConfig,
    disc: ReducedDiscretization,
) -> Result<(SelfDualTriple<2>, Field<2, Quaternion>)> {
    if disc.scheme == DiracScheme::Link && disc.transverse.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidSettings("link scheme needs positive transverse spacings".into()));
    }
    let k = reduced_curvature(c);
    let curv = k.zip_map(&c.u, |f, q| f - moment_map(q))?;
    let terms = reduced_dirac_terms(c, disc);
    let grid = *c.grid();
    let dir = Field::from_fn(grid, |i| {
        let mut s = Quaternion::ZERO;
        for t in &terms {
            s += t.data()[i];
        }
        s
    });
    Ok((curv, dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lift1, Grid4};
    use crate::sw_ops::{curvature_residual, dirac, fhat, Convention};

    fn grids() -> (Grid2, Grid4) {
        let g4 = Grid4::new([6, 5, 4, 7], [1.0, 1.2, 0.8, 1.4]).unwrap();
        (g4.factor1(), g4)
    }

    fn sum_components(d: &[SpinorField4; 4]) -> SpinorField4 {
        let g = *d[0].grid();
        Field::from_fn(g, |i| {
            let mut s = Quaternion::ZERO;
            for c in d {
                s += c.data()[i];
            }
            s
        })
    }

    #[test]
    fn zero_config_has_zero_residual() {
        let (g2, g4) = grids();
        let disc = ReducedDiscretization::for_grid(&g4, DiracScheme::Link);
        let (k, d) = reduced_residual(&ReducedConfig::zeros(g2), disc).unwrap();
        assert_eq!(k.max_abs(), 0.0);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn constant_unit_spinor() {
        let (g2, g4) = grids();
        let mut c = ReducedConfig::zeros(g2);
        c.u = Field::constant(g2, Quaternion::ONE);
        let (k, d) = reduced_residual(&c, ReducedDiscretization::for_grid(&g4, DiracScheme::Link)).unwrap();
        assert_eq!(d.max_abs(), 0.0);
        assert!(k.data().iter().all(|m| *m == MomentValue::new(-0.5, 0.0, 0.0)));
    }

    #[test]
    fn lifted_conventions_agree_and_match_reduced_curvature() {
        let (g2, g4) = grids();
        let c = ReducedConfig::random(g2, 3, 0.7, 3);
        let (a, _) = c.lift(&g4).unwrap();
        let paper = fhat(&a, Convention::Paper);
        let standard = fhat(&a, Convention::Standard);
        assert_eq!(paper, standard);
        let lifted = lift1(&reduced_curvature(&c), &g4).unwrap();
        assert_eq!(paper, lifted);
    }

    #[test]
    fn lift_commutes_with_residuals() {
        let (g2, g4) = grids();
        for seed in 0..10 {
            let c = ReducedConfig::random(g2, seed, 0.8, 3);
            let (a, u) = c.lift(&g4).unwrap();
            for scheme in [DiracScheme::Link, DiracScheme::Central] {
                let disc = ReducedDiscretization::for_grid(&g4, scheme);
                let (k2, d2) = reduced_residual(&c, disc).unwrap();
                let k4 = curvature_residual(&a, &u, Convention::Paper).unwrap();
                assert_eq!(k4, lift1(&k2, &g4).unwrap());
                let d4 = dirac(&a, &u, scheme).unwrap();
                let terms = reduced_dirac_terms(&c, disc);
                for mu in 0..4 {
                    assert_eq!(d4[mu], lift1(&terms[mu], &g4).unwrap());
                }
                assert_eq!(sum_components(&d4), lift1(&d2, &g4).unwrap());
            }
        }
    }

    #[test]
    fn central_terms_reproduce_reduced_dirac_formula() {
        // −(∂0ũ + i a0 ũ) + i(∂1ũ + i a1 ũ) + j(i a2)ũ + k(i a3)ũ with central ∂.
        let (g2, g4) = grids();
        let c = ReducedConfig::random(g2, 8, 0.6, 2);
        let (_, d) = reduced_residual(&c, ReducedDiscretization::for_grid(&g4, DiracScheme::Central)).unwrap();
        let u = &c.u;
        for i in 0..g2.site_count() {
            let cd = |mu: usize| {
                let h = g2.spacing(mu);
                (u.data()[g2.neighbor(i, mu, 1)] - u.data()[g2.neighbor(i, mu, -1)]).scale(0.5 / h)
            };
            let iu = Quaternion::I * u.data()[i];
            let expected = -(cd(0) + iu.scale(c.a0.data()[i]))
                + Quaternion::I * (cd(1) + iu.scale(c.a1.data()[i]))
                + Quaternion::J * iu.scale(c.phi1.data()[i])
                + Quaternion::K * iu.scale(c.phi2.data()[i]);
            assert!((d.data()[i] - expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn link_scheme_rejects_zero_transverse_spacing() {
        let (g2, _) = grids();
        let disc = ReducedDiscretization {
            scheme: DiracScheme::Link,
            transverse: [0.0, 0.1],
        };
        assert!(reduced_residual(&ReducedConfig::zeros(g2), disc).is_err());
    }
}
