//! The 2-form Ω on configuration space and its relatives.
//!
//! A tangent vector at `(A, u)` is `(α − η, ζ)` with `α = i(α0 dx0 + α1 dx1)`,
//! `η = −i(c2 dx2 + c3 dx3)` and `ζ` a quaternion field, so the connection
//! variation has real components `(α0, α1, c2, c3)`. With
//! `ω = f1 dx0∧dx1 + f2 dx2∧dx3`:
//!
//! ```text
//! Ω(a, b)   = ¼ ∫ (α_a − η_a)∧(α_b − η_b)∧ω + ⅛ ∫ ⟨iζ_a, ζ_b⟩ ω∧ω
//! Ω_Y(a, b) = ¼ ∫_{Σ×{p}} (α∧α + η∧η) + ¼ ∫_{Σ×{p}} ⟨iζ_a, ζ_b⟩ ω_Σ + (same on {q}×Σ)
//! Ω1(X, Y)  = g^C(I1 X, Y),  I1 = diag(*, I, −*)
//! ```
//!
//! The product of two iℝ-valued 1-forms is the real wedge times the wedge
//! sign of [`FormConventions`]. Lattice wedges come in two stencils, see
//! [`WedgeStencil`].

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{
    derive_seed, random_smooth_field, random_smooth_spinor, restrict, Factor, Field, Grid, Grid4,
    KahlerData, ScalarField2, ScalarField4,
};
use crate::quat::{moment_map, Quaternion};
use crate::sw_ops::{fhat, gauge_tangent, site_curvature, Convention, GaugeField4, SpinorField4};

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector4 {
    alpha0: ScalarField4,
    alpha1: ScalarField4,
    c2: ScalarField4,
    c3: ScalarField4,
    zeta: SpinorField4,
}

impl TangentVector4 {
    pub fn new(
        alpha0: ScalarField4,
        alpha1: ScalarField4,
        c2: ScalarField4,
        c3: ScalarField4,
        zeta: SpinorField4,
    ) -> Result<Self> {
        let g = *alpha0.grid();
        for f in [&alpha1, &c2, &c3] {
            g.check_same(f.grid())?;
        }
        g.check_same(zeta.grid())?;
        Ok(Self {
            alpha0,
            alpha1,
            c2,
            c3,
            zeta,
        })
    }

    pub fn zeros(grid: Grid4) -> Self {
        Self {
            alpha0: Field::zeros(grid),
            alpha1: Field::zeros(grid),
            c2: Field::zeros(grid),
            c3: Field::zeros(grid),
            zeta: Field::zeros(grid),
        }
    }

    pub fn from_parts(forms: GaugeField4, zeta: SpinorField4) -> Result<Self> {
        let [a0, a1, c2, c3] = forms.into_components();
        Self::new(a0, a1, c2, c3, zeta)
    }

    /// Smooth random tangent; each part drawn from its own seed stream.
    pub fn random(grid: &Grid4, seed: u64, modes: usize) -> Self {
        let f = |s: u64| random_smooth_field(grid, derive_seed(seed, s), modes);
        Self {
            alpha0: f(0),
            alpha1: f(1),
            c2: f(2),
            c3: f(3),
            zeta: random_smooth_spinor(grid, derive_seed(seed, 4), modes),
        }
    }

    pub fn grid(&self) -> &Grid4 {
        self.alpha0.grid()
    }

    /// `(α0, α1, c2, c3)`, the real components of `α − η`.
    pub fn form_components(&self) -> [&ScalarField4; 4] {
        [&self.alpha0, &self.alpha1, &self.c2, &self.c3]
    }

    pub fn zeta(&self) -> &SpinorField4 {
        &self.zeta
    }

    /// The connection part as a gauge-field increment.
    pub fn forms(&self) -> GaugeField4 {
        GaugeField4::new([
            self.alpha0.clone(),
            self.alpha1.clone(),
            self.c2.clone(),
            self.c3.clone(),
        ])
        .expect("components share a grid")
    }

    /// Plain `L²` norm squared over all components.
    pub fn norm_sq(&self) -> f64 {
        let forms: f64 = self
            .form_components()
            .iter()
            .map(|f| f.inner(f).expect("same grid"))
            .sum();
        forms + self.zeta.inner(&self.zeta).expect("same grid")
    }

    pub fn max_abs(&self) -> f64 {
        self.form_components()
            .iter()
            .fold(self.zeta.max_abs(), |m, f| m.max(f.max_abs()))
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &TangentVector4) -> Result<Self> {
        Self::new(
            self.alpha0.axpy(s, &other.alpha0)?,
            self.alpha1.axpy(s, &other.alpha1)?,
            self.c2.axpy(s, &other.c2)?,
            self.c3.axpy(s, &other.c3)?,
            self.zeta.zip_map(&other.zeta, |p, q| p + q.scale(s))?,
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            alpha0: self.alpha0.scaled(s),
            alpha1: self.alpha1.scaled(s),
            c2: self.c2.scaled(s),
            c3: self.c3.scaled(s),
            zeta: self.zeta.map(move |q| q.scale(s)),
        }
    }

    /// Same forms, spinor part left-multiplied by `exp(−iθ)` site by site.
    pub fn rotate_spinor(&self, theta: &ScalarField4) -> Result<Self> {
        let mut out = self.clone();
        out.zeta = theta.zip_map(&self.zeta, |t, q| Quaternion::exp_i(-t) * q)?;
        Ok(out)
    }
}

/// Tangent vector on the reduced configuration space `C_Σ`: a connection
/// variation, a spinor variation and a Higgs variation viewed as a 1-form on Σ.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTangent {
    pub conn: [ScalarField2; 2],
    pub xi: Field<2, Quaternion>,
    pub higgs: [ScalarField2; 2],
}

impl ReducedTangent {
    pub fn zeros(grid: Grid<2>) -> Self {
        Self {
            conn: [Field::zeros(grid), Field::zeros(grid)],
            xi: Field::zeros(grid),
            higgs: [Field::zeros(grid), Field::zeros(grid)],
        }
    }

    pub fn random(grid: &Grid<2>, seed: u64, modes: usize) -> Self {
        let f = |s: u64| random_smooth_field(grid, derive_seed(seed, s), modes);
        Self {
            conn: [f(0), f(1)],
            xi: random_smooth_spinor(grid, derive_seed(seed, 2), modes),
            higgs: [f(3), f(4)],
        }
    }

    pub fn grid(&self) -> &Grid<2> {
        self.conn[0].grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.conn
            .iter()
            .chain(self.higgs.iter())
            .fold(self.xi.max_abs(), |m, f| m.max(f.max_abs()))
    }

    pub fn norm_sq(&self) -> f64 {
        let forms: f64 = self
            .conn
            .iter()
            .chain(self.higgs.iter())
            .map(|f| f.inner(f).expect("same grid"))
            .sum();
        forms + self.xi.inner(&self.xi).expect("same grid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Lattice discretization of the wedge product of two 1-forms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WedgeStencil {
    /// Both forms evaluated at the same site: `a_μ b_ν − a_ν b_μ`.
    /// Nondegenerate on every lattice mode.
    #[default]
    Collocated,
    /// Antisymmetrized cubical cup product. Satisfies the Leibniz rule with
    /// forward differences, so gauge directions pair exactly with the
    /// site-averaged plaquette; degenerate on modes with `k_μ + k_ν = π`.
    Cup,
}

/// Sign ledger for Ω, Ω_Y, Ω1 and the twist map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormConventions {
    /// Factor from wedging two iℝ-valued forms.
    pub wedge_sign: Sign,
    /// Signs `(s1, s2)` applied to the starred form part and to `Iζ` in [`twist`].
    pub twist_signs: (Sign, Sign),
    pub stencil: WedgeStencil,
}

impl FormConventions {
    /// Frozen ledger: the unique sign choice for which `g^C` is positive,
    /// `Ω(a, twist a)` is positive and the moment identity holds with one
    /// global constant.
    pub const FROZEN: Self = Self {
        wedge_sign: Sign::Plus,
        twist_signs: (Sign::Plus, Sign::Plus),
        stencil: WedgeStencil::Collocated,
    };

    pub fn with_stencil(mut self, stencil: WedgeStencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn with_wedge_sign(mut self, s: Sign) -> Self {
        self.wedge_sign = s;
        self
    }

    /// All eight sign combinations for a given stencil.
    pub fn all(stencil: WedgeStencil) -> Vec<Self> {
        let signs = [Sign::Plus, Sign::Minus];
        let mut out = Vec::new();
        for w in signs {
            for s1 in signs {
                for s2 in signs {
                    out.push(Self {
                        wedge_sign: w,
                        twist_signs: (s1, s2),
                        stencil,
                    });
                }
            }
        }
        out
    }
}

impl Default for FormConventions {
    fn default() -> Self {
        Self::FROZEN
    }
}

/// Per-site wedge density of two 1-forms in the `(μ, ν)` plane.
fn wedge_density<const D: usize>(
    grid: &Grid<D>,
    a: [&[f64]; 2],
    b: [&[f64]; 2],
    mu: usize,
    nu: usize,
    stencil: WedgeStencil,
) -> Field<D> {
    let grid = *grid;
    Field::from_fn(grid, |x| match stencil {
        WedgeStencil::Collocated => a[0][x] * b[1][x] - a[1][x] * b[0][x],
        WedgeStencil::Cup => {
            let xm = grid.neighbor(x, mu, 1);
            let xn = grid.neighbor(x, nu, 1);
            0.5 * (a[0][x] * b[1][xm] - a[1][x] * b[0][xn] - b[0][x] * a[1][xm] + b[1][x] * a[0][xn])
        }
    })
}

/// Hodge star of a 1-form on a 2D grid, `*dx0 = dx1`, `*dx1 = −dx0`.
///
/// The cup stencil uses the averaged star for which the pointwise pairing
/// `⟨*α, β⟩` equals the cup wedge `α∧β`.
pub fn hodge_star2(alpha: [&ScalarField2; 2], stencil: WedgeStencil) -> [ScalarField2; 2] {
    let grid = *alpha[0].grid();
    let (a0, a1) = (alpha[0].data(), alpha[1].data());
    match stencil {
        WedgeStencil::Collocated => [alpha[1].scaled(-1.0), alpha[0].clone()],
        WedgeStencil::Cup => [
            Field::from_fn(grid, |y| {
                -0.5 * (a1[grid.neighbor(y, 1, -1)] + a1[grid.neighbor(y, 0, 1)])
            }),
            Field::from_fn(grid, |y| {
                0.5 * (a0[grid.neighbor(y, 0, -1)] + a0[grid.neighbor(y, 1, 1)])
            }),
        ],
    }
}

/// Pointwise Hodge star on one Σ factor of a 4D field pair.
fn star4(alpha: [&ScalarField4; 2]) -> [ScalarField4; 2] {
    [alpha[1].scaled(-1.0), alpha[0].clone()]
}

fn spinor_density(a: &SpinorField4, b: &SpinorField4) -> Result<ScalarField4> {
    a.zip_map(b, |p, q| (Quaternion::I * p).dot(q))
}

/// `Ω(a, b)`.
pub fn omega(a: &TangentVector4, b: &TangentVector4, k: &KahlerData, conv: FormConventions) -> Result<f64> {
    let grid = *a.grid();
    grid.check_same(b.grid())?;
    k.check_grid(&grid)?;
    let sw = conv.wedge_sign.value();
    let w01 = wedge_density(
        &grid,
        [a.alpha0.data(), a.alpha1.data()],
        [b.alpha0.data(), b.alpha1.data()],
        0,
        1,
        conv.stencil,
    );
    let w23 = wedge_density(
        &grid,
        [a.c2.data(), a.c3.data()],
        [b.c2.data(), b.c3.data()],
        2,
        3,
        conv.stencil,
    );
    let spin = spinor_density(&a.zeta, &b.zeta)?;
    let density = Field::from_fn(grid, |i| {
        let (f1, f2) = (k.f1_at(&grid, i), k.f2_at(&grid, i));
        0.25 * sw * (w01.data()[i] * f2 + w23.data()[i] * f1) + 0.125 * spin.data()[i] * 2.0 * f1 * f2
    });
    Ok(density.integral())
}

/// `Ω(a, b)` evaluated with a base configuration attached. The metric on ℍ
/// is flat, so the value does not depend on the base point; the base only
/// has to live on the same grid.
pub fn omega_at(
    base: (&GaugeField4, &SpinorField4),
    a: &TangentVector4,
    b: &TangentVector4,
    k: &KahlerData,
    conv: FormConventions,
) -> Result<f64> {
    a.grid().check_same(base.0.grid())?;
    a.grid().check_same(base.1.grid())?;
    omega(a, b, k, conv)
}

/// Ω evaluated twice: from the full wedge of the 4-component forms with
/// `ω` (cross terms included) and from the cross-term-free formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub full: f64,
    pub decomposed: f64,
}

pub fn omega_cross_check(
    a: &TangentVector4,
    b: &TangentVector4,
    k: &KahlerData,
    conv: FormConventions,
) -> Result<CrossCheck> {
    let grid = *a.grid();
    grid.check_same(b.grid())?;
    k.check_grid(&grid)?;
    let sw = conv.wedge_sign.value();
    let va = a.form_components().map(|f| f.data());
    let vb = b.form_components().map(|f| f.data());
    let planes: Vec<ScalarField4> = crate::sw_ops::PLANES
        .iter()
        .map(|&(mu, nu)| wedge_density(&grid, [va[mu], va[nu]], [vb[mu], vb[nu]], mu, nu, conv.stencil))
        .collect();
    let spin = spinor_density(&a.zeta, &b.zeta)?;
    let full = Field::from_fn(grid, |i| {
        let (f1, f2) = (k.f1_at(&grid, i), k.f2_at(&grid, i));
        // ω as a 2-form in PLANES order
        let om = [f1, 0.0, 0.0, 0.0, 0.0, f2];
        let w: Vec<f64> = planes.iter().map(|p| p.data()[i]).collect();
        let wedge = |x: &[f64], y: &[f64]| {
            x[0] * y[5] - x[1] * y[4] + x[2] * y[3] + x[3] * y[2] - x[4] * y[1] + x[5] * y[0]
        };
        0.25 * sw * wedge(&w, &om) + 0.125 * spin.data()[i] * wedge(&om, &om)
    })
    .integral();

    let w01 = &planes[0];
    let w23 = &planes[5];
    let decomposed = Field::from_fn(grid, |i| {
        let (f1, f2) = (k.f1_at(&grid, i), k.f2_at(&grid, i));
        // (π1*ω_Σ + π2*ω_Σ)∧ω with ω_Σ = f/2 on each factor
        let mixed = 0.5 * f1 * f2 + 0.5 * f2 * f1;
        0.25 * sw * w01.data()[i] * f2 + 0.25 * sw * w23.data()[i] * f1 + 0.25 * spin.data()[i] * mixed
    })
    .integral();
    Ok(CrossCheck { full, decomposed })
}

struct Slice {
    alpha: [ScalarField2; 2],
    c: [ScalarField2; 2],
    zeta: Field<2, Quaternion>,
}

fn slice(a: &TangentVector4, factor: Factor, at: [usize; 2]) -> Result<Slice> {
    Ok(Slice {
        alpha: [restrict(&a.alpha0, factor, at)?, restrict(&a.alpha1, factor, at)?],
        c: [restrict(&a.c2, factor, at)?, restrict(&a.c3, factor, at)?],
        zeta: restrict(&a.zeta, factor, at)?,
    })
}

fn slice_term(sa: &Slice, sb: &Slice, weight: &ScalarField2, conv: FormConventions) -> Result<f64> {
    let g = *sa.zeta.grid();
    let sw = conv.wedge_sign.value();
    let wa = wedge_density(
        &g,
        [sa.alpha[0].data(), sa.alpha[1].data()],
        [sb.alpha[0].data(), sb.alpha[1].data()],
        0,
        1,
        conv.stencil,
    );
    let wc = wedge_density(
        &g,
        [sa.c[0].data(), sa.c[1].data()],
        [sb.c[0].data(), sb.c[1].data()],
        0,
        1,
        conv.stencil,
    );
    let spin = sa.zeta.zip_map(&sb.zeta, |p, q| (Quaternion::I * p).dot(q))?;
    let w = weight.data();
    Ok(Field::from_fn(g, |i| {
        0.25 * sw * (wa.data()[i] + wc.data()[i]) + 0.25 * spin.data()[i] * 0.5 * w[i]
    })
    .integral())
}

/// `Ω_Y(a, b)` on `Y = Σ×{p} ∪ {q}×Σ`. On each slice the two 1-form pairs
/// are read as components in the slice coframe, and the spinor term is
/// weighted by `ω_Σ = f/2` of that factor.
pub fn omega_y(
    a: &TangentVector4,
    b: &TangentVector4,
    p: [usize; 2],
    q: [usize; 2],
    k: &KahlerData,
    conv: FormConventions,
) -> Result<f64> {
    let grid = *a.grid();
    grid.check_same(b.grid())?;
    k.check_grid(&grid)?;
    let first = slice_term(
        &slice(a, Factor::First, p)?,
        &slice(b, Factor::First, p)?,
        k.f1(),
        conv,
    )?;
    let second = slice_term(
        &slice(a, Factor::Second, q)?,
        &slice(b, Factor::Second, q)?,
        k.f2(),
        conv,
    )?;
    Ok(first + second)
}

/// `g^C(X, Y) = ½∫α_X·α_Y + ½∫⟨ξ_X, ξ_Y⟩ ω_Σ + ½∫η_X·η_Y`, with the wedge
/// sign applied to the iℝ-valued form pairs.
pub fn metric_c(x: &ReducedTangent, y: &ReducedTangent, f: &ScalarField2, conv: FormConventions) -> Result<f64> {
    let g = *x.grid();
    g.check_same(y.grid())?;
    g.check_same(f.grid())?;
    let sw = conv.wedge_sign.value();
    let (fd, xa, ya, xh, yh) = (f.data(), &x.conn, &y.conn, &x.higgs, &y.higgs);
    let xi = x.xi.zip_map(&y.xi, |p, q| p.dot(q))?;
    Ok(Field::from_fn(g, |i| {
        let conn = xa[0].data()[i] * ya[0].data()[i] + xa[1].data()[i] * ya[1].data()[i];
        let higgs = xh[0].data()[i] * yh[0].data()[i] + xh[1].data()[i] * yh[1].data()[i];
        0.5 * sw * conn + 0.5 * xi.data()[i] * 0.5 * fd[i] + 0.5 * sw * higgs
    })
    .integral())
}

/// `I1 = diag(*, I, −*)`.
pub fn complex_structure_i1(x: &ReducedTangent, stencil: WedgeStencil) -> ReducedTangent {
    let conn = hodge_star2([&x.conn[0], &x.conn[1]], stencil);
    let [h0, h1] = hodge_star2([&x.higgs[0], &x.higgs[1]], stencil);
    ReducedTangent {
        conn,
        xi: x.xi.map(|q| Quaternion::I * q),
        higgs: [h0.scaled(-1.0), h1.scaled(-1.0)],
    }
}

/// `Ω1(X, Y) = g^C(I1 X, Y)` on the reduced configuration space.
pub fn omega1_sigma(
    x: &ReducedTangent,
    y: &ReducedTangent,
    f: &ScalarField2,
    conv: FormConventions,
) -> Result<f64> {
    metric_c(&complex_structure_i1(x, conv.stencil), y, f, conv)
}

/// Differential of `Ψ1`: restriction to `Σ×{p}`. The Higgs components are
/// read with reversed orientation, `(c2, −c3)`.
pub fn pushforward_psi1(a: &TangentVector4, p: [usize; 2]) -> Result<ReducedTangent> {
    let s = slice(a, Factor::First, p)?;
    let [c2, c3] = s.c;
    Ok(ReducedTangent {
        conn: s.alpha,
        xi: s.zeta,
        higgs: [c2, c3.scaled(-1.0)],
    })
}

/// Differential of `Ψ2`: restriction to `{q}×Σ`, where `(c2, c3)` is the
/// connection and `(α0, −α1)` the Higgs part.
pub fn pushforward_psi2(a: &TangentVector4, q: [usize; 2]) -> Result<ReducedTangent> {
    let s = slice(a, Factor::Second, q)?;
    let [a0, a1] = s.alpha;
    Ok(ReducedTangent {
        conn: s.c,
        xi: s.zeta,
        higgs: [a0, a1.scaled(-1.0)],
    })
}

/// `(Ψ1*Ω1 + Ψ2*Ω1)(a, b)`.
pub fn pullback_sum(
    a: &TangentVector4,
    b: &TangentVector4,
    p: [usize; 2],
    q: [usize; 2],
    k: &KahlerData,
    conv: FormConventions,
) -> Result<f64> {
    k.check_grid(a.grid())?;
    let first = omega1_sigma(&pushforward_psi1(a, p)?, &pushforward_psi1(b, p)?, k.f1(), conv)?;
    let second = omega1_sigma(&pushforward_psi2(a, q)?, &pushforward_psi2(b, q)?, k.f2(), conv)?;
    Ok(first + second)
}

/// `|Ω_Y(a, b) − κ·(Ψ1*Ω1 + Ψ2*Ω1)(a, b)|`.
#[allow(clippy::too_many_arguments)]
pub fn pullback_identity_defect(
    a: &TangentVector4,
    b: &TangentVector4,
    p: [usize; 2],
    q: [usize; 2],
    k: &KahlerData,
    conv: FormConventions,
    kappa: f64,
) -> Result<f64> {
    let y = omega_y(a, b, p, q, k, conv)?;
    let s = pullback_sum(a, b, p, q, k, conv)?;
    Ok((y - kappa * s).abs())
}

/// Least-squares constant `κ` with `y ≈ κ·x` over `(x, y)` pairs.
pub fn fit_proportionality(pairs: &[(f64, f64)]) -> f64 {
    let sxy: f64 = pairs.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `b = (s1·(*α − *η), s2·Iζ)` with the star taken on each Σ factor.
pub fn twist(a: &TangentVector4, conv: FormConventions) -> TangentVector4 {
    let s1 = conv.twist_signs.0.value();
    let s2 = conv.twist_signs.1.value();
    let [a0, a1] = star4([&a.alpha0, &a.alpha1]);
    let [c2, c3] = star4([&a.c2, &a.c3]);
    TangentVector4 {
        alpha0: a0.scaled(s1),
        alpha1: a1.scaled(s1),
        c2: c2.scaled(s1),
        c3: c3.scaled(s1),
        zeta: a.zeta.map(move |q| (Quaternion::I * q).scale(s2)),
    }
}

/// How the spinor term of χ is paired with a Lie-algebra element `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentPairing {
    /// `⟨μ(u), ε⟩ = ε·½|u|²`, whose differential is `(ε/2)(dū u + ū du)`;
    /// the curvature enters as `F∧ω`, which equals `½F̂1 ω∧ω` for flat factors.
    Scalar,
    /// `ε·χ1(A, u)·ω∧ω` with the first component of `χ` in the given convention.
    FirstComponent(Convention),
}

/// `P_ε(A, u)`, the pairing of `χ(A, u)` with `ε`.
pub fn moment_pairing(
    eps: &ScalarField4,
    a: &GaugeField4,
    u: &SpinorField4,
    k: &KahlerData,
    mode: MomentPairing,
) -> Result<f64> {
    let grid = *a.grid();
    grid.check_same(eps.grid())?;
    grid.check_same(u.grid())?;
    k.check_grid(&grid)?;
    let e = eps.data();
    let ud = u.data();
    let density = match mode {
        MomentPairing::Scalar => {
            let f = site_curvature(a);
            let (f01, f23) = (f.plane(0, 1).data(), f.plane(2, 3).data());
            Field::from_fn(grid, |i| {
                let (f1, f2) = (k.f1_at(&grid, i), k.f2_at(&grid, i));
                let f_wedge_omega = f01[i] * f2 + f23[i] * f1;
                0.125 * e[i] * (2.0 * f_wedge_omega - 0.5 * ud[i].norm_sq() * 2.0 * f1 * f2)
            })
        }
        MomentPairing::FirstComponent(c) => {
            let fh = fhat(a, c);
            let fd = fh.data();
            Field::from_fn(grid, |i| {
                let (f1, f2) = (k.f1_at(&grid, i), k.f2_at(&grid, i));
                let chi1 = 0.125 * (fd[i].m1 - moment_map(ud[i]).m1);
                e[i] * chi1 * 2.0 * f1 * f2
            })
        }
    };
    Ok(density.integral())
}

/// Both sides of the moment identity: `Ω(V_ε, b)` and the directional
/// derivative `D_b P_ε` by central differences along `(A + tβ, u + tζ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSides {
    pub omega: f64,
    pub derivative: f64,
}

/// Default relative step for the directional derivative of `P_ε`.
pub const MOMENT_FD_STEP: f64 = 1e-4;

#[allow(clippy::too_many_arguments)]
pub fn moment_sides(
    eps: &ScalarField4,
    b: &TangentVector4,
    a: &GaugeField4,
    u: &SpinorField4,
    k: &KahlerData,
    conv: FormConventions,
    mode: MomentPairing,
) -> Result<MomentSides> {
    let v = gauge_tangent(eps, u)?;
    let om = omega(&v, b, k, conv)?;
    let field_scale = a.max_abs().max(u.max_abs()).max(1.0);
    let bmax = b.max_abs();
    if bmax == 0.0 {
        return Ok(MomentSides {
            omega: om,
            derivative: 0.0,
        });
    }
    let t = MOMENT_FD_STEP * field_scale / bmax;
    let beta = b.forms();
    let at = |s: f64| -> Result<f64> {
        let a1 = a.axpy(s, &beta)?;
        let u1 = u.zip_map(b.zeta(), |p, q| p + q.scale(s))?;
        moment_pairing(eps, &a1, &u1, k, mode)
    };
    let derivative = (at(t)? - at(-t)?) / (2.0 * t);
    Ok(MomentSides {
        omega: om,
        derivative,
    })
}

/// `|Ω(V_ε, b) − κ_m·D_b P_ε|`.
#[allow(clippy::too_many_arguments)]
pub fn moment_identity_defect(
    eps: &ScalarField4,
    b: &TangentVector4,
    a: &GaugeField4,
    u: &SpinorField4,
    k: &KahlerData,
    conv: FormConventions,
    mode: MomentPairing,
    kappa_m: f64,
) -> Result<f64> {
    let s = moment_sides(eps, b, a, u, k, conv, mode)?;
    Ok((s.omega - kappa_m * s.derivative).abs())
}
