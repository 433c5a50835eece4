//! Discretization error against analytic single-harmonic fields.
//!
//! Each operator is evaluated on a ladder of grids `N⁴` of the unit torus
//! and compared with its continuum value at the sites. The order is the
//! least-squares slope of `log(error)` against `log(h)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid4};
use crate::quat::Quaternion;
use crate::sw_ops::{covariant_derivative, curvature, fhat, Convention, DiracScheme, GaugeField4, SpinorField4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// Covariant derivatives, link scheme.
    DiracLink,
    /// Covariant derivatives, central scheme.
    DiracCentral,
    /// Plain forward plaquette `F01`.
    Plaquette,
    /// Site-averaged self-dual triple `F̂_A`.
    SelfDual,
}

impl Operator {
    pub const ALL: [Operator; 4] = [
        Operator::DiracLink,
        Operator::DiracCentral,
        Operator::Plaquette,
        Operator::SelfDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::DiracLink => "dirac_link",
            Operator::DiracCentral => "dirac_central",
            Operator::Plaquette => "plaquette",
            Operator::SelfDual => "fhat",
        }
    }

    pub fn nominal_order(self) -> f64 {
        match self {
            Operator::DiracLink | Operator::Plaquette => 1.0,
            Operator::DiracCentral | Operator::SelfDual => 2.0,
        }
    }
}

/// Analytic test data: single harmonics on the unit torus, or a constant
/// spinor with zero connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestData {
    Harmonic,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub operator: Operator,
    pub data: TestData,
    pub n: usize,
    pub h: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub operator: Operator,
    pub data: TestData,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares order over the whole ladder; `None` when all errors vanish.
    pub order: Option<f64>,
    /// Orders between consecutive grids.
    pub pairwise: Vec<f64>,
}

const TAU: f64 = 2.0 * PI;

/// `A_μ(x) = a_μ sin(2π x_{μ+1})`, indices mod 4.
fn gauge_amp(mu: usize) -> f64 {
    [0.7, -0.4, 0.5, 0.3][mu]
}

fn harmonic_gauge(x: [f64; 4], mu: usize) -> f64 {
    gauge_amp(mu) * (TAU * x[(mu + 1) % 4]).sin()
}

fn phase(x: [f64; 4]) -> f64 {
    TAU * (x[0] + x[1] - x[2] + x[3])
}

fn harmonic_spinor(x: [f64; 4]) -> Quaternion {
    let t = phase(x);
    Quaternion::new(t.cos(), t.sin(), 0.5 * (TAU * x[2]).cos(), 0.5 * (TAU * x[1]).sin())
}

fn harmonic_spinor_derivative(x: [f64; 4], mu: usize) -> Quaternion {
    let t = phase(x);
    let dt = TAU * [1.0, 1.0, -1.0, 1.0][mu];
    let dy = if mu == 2 { -0.5 * TAU * (TAU * x[2]).sin() } else { 0.0 };
    let dz = if mu == 1 { 0.5 * TAU * (TAU * x[1]).cos() } else { 0.0 };
    Quaternion::new(-t.sin() * dt, t.cos() * dt, dy, dz)
}

/// Continuum `F_{μν} = ∂_μ A_ν − ∂_ν A_μ` for the harmonic gauge field.
fn harmonic_curvature(x: [f64; 4], mu: usize, nu: usize) -> f64 {
    let d = |comp: usize, axis: usize| {
        if (comp + 1) % 4 == axis {
            gauge_amp(comp) * TAU * (TAU * x[axis]).cos()
        } else {
            0.0
        }
    };
    d(nu, mu) - d(mu, nu)
}

fn fields(grid: &Grid4, data: TestData) -> Result<(GaugeField4, SpinorField4)> {
    let g = *grid;
    match data {
        TestData::Harmonic => Ok((
            GaugeField4::new(std::array::from_fn(|mu| Field::from_fn(g, |i| harmonic_gauge(g.position(i), mu))))?,
            Field::from_fn(g, |i| harmonic_spinor(g.position(i))),
        )),
        TestData::Constant => Ok((
            // a constant connection would already carry an O(h) link error
            GaugeField4::zeros(g),
            Field::constant(g, Quaternion::new(0.5, -0.2, 0.1, 0.3)),
        )),
    }
}

/// Continuum covariant derivative `∂_μ u + iA_μ u` of the analytic fields.
fn exact_covariant(grid: &Grid4, a: &GaugeField4, u: &SpinorField4, data: TestData, mu: usize) -> SpinorField4 {
    let g = *grid;
    let (am, ud) = (a.component(mu).data(), u.data());
    Field::from_fn(g, |i| {
        let du = match data {
            TestData::Harmonic => harmonic_spinor_derivative(g.position(i), mu),
            TestData::Constant => Quaternion::ZERO,
        };
        du + (Quaternion::I * ud[i]).scale(am[i])
    })
}

/// Maximum site error of one operator on `N⁴`.
pub fn operator_error(op: Operator, n: usize, data: TestData) -> Result<f64> {
    let grid = Grid4::unit([n; 4])?;
    let (a, u) = fields(&grid, data)?;
    let mut err: f64 = 0.0;
    match op {
        Operator::DiracLink | Operator::DiracCentral => {
            let scheme = if op == Operator::DiracLink {
                DiracScheme::Link
            } else {
                DiracScheme::Central
            };
            for mu in 0..4 {
                let lat = covariant_derivative(&a, &u, mu, scheme)?;
                let ex = exact_covariant(&grid, &a, &u, data, mu);
                err = err.max(lat.zip_map(&ex, |p, q| (p - q).max_abs())?.max_abs());
            }
        }
        Operator::Plaquette => {
            let f = curvature(&a);
            let g = grid;
            let exact = Field::from_fn(g, |i| match data {
                TestData::Harmonic => harmonic_curvature(g.position(i), 0, 1),
                TestData::Constant => 0.0,
            });
            err = f.plane(0, 1).sub(&exact)?.max_abs();
        }
        Operator::SelfDual => {
            let lat = fhat(&a, Convention::Paper);
            let g = grid;
            let exact = Field::from_fn(g, |i| {
                let x = g.position(i);
                let f = |m, v| match data {
                    TestData::Harmonic => harmonic_curvature(x, m, v),
                    TestData::Constant => 0.0,
                };
                [f(0, 1) - f(2, 3), f(0, 2) - f(1, 3), f(0, 3) + f(1, 2)]
            });
            err = lat
                .zip_map(&exact, |m, e| {
                    let m = m.to_array();
                    (0..3).fold(0.0f64, |acc, c| acc.max((m[c] - e[c]).abs()))
                })?
                .max_abs();
        }
    }
    Ok(err)
}

/// Least-squares slope of `log e` against `log h`.
pub fn fit_order(h: &[f64], e: &[f64]) -> Option<f64> {
    if h.len() < 2 || e.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

pub fn study(op: Operator, sizes: &[usize], data: TestData) -> Result<ConvergenceStudy> {
    if sizes.is_empty() {
        return Err(Error::InvalidSettings("empty grid ladder".into()));
    }
    let rows: Vec<ConvergenceRow> = sizes
        .iter()
        .map(|&n| {
            Ok(ConvergenceRow {
                operator: op,
                data,
                n,
                h: 1.0 / n as f64,
                error: operator_error(op, n, data)?,
            })
        })
        .collect::<Result<_>>()?;
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let pairwise = rows
        .windows(2)
        .filter_map(|w| fit_order(&[w[0].h, w[1].h], &[w[0].error, w[1].error]))
        .collect();
    Ok(ConvergenceStudy {
        operator: op,
        data,
        order: fit_order(&h, &e),
        pairwise,
        rows,
    })
}

/// CSV with columns `operator,data,n,h,error,order`; the order column
/// repeats the fitted order of the operator and is empty when undefined.
pub fn to_csv(studies: &[ConvergenceStudy]) -> String {
    let mut s = String::from("operator,data,n,h,error,order\n");
    for st in studies {
        let order = st.order.map_or(String::new(), |o| format!("{o:.6}"));
        for r in &st.rows {
            let data = match r.data {
                TestData::Harmonic => "harmonic",
                TestData::Constant => "constant",
            };
            s.push_str(&format!("{},{},{},{:e},{:e},{}\n", r.operator.name(), data, r.n, r.h, r.error, order));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_fields_have_zero_error() {
        for op in Operator::ALL {
            assert_eq!(operator_error(op, 4, TestData::Constant).unwrap(), 0.0, "{op:?}");
        }
        let st = study(Operator::DiracLink, &[4, 8], TestData::Constant).unwrap();
        assert_eq!(st.order, None);
    }

    #[test]
    fn analytic_derivative_matches_difference_quotient() {
        let x = [0.1, 0.27, 0.6, 0.9];
        for mu in 0..4 {
            let eps = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[mu] += eps;
            xm[mu] -= eps;
            let fd = (harmonic_spinor(xp) - harmonic_spinor(xm)).scale(0.5 / eps);
            assert!((fd - harmonic_spinor_derivative(x, mu)).max_abs() < 1e-7);
        }
    }

    #[test]
    fn order_fit_of_exact_power_law() {
        let h = [0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((fit_order(&h, &e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn error_shrinks_under_refinement() {
        for op in Operator::ALL {
            let e4 = operator_error(op, 4, TestData::Harmonic).unwrap();
            let e8 = operator_error(op, 8, TestData::Harmonic).unwrap();
            assert!(e8 < e4, "{op:?}");
        }
    }
}
