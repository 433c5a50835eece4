//! Browser demo. Three operations are exported to JavaScript:
//! a moment-map probe on ℍ, a reduced gradient flow on a 2-torus that can
//! be stepped interactively, and a discretization-error curve.
//!
//! Everything here also compiles natively, where the tests run.

use swtorus::convergence::{self, Operator, TestData};
use swtorus::lattice::{derive_seed, Grid4};
use swtorus::quat::{fundamental_field, kahler_pairing, moment_map, moment_pairing_scalar, Quaternion};
use swtorus::solver::{reduced_energy_parts, solve_reduced, SolveSettings};
use swtorus::sw_ops::{reduced_residual, DiracScheme, ReducedConfig, ReducedDiscretization};
use wasm_bindgen::prelude::*;

/// μ at a point of ℍ and the Hamiltonian identity along a direction.
#[wasm_bindgen]
pub struct MomentProbe {
    closed_form: [f64; 3],
    oracle: [f64; 3],
    symplectic: f64,
    pairing: f64,
}

#[wasm_bindgen]
impl MomentProbe {
    /// `h`, `v` as `[w, x, y, z]`; `c` is the Lie algebra element `ic`.
    #[wasm_bindgen(constructor)]
    pub fn new(h: &[f64], v: &[f64], c: f64) -> Result<MomentProbe, String> {
        let quat = |s: &[f64], name: &str| -> Result<Quaternion, String> {
            let a: [f64; 4] = s.try_into().map_err(|_| format!("{name} needs 4 components, got {}", s.len()))?;
            Ok(Quaternion::from_array(a))
        };
        let (h, v) = (quat(h, "h")?, quat(v, "v")?);
        let o = (h.conj() * (Quaternion::I * h)).scale(0.5);
        Ok(MomentProbe {
            closed_form: moment_map(h).to_array(),
            oracle: [o.x, o.y, o.z],
            symplectic: kahler_pairing(fundamental_field(c, h), v),
            pairing: moment_pairing_scalar(c, h, v),
        })
    }

    /// Closed-form `μ(h)`.
    pub fn mu(&self) -> Vec<f64> {
        self.closed_form.to_vec()
    }

    /// `½h̄ih` by quaternion products.
    pub fn oracle(&self) -> Vec<f64> {
        self.oracle.to_vec()
    }

    /// `ω(L_ζ h, v)`.
    pub fn symplectic(&self) -> f64 {
        self.symplectic
    }

    /// `c·Re(h̄v)`.
    pub fn pairing(&self) -> f64 {
        self.pairing
    }

    /// `ω(L_ζ h, v) + c·Re(h̄v)`, zero up to rounding.
    pub fn defect(&self) -> f64 {
        self.symplectic + self.pairing
    }
}

/// Gradient flow of the reduced equations on an `n×n` torus of side 2π,
/// lifted over a 4×4 transverse torus.
#[wasm_bindgen]
pub struct ReducedFlow {
    config: ReducedConfig,
    disc: ReducedDiscretization,
    grid: Grid4,
    step_size: f64,
    steps: usize,
    energies: Vec<f64>,
}

#[wasm_bindgen]
impl ReducedFlow {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u32, amplitude: f64, holonomy0: f64, holonomy1: f64) -> Result<ReducedFlow, String> {
        if !(4..=64).contains(&n) {
            return Err(format!("grid size must be between 4 and 64, got {n}"));
        }
        let l = std::f64::consts::TAU;
        let grid = Grid4::new([n, n, 4, 4], [l; 4]).map_err(|e| e.to_string())?;
        let mut config = ReducedConfig::random(grid.factor1(), derive_seed(seed as u64, 4_500), amplitude, 3);
        config.a0 = config.a0.map(|v| v + holonomy0);
        config.a1 = config.a1.map(|v| v + holonomy1);
        let mut flow = ReducedFlow {
            config,
            disc: ReducedDiscretization::for_grid(&grid, DiracScheme::Link),
            grid,
            step_size: 0.05,
            steps: 0,
            energies: Vec::new(),
        };
        let e = flow.energy();
        flow.energies.push(e);
        Ok(flow)
    }

    /// Runs up to `count` descent steps and returns the energy afterwards.
    pub fn step(&mut self, count: usize) -> Result<f64, String> {
        if count == 0 {
            return Ok(self.energy());
        }
        let settings = SolveSettings {
            max_steps: count,
            step_size: self.step_size,
            tol: 1e-12,
            report_every: count,
            ..SolveSettings::default()
        };
        let (next, trace) = solve_reduced(&self.config, self.disc, &settings).map_err(|e| e.to_string())?;
        self.config = next;
        self.step_size = trace.final_step_size;
        self.steps += trace.steps;
        let e = self.energy();
        self.energies.push(e);
        Ok(e)
    }

    pub fn energy(&self) -> f64 {
        reduced_energy_parts(&self.config, self.disc).map_or(f64::NAN, |p| p.total())
    }

    /// Sup norm of the reduced residual.
    pub fn residual(&self) -> f64 {
        match reduced_residual(&self.config, self.disc) {
            Ok((k, d)) => k.max_abs().max(d.max_abs()),
            Err(_) => f64::NAN,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn size(&self) -> usize {
        self.grid.size(0)
    }

    /// Energy after construction and after every call to `step`.
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    /// `|u|²` per site, row-major in `(x0, x1)`.
    pub fn spinor_density(&self) -> Vec<f64> {
        self.config.u.data().iter().map(|q| q.norm_sq()).collect()
    }

    /// Pointwise size of the curvature residual `|K − μ∘u|`.
    pub fn curvature_density(&self) -> Vec<f64> {
        match reduced_residual(&self.config, self.disc) {
            Ok((k, _)) => k.data().iter().map(|m| m.norm_sq().sqrt()).collect(),
            Err(_) => Vec::new(),
        }
    }
}

/// Errors of one operator on the unit torus `N⁴` for `N = 4, 8, …`.
#[wasm_bindgen]
pub struct ConvergenceCurve {
    h: Vec<f64>,
    errors: Vec<f64>,
    order: f64,
    nominal: f64,
}

#[wasm_bindgen]
impl ConvergenceCurve {
    /// `operator` is one of `dirac_link`, `dirac_central`, `plaquette`,
    /// `fhat`; sizes double from 4 up to `max_n`.
    #[wasm_bindgen(constructor)]
    pub fn new(operator: &str, max_n: usize) -> Result<ConvergenceCurve, String> {
        let op = Operator::ALL
            .into_iter()
            .find(|o| o.name() == operator)
            .ok_or_else(|| format!("unknown operator {operator}"))?;
        if !(8..=16).contains(&max_n) {
            return Err(format!("max_n must be between 8 and 16, got {max_n}"));
        }
        let sizes: Vec<usize> = std::iter::successors(Some(4), |n| Some(n * 2))
            .take_while(|&n| n <= max_n)
            .collect();
        let st = convergence::study(op, &sizes, TestData::Harmonic).map_err(|e| e.to_string())?;
        Ok(ConvergenceCurve {
            h: st.rows.iter().map(|r| r.h).collect(),
            errors: st.rows.iter().map(|r| r.error).collect(),
            order: st.order.unwrap_or(f64::NAN),
            nominal: op.nominal_order(),
        })
    }

    pub fn h(&self) -> Vec<f64> {
        self.h.clone()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.errors.clone()
    }

    /// Fitted slope of `log e` against `log h`.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn nominal_order(&self) -> f64 {
        self.nominal
    }
}
