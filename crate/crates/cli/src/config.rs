//! Run configuration: a TOML file with `[grid]`, `[forms]`, `[solver]` and
//! `[run]` sections, every key optional, overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use swtorus::lattice::Grid4;
use swtorus::solver::SolveSettings;
use swtorus::sw_ops::{Convention, DiracScheme};
use swtorus::symplectic::{FormConventions, Sign, WedgeStencil};
use swtorus::verify::{KahlerProfile, TrialCounts, VerifyParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub sizes: [usize; 4],
    pub lengths: [f64; 4],
    /// Conformal factors, e.g. `{ profile = "harmonic", value = 0.4 }`.
    pub kahler: KahlerProfile,
    /// Slice point on the second factor, used for `Σ×{p}`.
    pub p: [usize; 2],
    /// Slice point on the first factor, used for `{q}×Σ`.
    pub q: [usize; 2],
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            sizes: [8; 4],
            lengths: [1.0; 4],
            kahler: KahlerProfile::default(),
            p: [0, 0],
            q: [0, 0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormsSection {
    pub wedge_sign: Sign,
    pub twist_signs: [Sign; 2],
    pub stencil: WedgeStencil,
    pub convention: Convention,
}

impl Default for FormsSection {
    fn default() -> Self {
        let f = FormConventions::FROZEN;
        Self {
            wedge_sign: f.wedge_sign,
            twist_signs: [f.twist_signs.0, f.twist_signs.1],
            stencil: f.stencil,
            convention: Convention::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: DiracScheme,
    /// 2 for the reduced flow on the first factor, 4 for the full flow.
    pub dimension: usize,
    pub max_steps: usize,
    pub step_size: f64,
    pub tol: f64,
    pub report_every: usize,
    /// Amplitude of the seeded random start.
    pub amplitude: f64,
    /// Constant `(a0, a1)` added to the start.
    pub holonomy: [f64; 2],
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolveSettings::default();
        Self {
            scheme: s.scheme,
            dimension: 2,
            max_steps: s.max_steps,
            step_size: 0.05,
            tol: 1e-7,
            report_every: s.report_every,
            amplitude: 0.1,
            holonomy: [0.5, 0.35],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    // Neither the output location nor the thread count changes any result,
    // so both stay out of the echoed config and reports compare bytewise.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    /// Worker threads; 0 leaves the choice to the thread pool.
    #[serde(skip_serializing)]
    pub workers: usize,
    /// Fourier modes per axis in random smooth fields.
    pub modes: usize,
    pub convergence_sizes: Vec<usize>,
    pub diagnostics: bool,
    pub trials: TrialCounts,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            workers: 0,
            modes: 3,
            convergence_sizes: vec![4, 8, 16],
            diagnostics: true,
            trials: TrialCounts::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub forms: FormsSection,
    pub solver: SolverSection,
    pub run: RunSection,
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<[usize; 4]>,
    pub scheme: Option<DiracScheme>,
    pub convention: Option<Convention>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub wedge_sign: Option<Sign>,
    pub stencil: Option<WedgeStencil>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Self::parse(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.run.seed = v;
        }
        if let Some(v) = o.grid {
            self.grid.sizes = v;
        }
        if let Some(v) = o.scheme {
            self.solver.scheme = v;
        }
        if let Some(v) = o.convention {
            self.forms.convention = v;
        }
        if let Some(v) = &o.out {
            self.run.out = v.clone();
        }
        if let Some(v) = o.workers {
            self.run.workers = v;
        }
        if let Some(v) = o.wedge_sign {
            self.forms.wedge_sign = v;
        }
        if let Some(v) = o.stencil {
            self.forms.stencil = v;
        }
    }

    pub fn grid(&self) -> Result<Grid4> {
        Ok(Grid4::new(self.grid.sizes, self.grid.lengths)?)
    }

    pub fn forms(&self) -> FormConventions {
        FormConventions {
            wedge_sign: self.forms.wedge_sign,
            twist_signs: (self.forms.twist_signs[0], self.forms.twist_signs[1]),
            stencil: self.forms.stencil,
        }
    }

    pub fn settings(&self) -> SolveSettings {
        SolveSettings {
            max_steps: self.solver.max_steps,
            step_size: self.solver.step_size,
            tol: self.solver.tol,
            scheme: self.solver.scheme,
            convention: self.forms.convention,
            report_every: self.solver.report_every,
        }
    }

    pub fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            grid_sizes: self.grid.sizes,
            grid_lengths: self.grid.lengths,
            kahler: self.grid.kahler,
            seed: self.run.seed,
            scheme: self.solver.scheme,
            convention: self.forms.convention,
            forms: self.forms(),
            p: self.grid.p,
            q: self.grid.q,
            trials: self.run.trials,
            modes: self.run.modes,
            convergence_sizes: self.run.convergence_sizes.clone(),
            ..VerifyParams::default()
        }
    }

    /// Checks everything a command could reject before it starts computing.
    pub fn validate(&self) -> Result<()> {
        self.verify_params().validate()?;
        self.settings().validate()?;
        if !matches!(self.solver.dimension, 2 | 4) {
            bail!("solver.dimension must be 2 or 4, got {}", self.solver.dimension);
        }
        if !self.solver.amplitude.is_finite() || self.solver.holonomy.iter().any(|h| !h.is_finite()) {
            bail!("solver.amplitude and solver.holonomy must be finite");
        }
        if self.run.modes == 0 {
            bail!("run.modes must be at least 1");
        }
        if self.run.convergence_sizes.iter().any(|&n| n < swtorus::lattice::MIN_SITES) {
            bail!("convergence sizes must be at least {}", swtorus::lattice::MIN_SITES);
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
