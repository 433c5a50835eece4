//! `swtorus` command-line tool.
//!
//! Exit status: 0 on success, 1 when an invariant or convergence target is
//! not met, 2 on configuration or input errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};
use swtorus::sw_ops::{Convention, DiracScheme};
use swtorus::symplectic::{Sign, WedgeStencil};

use commands::{PairInputs, Status};
use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "swtorus", version, about = "Seiberg-Witten equations on a product of flat 2-tori")]
struct Cli {
    /// TOML file with [grid], [forms], [solver] and [run] sections.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Lattice sizes, e.g. 8,8,8,8.
    #[arg(long, global = true, value_name = "N0,N1,N2,N3", value_parser = parse_grid)]
    grid: Option<[usize; 4]>,
    #[arg(long, global = true)]
    scheme: Option<SchemeArg>,
    #[arg(long, global = true)]
    convention: Option<ConventionArg>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for the numeric kernels.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Overrides the wedge sign of the form ledger.
    #[arg(long, global = true)]
    wedge_sign: Option<SignArg>,
    #[arg(long, global = true)]
    stencil: Option<StencilArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every property suite and write verify.json.
    Verify,
    /// Gradient flow from a seeded start; writes trace.csv and the fields.
    Solve,
    /// Lift a reduced snapshot to the 4D grid and compare residuals.
    Lift {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Evaluate Ω, Ω_Y and Ω1 on two tangent snapshots.
    Pair {
        #[arg(long, value_name = "PATH")]
        a: PathBuf,
        #[arg(long, value_name = "PATH")]
        b: PathBuf,
        /// Scalar snapshot ε; adds the moment pairing Ω(V_ε, b).
        #[arg(long, value_name = "PATH")]
        eps: Option<PathBuf>,
        /// Configuration snapshot used as base point for the moment pairing.
        #[arg(long, value_name = "PATH", requires = "eps")]
        base: Option<PathBuf>,
    },
    /// Operator errors against analytic fields on a grid ladder.
    Convergence {
        #[arg(long, value_name = "N,N,...", value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Link,
    Central,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum StencilArg {
    Collocated,
    Cup,
}

fn parse_grid(s: &str) -> Result<[usize; 4], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<usize>| format!("expected 4 sizes, got {}", v.len()))
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            grid: self.grid,
            scheme: self.scheme.map(|s| match s {
                SchemeArg::Link => DiracScheme::Link,
                SchemeArg::Central => DiracScheme::Central,
            }),
            convention: self.convention.map(|c| match c {
                ConventionArg::Paper => Convention::Paper,
                ConventionArg::Standard => Convention::Standard,
            }),
            out: self.out.clone(),
            workers: self.workers,
            wedge_sign: self.wedge_sign.map(|s| match s {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            }),
            stencil: self.stencil.map(|s| match s {
                StencilArg::Collocated => WedgeStencil::Collocated,
                StencilArg::Cup => WedgeStencil::Cup,
            }),
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&cli.overrides());
    if let Command::Convergence { sizes: Some(s) } = &cli.command {
        cfg.run.convergence_sizes = s.clone();
    }
    cfg.validate()?;
    if cfg.run.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Status> {
    match &cli.command {
        Command::Verify => commands::verify(cfg),
        Command::Solve => commands::solve(cfg),
        Command::Lift { input } => commands::lift(cfg, input),
        Command::Pair { a, b, eps, base } => commands::pair(
            cfg,
            PairInputs {
                a,
                b,
                eps: eps.as_deref(),
                base: base.as_deref(),
            },
        ),
        Command::Convergence { .. } => commands::convergence(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match effective_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli, &cfg) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
