//! Seiberg-Witten equations on a product of two flat 2-tori.
//!
//! Periodic finite-difference lattices, the quaternionic moment map, the
//! discrete curvature and Dirac operators, the 2-forms Ω, Ω_Y and Ω1 on
//! configuration space, and a gradient-flow solver for the reduced equations.

pub mod convergence;
pub mod error;
pub mod lattice;
pub mod quat;
pub mod snapshot;
pub mod solver;
pub mod symplectic;
pub mod sw_ops;
pub mod verify;

pub use error::{Error, Result};
