//! Exponential (tension) B-spline Galerkin finite-element solver for the 1-D
//! advection–diffusion equation
//!
//! ```text
//! u_t + ξ·u_x − λ·u_xx = 0,   x ∈ [a, b],  t > 0,
//! ```
//!
//! with Dirichlet boundary conditions, Crank–Nicolson time stepping, and a
//! tunable tension parameter `p` in the basis.
//!
//! The crate is organized bottom-up:
//!
//! - [`basis`]: the exponential B-spline basis (numerically stable evaluation).
//! - [`assembly`]: Gauss–Legendre quadrature, element matrices, and global
//!   septa-diagonal assembly.
//! - [`linalg`]: Thomas tridiagonal solver and banded LU with partial pivoting.
//! - [`solver`]: problem description, initial-condition fitting, Crank–Nicolson
//!   stepping with Dirichlet elimination, and batch drivers.
//! - [`problems`]: the two benchmark transport problems (advected Gaussian
//!   concentration profile; diffusing Gaussian pulse), their exact solutions,
//!   error norms, and published reference tables.
//! - [`config`] / [`cli`]: flat key–value run configuration and the command-line
//!   front end (`solve`, `table`, `sweep-p`).

// Index loops mirror the matrix algebra they implement; iterator rewrites of
// banded row/column sweeps obscure the stencil structure.
#![allow(clippy::needless_range_loop)]
// Test oracles freeze reference values at full precision; the compiler rounds
// the extra digits, which is exactly the intent.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod assembly;
pub mod basis;
pub mod cli;
pub mod config;
pub mod linalg;
pub mod problems;
pub mod solver;

pub use assembly::{
    assemble_global, gauss_legendre, reference_element_matrices, AssemblyError, ElementMatrices,
    GlobalMatrices,
};
pub use basis::{eval_basis, BasisConstants, BasisError, Mesh, MAX_TENSION_PRODUCT};
pub use cli::CliError;
pub use config::{ConfigError, ProblemKind, RunConfig};
pub use linalg::{solve_tridiagonal, BandedLu, BandedMatrix, LinalgError};
pub use problems::{
    courant_number, linf_error, peak_concentration, AdvectedGaussian, DiffusingPulse,
};
pub use solver::{
    fit_initial, nodal_values_of, run, run_batch, run_batch_sequential, Discretization,
    ProblemSpec, RunOutput, RunRequest, Snapshot, SolverError, TimeStepper, MAX_STEPS,
};
