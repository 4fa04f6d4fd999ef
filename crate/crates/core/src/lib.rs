//! Variational ground state of the one-dimensional Gross-Pitaevskii equation
//! in a Morse potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma and digamma for positive real arguments.
//! * [`model`]: the dimensionless problem, the trial state and its energy.
//! * [`analytic`]: the closed-form noninteracting solution.
//! * [`solver`]: stationary points, Hessian classification, critical coupling
//!   and the coupling / well-parameter sweeps.
//! * [`oracle`]: brute-force grid minimization and an imaginary-time grid
//!   solver for the full energy functional.
//! * [`cli`]: the `morse-gpe` command-line front end and the comparison report.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
