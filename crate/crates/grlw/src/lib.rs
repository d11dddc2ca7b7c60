//! Petrov–Galerkin B-spline finite element solver for the generalized
//! regularized long wave equation
//!
//! ```text
//! u_t + u_x + p(p+1) uᵖ u_x − μ u_xxt = 0
//! ```
//!
//! on an interval with homogeneous Dirichlet/Neumann boundary conditions.
//! The trial space is cubic B-splines, the weight space quadratic B-splines,
//! and time stepping is Crank–Nicolson with an iteratively re-linearized
//! nonlinear coefficient.
//!
//! The crate is organized bottom-up:
//!
//! - [`spline`]: meshes, local shape functions, spline evaluation;
//! - [`element`]: exact element matrices and the lumped nonlinear coefficient;
//! - [`banded`]: banded LU factorization and matrix–vector products;
//! - [`assembly`]: global step systems, boundary elimination, initial fit;
//! - [`integrator`]: Crank–Nicolson stepping and the experiment driver;
//! - [`analytic`]: solitary-wave solutions, invariants, error norms;
//! - [`stability`]: von Neumann growth factors of the linearized scheme;
//! - [`experiment`]: canned experiments producing CSV tables for the CLI.

pub mod analytic;
pub mod assembly;
pub mod banded;
pub mod element;
pub mod error;
pub mod experiment;
pub mod integrator;
pub mod spline;
pub mod stability;

pub use error::{Error, Result};
