//! Linearly implicit finite-difference schemes for the logarithmic
//! Schrödinger equation
//!
//! ```text
//!   i ∂ₜu + Δu = λ u ln|u|²    in Ω,   u = 0 on ∂Ω,
//! ```
//!
//! on rectangular domains in one to three dimensions. The nonlinearity
//! `f(u) = u ln|u|` is used as is (no regularization), with `f(0) = 0`.
//!
//! Both schemes evaluate the nonlinearity at an explicit argument, so each
//! step is a single linear solve with the shifted Dirichlet Laplacian
//! `(σI + δ²_∇)`, which is diagonal in the discrete sine basis.
//!
//! Module map:
//! - [`grid`]: tensor grids, grid functions, difference operators and norms
//! - [`nonlinearity`]: `u ln|u|`, its regularization and the energy density
//! - [`spectral`]: sine transforms and the shifted-Laplacian solver
//! - [`stepping`]: BDF1 / BDF2 steps and the simulation driver
//! - [`analytic`]: Gausson solutions and the dynamics initial data
//! - [`diagnostics`]: mass, energy, error norms, truncation errors, orders
//! - [`study`]: refinement studies built from the pieces above
//! - [`properties`]: randomized inequality and oracle checks
//! - [`oracle`]: dense reference operators

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod nonlinearity;
pub mod oracle;
pub mod properties;
pub mod spectral;
pub mod stepping;
pub mod study;

pub use num_complex::Complex64;

pub use analytic::{DynamicsCase, GaussonParams, TwoGaussonParams};
pub use diagnostics::{ConvergenceReport, ErrorNorms, ObservableSeries, OrderEstimate};
pub use error::{Error, Result};
pub use grid::{GridFunction, GridSpec, NormKind};
pub use nonlinearity::LogNonlinearity;
pub use spectral::{ShiftedLaplacian, SineTransform};
pub use stepping::{Observer, Scheme, SchemeParams, Stepper, StepperState};
