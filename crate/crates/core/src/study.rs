//! Refinement studies against closed-form solutions.

use std::fmt;
use std::str::FromStr;

use crate::analytic::{exact_on_grid, GaussonParams};
use crate::diagnostics::{
    error_norms, estimate_order, gausson_truncation_error, mass, ConvergenceReport, ErrorNorms, OrderEstimate,
};
use crate::error::{invalid, Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::stepping::{run_simulation, Scheme, SchemeParams};

/// Where a run's error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMeasure {
    /// At `t = T` only.
    #[default]
    FinalTime,
    /// `max_n` over every step, norm by norm.
    MaxOverSteps,
}

impl fmt::Display for ErrorMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorMeasure::FinalTime => "final",
            ErrorMeasure::MaxOverSteps => "max",
        })
    }
}

impl FromStr for ErrorMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "final" => Ok(ErrorMeasure::FinalTime),
            "max" => Ok(ErrorMeasure::MaxOverSteps),
            other => Err(invalid(format!("unknown error measure `{other}`"))),
        }
    }
}

/// A solution known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    Gausson(GaussonParams),
    /// `u ≡ 0`, a solution for every `λ`.
    Zero { lambda: f64 },
}

impl ExactSolution {
    pub fn lambda(&self) -> f64 {
        match self {
            ExactSolution::Gausson(g) => g.lambda,
            ExactSolution::Zero { lambda } => *lambda,
        }
    }

    pub fn sample(&self, spec: &GridSpec, t: f64) -> Result<GridFunction> {
        match self {
            ExactSolution::Gausson(g) => exact_on_grid(g, spec, t),
            ExactSolution::Zero { .. } => Ok(GridFunction::zeros(spec)),
        }
    }
}

/// Runs from the sampled exact solution and returns the error against it.
pub fn run_errors(
    exact: &ExactSolution,
    spec: &GridSpec,
    p: &SchemeParams,
    measure: ErrorMeasure,
    residual_check: bool,
) -> Result<ErrorNorms> {
    let u0 = exact.sample(spec, 0.0)?;
    let mut worst = ErrorNorms::default();
    let mut track = |_: usize, t: f64, u: &GridFunction| -> Result<()> {
        worst = worst.max(error_norms(u, &exact.sample(spec, t)?)?);
        Ok(())
    };
    match measure {
        ErrorMeasure::FinalTime => {
            let u = run_simulation(&u0, p, &mut [], residual_check)?;
            error_norms(&u, &exact.sample(spec, p.t_final())?)
        }
        ErrorMeasure::MaxOverSteps => {
            run_simulation(&u0, p, &mut [&mut track], residual_check)?;
            Ok(worst)
        }
    }
}

/// Errors at fixed `spec` for each time step in `taus` (decreasing).
pub fn temporal_convergence(
    exact: &ExactSolution,
    spec: &GridSpec,
    scheme: Scheme,
    t_final: f64,
    taus: &[f64],
    measure: ErrorMeasure,
    residual_check: bool,
) -> Result<ConvergenceReport> {
    let errors = taus
        .iter()
        .map(|&tau| {
            let p = SchemeParams::to_time(scheme, exact.lambda(), tau, t_final)?;
            run_errors(exact, spec, &p, measure, residual_check)
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new("tau", taus.to_vec(), errors)
}

/// Errors at fixed `tau` on each grid in `specs` (spacing decreasing).
pub fn spatial_convergence(
    exact: &ExactSolution,
    specs: &[GridSpec],
    scheme: Scheme,
    tau: f64,
    t_final: f64,
    measure: ErrorMeasure,
    residual_check: bool,
) -> Result<ConvergenceReport> {
    let p = SchemeParams::to_time(scheme, exact.lambda(), tau, t_final)?;
    let errors = specs
        .iter()
        .map(|s| run_errors(exact, s, &p, measure, residual_check))
        .collect::<Result<Vec<_>>>()?;
    let hs = specs.iter().map(|s| s.max_spacing()).collect();
    ConvergenceReport::new("h", hs, errors)
}

/// Defect norms across a refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStudy {
    /// `"tau"` or `"h"`.
    pub parameter: String,
    pub params: Vec<f64>,
    pub norms: Vec<f64>,
    pub orders: OrderEstimate,
}

/// `‖ξ^n‖` on `spec` at `t_n ≈ t_eval` for each `tau`.
pub fn temporal_truncation(
    scheme: Scheme,
    g: &GaussonParams,
    spec: &GridSpec,
    taus: &[f64],
    t_eval: f64,
) -> Result<TruncationStudy> {
    let norms = taus
        .iter()
        .map(|&tau| {
            let n = (t_eval / tau).round() as usize;
            gausson_truncation_error(scheme, g, spec, tau, n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationStudy {
        parameter: "tau".into(),
        orders: estimate_order(taus, &norms)?,
        params: taus.to_vec(),
        norms,
    })
}

/// `‖ξ^n‖` at fixed `tau` and step `n` on each grid in `specs`.
pub fn spatial_truncation(
    scheme: Scheme,
    g: &GaussonParams,
    specs: &[GridSpec],
    tau: f64,
    n: usize,
) -> Result<TruncationStudy> {
    let norms = specs
        .iter()
        .map(|s| gausson_truncation_error(scheme, g, s, tau, n))
        .collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = specs.iter().map(|s| s.max_spacing()).collect();
    Ok(TruncationStudy {
        parameter: "h".into(),
        orders: estimate_order(&hs, &norms)?,
        params: hs,
        norms,
    })
}

/// `|M(T) − M(0)| / M(0)` for a run from the sampled Gausson.
pub fn mass_drift(g: &GaussonParams, spec: &GridSpec, p: &SchemeParams, residual_check: bool) -> Result<f64> {
    let u0 = exact_on_grid(g, spec, 0.0)?;
    let m0 = mass(&u0);
    let u = run_simulation(&u0, p, &mut [], residual_check)?;
    Ok((mass(&u) - m0).abs() / m0)
}

/// `base · 2^{−j}` for `j = first..first + levels`.
pub fn halving_sequence(base: f64, first: u32, levels: usize) -> Vec<f64> {
    (0..levels).map(|j| base * 0.5f64.powi((first as usize + j) as i32)).collect()
}
