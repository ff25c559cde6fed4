//! Mass, energy, error norms, truncation errors and observed orders.

use log::warn;

use crate::analytic::{exact_on_grid, GaussonParams};
use crate::error::{invalid, Result};
use crate::grid::{norm, GridFunction, NormKind};
use crate::nonlinearity::density_primitive;
use crate::stepping::{bdf1_residual, bdf2_residual, Observer, Scheme, SchemeParams};

/// `‖u‖²`.
pub fn mass(u: &GridFunction) -> f64 {
    norm(u, NormKind::L2).expect("L2 norm is infallible").powi(2)
}

/// `|u|₁² + h^d Σ F(|u|²)` with `F(ρ) = λ(ρ ln ρ − ρ)`.
pub fn energy(u: &GridFunction, lambda: f64) -> f64 {
    let grad = norm(u, NormKind::H1Semi).expect("H1 seminorm is infallible").powi(2);
    let vol = u.spec().cell_volume();
    let mut density = 0.0;
    for z in u.values() {
        density += density_primitive(z.norm_sqr(), lambda).expect("|z|² is non-negative");
    }
    grad + vol * density
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
}

impl ErrorNorms {
    pub fn max(self, other: ErrorNorms) -> ErrorNorms {
        ErrorNorms {
            l2: self.l2.max(other.l2),
            h1: self.h1.max(other.h1),
        }
    }
}

/// `‖e‖` and `|e|₁` for `e = exact − numeric`.
pub fn error_norms(numeric: &GridFunction, exact: &GridFunction) -> Result<ErrorNorms> {
    if numeric.spec() != exact.spec() {
        return Err(invalid("error norms need fields on the same grid"));
    }
    let e = exact - numeric;
    Ok(ErrorNorms {
        l2: norm(&e, NormKind::L2)?,
        h1: norm(&e, NormKind::H1Semi)?,
    })
}

/// `‖ξ^n‖`: the scheme defect at step `n` with the exact solution
/// `exact(t)` substituted. For BDF2 and `n = 0` this is the starter defect.
pub fn truncation_error<F>(scheme: Scheme, exact: F, lambda: f64, tau: f64, n: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<GridFunction>,
{
    let p = SchemeParams::new(scheme, lambda, tau, n + 1)?;
    let t = |k: usize| k as f64 * tau;
    let u_n = exact(t(n))?;
    let u_next = exact(t(n + 1))?;
    match (scheme, n) {
        (Scheme::Bdf2, n) if n >= 1 => bdf2_residual(&u_next, &u_n, &exact(t(n - 1))?, &p),
        _ => bdf1_residual(&u_next, &u_n, &p),
    }
}

/// [`truncation_error`] for the Gausson sampled on `spec`.
pub fn gausson_truncation_error(
    scheme: Scheme,
    g: &GaussonParams,
    spec: &crate::grid::GridSpec,
    tau: f64,
    n: usize,
) -> Result<f64> {
    truncation_error(scheme, |t| exact_on_grid(g, spec, t), g.lambda, tau, n)
}

/// Observed orders for errors `e_k` at parameters `p_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// `ln(e_k/e_{k+1}) / ln(p_k/p_{k+1})`.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `ln e` against `ln p`.
    pub fitted: f64,
    /// Errors do not decrease strictly along the refinement.
    pub non_monotone: bool,
    /// Some error is zero or not finite; orders are NaN.
    pub degenerate: bool,
}

pub fn estimate_order(params: &[f64], errors: &[f64]) -> Result<OrderEstimate> {
    if params.len() != errors.len() {
        return Err(invalid(format!("{} parameters but {} errors", params.len(), errors.len())));
    }
    if params.len() < 3 {
        return Err(invalid(format!("need at least 3 refinement levels, got {}", params.len())));
    }
    if params.iter().any(|p| !(p > &0.0 && p.is_finite())) || params.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("refinement parameters must be positive and strictly decreasing"));
    }
    let degenerate = errors.iter().any(|e| !(e > &0.0 && e.is_finite()));
    if degenerate {
        warn!("degenerate error data {errors:?}");
        return Ok(OrderEstimate {
            pairwise: vec![f64::NAN; params.len() - 1],
            fitted: f64::NAN,
            non_monotone: false,
            degenerate,
        });
    }
    let pairwise: Vec<f64> = params
        .windows(2)
        .zip(errors.windows(2))
        .map(|(p, e)| (e[0] / e[1]).ln() / (p[0] / p[1]).ln())
        .collect();
    let xs: Vec<f64> = params.iter().map(|p| p.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let non_monotone = errors.windows(2).any(|w| w[1] >= w[0]);
    if non_monotone {
        warn!("errors do not decrease monotonically: {errors:?}");
    }
    Ok(OrderEstimate {
        pairwise,
        fitted: sxy / sxx,
        non_monotone,
        degenerate,
    })
}

/// Errors and orders of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `"tau"` or `"h"`.
    pub parameter: String,
    pub params: Vec<f64>,
    pub errors: Vec<ErrorNorms>,
    pub l2: OrderEstimate,
    pub h1: OrderEstimate,
}

impl ConvergenceReport {
    pub fn new(parameter: &str, params: Vec<f64>, errors: Vec<ErrorNorms>) -> Result<Self> {
        let l2: Vec<f64> = errors.iter().map(|e| e.l2).collect();
        let h1: Vec<f64> = errors.iter().map(|e| e.h1).collect();
        Ok(ConvergenceReport {
            parameter: parameter.to_string(),
            l2: estimate_order(&params, &l2)?,
            h1: estimate_order(&params, &h1)?,
            params,
            errors,
        })
    }

    pub fn degenerate(&self) -> bool {
        self.l2.degenerate || self.h1.degenerate
    }
}

/// Observables sampled along a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSeries {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub linf: Vec<f64>,
    pub l2_error: Option<Vec<f64>>,
    pub h1_error: Option<Vec<f64>>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|M(t) − M(0)| / M(0)` at the last sample.
    pub fn relative_mass_drift(&self) -> Option<f64> {
        let (first, last) = (self.mass.first()?, self.mass.last()?);
        Some((last - first).abs() / first)
    }
}

/// Observer filling an [`ObservableSeries`], optionally against a Gausson.
pub struct SeriesRecorder {
    lambda: f64,
    stride: usize,
    exact: Option<GaussonParams>,
    series: ObservableSeries,
}

impl SeriesRecorder {
    pub fn new(lambda: f64, stride: usize) -> Self {
        SeriesRecorder {
            lambda,
            stride: stride.max(1),
            exact: None,
            series: ObservableSeries::default(),
        }
    }

    pub fn with_exact(mut self, g: GaussonParams) -> Self {
        self.exact = Some(g);
        self.series.l2_error = Some(vec![]);
        self.series.h1_error = Some(vec![]);
        self
    }

    pub fn series(&self) -> &ObservableSeries {
        &self.series
    }

    pub fn into_series(self) -> ObservableSeries {
        self.series
    }
}

impl Observer for SeriesRecorder {
    fn stride(&self) -> usize {
        self.stride
    }

    fn observe(&mut self, step: usize, time: f64, u: &GridFunction) -> Result<()> {
        let s = &mut self.series;
        s.steps.push(step);
        s.times.push(time);
        s.mass.push(mass(u));
        s.energy.push(energy(u, self.lambda));
        s.linf.push(norm(u, NormKind::LInf)?);
        if let Some(g) = &self.exact {
            let e = error_norms(u, &exact_on_grid(g, u.spec(), time)?)?;
            s.l2_error.get_or_insert_with(Vec::new).push(e.l2);
            s.h1_error.get_or_insert_with(Vec::new).push(e.h1);
        }
        Ok(())
    }
}
