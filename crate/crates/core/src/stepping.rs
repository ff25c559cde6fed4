//! BDF1 and BDF2 time stepping.
//!
//! Both schemes treat `δ²_∇` implicitly and the nonlinearity explicitly:
//!
//! ```text
//! BDF1:  (i/τ + δ²_∇) u^{n+1}  = 2λ f(u^n) + (i/τ) u^n
//! BDF2:  (3i/(2τ) + δ²_∇) u^{n+1} = 2λ f(2u^n − u^{n−1}) + (i/(2τ)) (4u^n − u^{n−1})
//! ```
//!
//! BDF2 takes one BDF1 step to produce `u¹`. Each step is one call to the
//! shifted-Laplacian solver; there is no inner iteration.

use std::fmt;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{laplacian, norm, GridFunction, NormKind};
use crate::nonlinearity::f_log;
use crate::spectral::ShiftedLaplacian;

/// Relative tolerance on the per-step scheme residual.
pub const STEP_RESIDUAL_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Bdf1,
    Bdf2,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Bdf1 => "bdf1",
            Scheme::Bdf2 => "bdf2",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bdf1" => Ok(Scheme::Bdf1),
            "bdf2" => Ok(Scheme::Bdf2),
            other => Err(invalid(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Time-stepping parameters. `lambda == 0` is allowed and switches the
/// nonlinearity off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub lambda: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub scheme: Scheme,
}

impl SchemeParams {
    pub fn new(scheme: Scheme, lambda: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(invalid(format!("lambda must be finite, got {lambda}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        if scheme == Scheme::Bdf2 && tau >= 1.0 {
            warn!("BDF2 with tau = {tau} >= 1 is outside the range covered by the error analysis");
        }
        Ok(SchemeParams {
            lambda,
            tau,
            n_steps,
            scheme,
        })
    }

    /// Steps of size `t_final / n` with `n = round(t_final / tau)`; fails if
    /// `tau` does not divide `t_final` to 1e-9 relative.
    pub fn to_time(scheme: Scheme, lambda: f64, tau: f64, t_final: f64) -> Result<Self> {
        if !(tau > 0.0) || !(t_final >= 0.0) {
            return Err(invalid(format!("need tau > 0 and t_final >= 0, got {tau}, {t_final}")));
        }
        let n = (t_final / tau).round();
        if (n * tau - t_final).abs() > 1e-9 * t_final.max(tau) {
            return Err(invalid(format!("tau = {tau} does not divide t_final = {t_final}")));
        }
        Self::new(scheme, lambda, tau, n as usize)
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.tau
    }
}

/// `u^n`, and `u^{n−1}` once a BDF2 run is past its starter step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperState {
    pub current: GridFunction,
    pub previous: Option<GridFunction>,
    pub step_index: usize,
}

fn bdf1_rhs(u_n: &GridFunction, p: &SchemeParams) -> GridFunction {
    let two_lambda = 2.0 * p.lambda;
    let shift = I / p.tau;
    u_n.map(|z| f_log(z) * two_lambda + shift * z)
}

fn bdf2_rhs(u_n: &GridFunction, u_nm1: &GridFunction, p: &SchemeParams) -> GridFunction {
    let two_lambda = 2.0 * p.lambda;
    let c = I / (2.0 * p.tau);
    let extrapolant = u_n.combine(Complex64::new(2.0, 0.0), u_nm1, Complex64::new(-1.0, 0.0));
    let hist = u_n.combine(Complex64::new(4.0, 0.0), u_nm1, Complex64::new(-1.0, 0.0));
    extrapolant.combine(Complex64::new(0.0, 0.0), &hist, c).combine(
        Complex64::new(1.0, 0.0),
        &extrapolant.map(f_log),
        Complex64::new(two_lambda, 0.0),
    )
}

fn bdf1_sigma(p: &SchemeParams) -> Complex64 {
    I / p.tau
}

fn bdf2_sigma(p: &SchemeParams) -> Complex64 {
    I * 1.5 / p.tau
}

/// `‖i δ_t⁻u^{n+1} + δ²_∇u^{n+1} − 2λ f(u^n)‖`.
pub fn bdf1_residual(u_next: &GridFunction, u_n: &GridFunction, p: &SchemeParams) -> Result<f64> {
    let dt = (u_next - u_n).combine(I / p.tau, u_next, Complex64::new(0.0, 0.0));
    let nonlin = u_n.map(f_log);
    let r = (&dt + &laplacian(u_next)).combine(
        Complex64::new(1.0, 0.0),
        &nonlin,
        Complex64::new(-2.0 * p.lambda, 0.0),
    );
    norm(&r, NormKind::L2)
}

/// `‖i D_t⁻u^{n+1} + δ²_∇u^{n+1} − 2λ f(2u^n − u^{n−1})‖`.
pub fn bdf2_residual(
    u_next: &GridFunction,
    u_n: &GridFunction,
    u_nm1: &GridFunction,
    p: &SchemeParams,
) -> Result<f64> {
    let c = I / (2.0 * p.tau);
    let d = u_next
        .combine(Complex64::new(3.0, 0.0), u_n, Complex64::new(-4.0, 0.0))
        .combine(Complex64::new(1.0, 0.0), u_nm1, Complex64::new(1.0, 0.0));
    let extrapolant = u_n.combine(Complex64::new(2.0, 0.0), u_nm1, Complex64::new(-1.0, 0.0));
    let r = laplacian(u_next)
        .combine(Complex64::new(1.0, 0.0), &d, c)
        .combine(
            Complex64::new(1.0, 0.0),
            &extrapolant.map(f_log),
            Complex64::new(-2.0 * p.lambda, 0.0),
        );
    norm(&r, NormKind::L2)
}

fn residual_tolerance(u_n: &GridFunction, p: &SchemeParams) -> Result<f64> {
    Ok(STEP_RESIDUAL_TOL * (norm(u_n, NormKind::L2)? / p.tau).max(1.0))
}

fn check_residual(residual: f64, tolerance: f64, step: usize) -> Result<()> {
    if residual <= tolerance {
        Ok(())
    } else {
        Err(Error::Residual {
            step,
            residual,
            tolerance,
        })
    }
}

/// One BDF1 step from `u^n`. The scheme residual is always checked.
pub fn bdf1_step(u_n: &GridFunction, p: &SchemeParams) -> Result<GridFunction> {
    let solver = ShiftedLaplacian::new(u_n.spec())?;
    let next = solver.solve(bdf1_sigma(p), &bdf1_rhs(u_n, p))?;
    check_residual(bdf1_residual(&next, u_n, p)?, residual_tolerance(u_n, p)?, 1)?;
    Ok(next)
}

/// `u¹` for the two-step recursion; the same update as [`bdf1_step`].
pub fn bdf2_starter(u_0: &GridFunction, p: &SchemeParams) -> Result<GridFunction> {
    bdf1_step(u_0, p)
}

/// One BDF2 step from `(u^n, u^{n−1})`.
pub fn bdf2_step(u_n: &GridFunction, u_nm1: &GridFunction, p: &SchemeParams) -> Result<GridFunction> {
    if u_n.spec() != u_nm1.spec() {
        return Err(invalid("BDF2 history lives on different grids"));
    }
    let solver = ShiftedLaplacian::new(u_n.spec())?;
    let next = solver.solve(bdf2_sigma(p), &bdf2_rhs(u_n, u_nm1, p))?;
    check_residual(bdf2_residual(&next, u_n, u_nm1, p)?, residual_tolerance(u_n, p)?, 1)?;
    Ok(next)
}

/// Advances a state step by step with a cached solver.
pub struct Stepper {
    params: SchemeParams,
    solver: ShiftedLaplacian,
    residual_check: bool,
    state: StepperState,
}

impl Stepper {
    pub fn new(u0: GridFunction, params: SchemeParams) -> Result<Self> {
        let solver = ShiftedLaplacian::new(u0.spec())?;
        Ok(Stepper {
            params,
            solver,
            residual_check: false,
            state: StepperState {
                current: u0,
                previous: None,
                step_index: 0,
            },
        })
    }

    /// Verify the scheme residual after every solve (one extra operator
    /// application per step).
    pub fn with_residual_check(mut self, enabled: bool) -> Self {
        self.residual_check = enabled;
        self
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn state(&self) -> &StepperState {
        &self.state
    }

    pub fn current(&self) -> &GridFunction {
        &self.state.current
    }

    pub fn time(&self) -> f64 {
        self.state.step_index as f64 * self.params.tau
    }

    pub fn into_state(self) -> StepperState {
        self.state
    }

    pub fn advance(&mut self) -> Result<()> {
        let p = self.params;
        let step = self.state.step_index + 1;
        let u_n = &self.state.current;
        let next = match (&self.state.previous, p.scheme) {
            (Some(u_nm1), Scheme::Bdf2) => {
                let next = self.solver.solve(bdf2_sigma(&p), &bdf2_rhs(u_n, u_nm1, &p))?;
                if self.residual_check {
                    let r = bdf2_residual(&next, u_n, u_nm1, &p)?;
                    check_residual(r, residual_tolerance(u_n, &p)?, step)?;
                }
                next
            }
            _ => {
                let next = self.solver.solve(bdf1_sigma(&p), &bdf1_rhs(u_n, &p))?;
                if self.residual_check {
                    check_residual(bdf1_residual(&next, u_n, &p)?, residual_tolerance(u_n, &p)?, step)?;
                }
                next
            }
        };
        if !next.is_finite() {
            return Err(Error::Divergence { step });
        }
        let prev = std::mem::replace(&mut self.state.current, next);
        self.state.previous = match p.scheme {
            Scheme::Bdf2 => Some(prev),
            Scheme::Bdf1 => None,
        };
        self.state.step_index = step;
        Ok(())
    }
}

/// Receives the state at step 0, every `stride()` steps, and the final step.
pub trait Observer {
    fn stride(&self) -> usize {
        1
    }

    fn observe(&mut self, step: usize, time: f64, u: &GridFunction) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(usize, f64, &GridFunction) -> Result<()>,
{
    fn observe(&mut self, step: usize, time: f64, u: &GridFunction) -> Result<()> {
        self(step, time, u)
    }
}

fn notify(observers: &mut [&mut dyn Observer], step: usize, last: usize, t: f64, u: &GridFunction) -> Result<()> {
    for obs in observers.iter_mut() {
        let stride = obs.stride().max(1);
        if step.is_multiple_of(stride) || step == last {
            obs.observe(step, t, u)?;
        }
    }
    Ok(())
}

/// Runs `p.n_steps` steps from `u0` and returns the final state.
pub fn run_simulation(
    u0: &GridFunction,
    p: &SchemeParams,
    observers: &mut [&mut dyn Observer],
    residual_check: bool,
) -> Result<GridFunction> {
    if !u0.is_finite() {
        return Err(Error::Divergence { step: 0 });
    }
    let mut stepper = Stepper::new(u0.clone(), *p)?.with_residual_check(residual_check);
    notify(observers, 0, p.n_steps, 0.0, stepper.current())?;
    for _ in 0..p.n_steps {
        stepper.advance()?;
        let step = stepper.state().step_index;
        notify(observers, step, p.n_steps, stepper.time(), stepper.current())?;
    }
    Ok(stepper.into_state().current)
}
