//! Seeded randomized checks of the scalar and discrete inequalities used by
//! the error analysis, and of the spectral solver against dense LU.
//!
//! Every check draws its samples from its own ChaCha stream, so outcomes
//! depend only on the seed. The scalar map `f` is pluggable, which lets a
//! deliberately broken nonlinearity be run through the same suite.

use std::fmt::Debug;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{norm, GridFunction, GridSpec, NormKind};
use crate::nonlinearity::{f_log, f_log_eps};
use crate::oracle::dense_solve;
use crate::spectral::ShiftedLaplacian;

pub type ScalarMap = fn(Complex64) -> Complex64;

/// Relative slack granted to every inequality for rounding.
pub const ROUNDING_SLACK: f64 = 1e-10;

/// Ulps of the operands granted to a left-hand side that is a difference of
/// two evaluations, for cancellation.
const CANCELLATION_ULPS: f64 = 16.0;

fn cancellation(a: Complex64, b: Complex64) -> f64 {
    CANCELLATION_ULPS * f64::EPSILON * (a.norm() + b.norm())
}

/// Relative agreement required between spectral and dense solves.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct PropertyConfig {
    pub seed: u64,
    pub samples: usize,
    pub f: ScalarMap,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        PropertyConfig {
            seed: 0x5eed_1065,
            samples: 100_000,
            f: f_log,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen.
    pub worst_ratio: f64,
    /// The first failing sample.
    pub witness: Option<String>,
    pub detail: String,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// One line: `PASS|FAIL name samples=.. violations=.. worst=.. [detail]`.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} samples={} violations={} worst_ratio={:.6e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.violations,
            self.worst_ratio
        );
        if !self.detail.is_empty() {
            s.push_str(&format!(" {}", self.detail));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness: {w}"));
        }
        s
    }
}

struct Sample<W> {
    lhs: f64,
    rhs: f64,
    /// Absolute rounding allowance on `lhs`.
    slack: f64,
    witness: W,
}

fn run_check<W: Debug>(
    name: &str,
    seed: u64,
    samples: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Sample<W>,
) -> PropertyOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PropertyOutcome {
        name: name.to_string(),
        samples,
        violations: 0,
        worst_ratio: 0.0,
        witness: None,
        detail: String::new(),
    };
    for _ in 0..samples {
        let s = draw(&mut rng);
        let ratio = if s.rhs > 0.0 {
            s.lhs / s.rhs
        } else if s.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio.is_nan() || ratio > out.worst_ratio {
            out.worst_ratio = ratio;
        }
        if !(s.lhs <= s.rhs * (1.0 + ROUNDING_SLACK) + s.slack) {
            out.violations += 1;
            if out.witness.is_none() {
                out.witness = Some(format!("{:?} lhs={:e} rhs={:e}", s.witness, s.lhs, s.rhs));
            }
        }
    }
    out
}

/// Modulus log-uniform in `[lo, hi]`, uniform phase.
fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = 10f64.powf(rng.gen_range(lo.log10()..hi.log10()));
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// A pair mixing independent draws, near-coincident points and zeros.
fn pair(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> (Complex64, Complex64) {
    let u = polar(rng, lo, hi);
    let v = match rng.gen_range(0..8) {
        0 => Complex64::new(0.0, 0.0),
        1 | 2 => u * (Complex64::new(1.0, 0.0) + polar(rng, 1e-7, 1e-2)),
        3 => Complex64::from_polar(u.norm(), rng.gen_range(0.0..std::f64::consts::TAU)),
        _ => polar(rng, lo, hi),
    };
    if rng.gen_bool(0.5) {
        (u, v)
    } else {
        (v, u)
    }
}

fn random_grid(rng: &mut ChaCha8Rng, dim: usize, max_cells: usize) -> GridSpec {
    let bounds: Vec<(f64, f64)> = (0..dim)
        .map(|_| {
            let a = rng.gen_range(-5.0..5.0);
            (a, a + rng.gen_range(0.1..10.0))
        })
        .collect();
    let cells: Vec<usize> = (0..dim).map(|_| rng.gen_range(2..=max_cells)).collect();
    GridSpec::new(&bounds, &cells).expect("random grid is valid")
}

/// Random field: noise, a single spike, or a smooth bump, at a random scale.
fn random_field(rng: &mut ChaCha8Rng, spec: &GridSpec) -> GridFunction {
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    let n = spec.interior_count();
    let values: Vec<Complex64> = match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(0..n);
            (0..n)
                .map(|i| if i == k { Complex64::new(scale, -scale) } else { Complex64::new(0.0, 0.0) })
                .collect()
        }
        1 => {
            let u = GridFunction::from_fn(spec, |x| {
                let mut s = 1.0;
                for (a, xa) in x.iter().enumerate() {
                    let (lo, hi) = (spec.lower(a), spec.upper(a));
                    s *= (std::f64::consts::PI * (xa - lo) / (hi - lo)).sin();
                }
                Complex64::new(scale * s, 0.5 * scale * s)
            });
            u.interior()
        }
        _ => (0..n)
            .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect(),
    };
    GridFunction::from_interior(spec, &values).expect("length matches")
}

fn l2(u: &GridFunction) -> f64 {
    norm(u, NormKind::L2).expect("infallible")
}

/// `|f(u) − f(v)| ≤ (|ln y| + 1)|u − v|`, `y = max(|u|, |v|)`.
pub fn log_lipschitz(cfg: &PropertyConfig) -> PropertyOutcome {
    let f = cfg.f;
    run_check("log_lipschitz", cfg.seed, cfg.samples, |rng| {
        let (u, v) = pair(rng, 1e-8, 1e4);
        let y = u.norm().max(v.norm());
        Sample {
            lhs: (f(u) - f(v)).norm(),
            rhs: (y.ln().abs() + 1.0) * (u - v).norm(),
            slack: cancellation(f(u), f(v)),
            witness: (u, v),
        }
    })
}

/// `|f(u) − f(v)| ≤ (2ε̂)^{1/2}(|ln ε̂| + 1)|u − v|^{1/2}` for `|u|, |v| ≤ ε̂ = e^{−1}`.
pub fn holder_half(cfg: &PropertyConfig) -> PropertyOutcome {
    let f = cfg.f;
    let eps_hat = (-1.0f64).exp();
    let h = (2.0 * eps_hat).sqrt() * (eps_hat.ln().abs() + 1.0);
    run_check("holder_alpha_half", cfg.seed + 1, cfg.samples, |rng| {
        let (mut u, mut v) = pair(rng, 1e-12, eps_hat);
        for z in [&mut u, &mut v] {
            if z.norm() > eps_hat {
                *z *= eps_hat / z.norm();
            }
        }
        Sample {
            lhs: (f(u) - f(v)).norm(),
            rhs: h * (u - v).norm().sqrt(),
            slack: cancellation(f(u), f(v)),
            witness: (u, v),
        }
    })
}

/// `|Im[(f(u) − f(v)) conj(u − v)]| ≤ |u − v|²`.
pub fn imaginary_part(cfg: &PropertyConfig) -> PropertyOutcome {
    let f = cfg.f;
    run_check("imaginary_part", cfg.seed + 2, cfg.samples, |rng| {
        let (u, v) = pair(rng, 1e-8, 1e4);
        Sample {
            lhs: ((f(u) - f(v)) * (u - v).conj()).im.abs(),
            rhs: (u - v).norm_sqr(),
            slack: cancellation(f(u), f(v)) * (u - v).norm(),
            witness: (u, v),
        }
    })
}

/// `|f(z) − f_ε(z)| ≤ ε` for `ε ∈ {1e−2, 1e−4}`.
pub fn regularization_gap(cfg: &PropertyConfig) -> PropertyOutcome {
    let f = cfg.f;
    run_check("regularization_gap", cfg.seed + 3, cfg.samples, |rng| {
        let eps = if rng.gen_bool(0.5) { 1e-2 } else { 1e-4 };
        let z = polar(rng, 1e-10, 1e4);
        let fe = f_log_eps(z, eps).expect("eps > 0");
        Sample {
            lhs: (f(z) - fe).norm(),
            rhs: eps,
            slack: cancellation(f(z), fe),
            witness: (z, eps),
        }
    })
}

/// `|f_ε(z) − f_ε(w)| ≤ 2|ln ε||z − w|` for `|z|, |w| ≤ 10`, `ε < 1/20`.
pub fn regularized_lipschitz(cfg: &PropertyConfig) -> PropertyOutcome {
    let c = 10.0;
    run_check("regularized_lipschitz", cfg.seed + 4, cfg.samples, |rng| {
        let eps = 0.05 * 10f64.powf(rng.gen_range(-8.0..-1e-9));
        let (mut z, mut w) = pair(rng, 1e-10, c);
        for p in [&mut z, &mut w] {
            if p.norm() > c {
                *p *= c / p.norm();
            }
        }
        let (fz, fw) = (f_log_eps(z, eps).expect("eps > 0"), f_log_eps(w, eps).expect("eps > 0"));
        Sample {
            lhs: (fz - fw).norm(),
            rhs: 2.0 * eps.ln().abs() * (z - w).norm(),
            slack: cancellation(fz, fw),
            witness: (z, w, eps),
        }
    })
}

/// `‖u‖_{2α} ≤ |Ω|^{1/(2α) − 1/2}‖u‖` for `α ∈ {0.3, 0.5, 0.9}`, 1D and 2D.
pub fn embedding(cfg: &PropertyConfig) -> PropertyOutcome {
    run_check("embedding", cfg.seed + 5, cfg.samples, |rng| {
        let alpha = [0.3, 0.5, 0.9][rng.gen_range(0..3)];
        let dim = rng.gen_range(1..=2);
        let spec = random_grid(rng, dim, 12);
        let u = random_field(rng, &spec);
        Sample {
            lhs: norm(&u, NormKind::Lr(2.0 * alpha)).expect("r > 0"),
            rhs: spec.measure().powf(0.5 / alpha - 0.5) * l2(&u),
            slack: 0.0,
            witness: (spec, alpha, u.interior()),
        }
    })
}

/// `‖u‖₄ ≤ ‖u‖^{1/2}|u|₁^{1/2}` on 2D grids.
pub fn sobolev_l4(cfg: &PropertyConfig) -> PropertyOutcome {
    run_check("sobolev_l4", cfg.seed + 6, cfg.samples, |rng| {
        let spec = random_grid(rng, 2, 12);
        let u = random_field(rng, &spec);
        Sample {
            lhs: norm(&u, NormKind::Lr(4.0)).expect("r > 0"),
            rhs: (l2(&u) * norm(&u, NormKind::H1Semi).expect("infallible")).sqrt(),
            slack: 0.0,
            witness: (spec, u.interior()),
        }
    })
}

/// `‖u‖_∞ / (‖u‖^{1/2}(|u|₂ + ‖u‖)^{1/2})` on `[−1, 1]²` with `J = 4..32`.
///
/// The constant depends on the domain only, so the check is that the ratio
/// stays bounded under refinement: the bound is twice the largest ratio seen
/// on the coarsest grid, and finer grids may not exceed it.
pub fn sobolev_linf(cfg: &PropertyConfig) -> PropertyOutcome {
    let levels = [4usize, 8, 16, 32];
    let per_level = cfg.samples.div_ceil(levels.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed + 7);
    let ratio = |u: &GridFunction| {
        let m = l2(u);
        let h2 = norm(u, NormKind::H2Semi).expect("infallible");
        norm(u, NormKind::LInf).expect("infallible") / (m * (h2 + m)).sqrt()
    };
    let mut level_max = Vec::with_capacity(levels.len());
    let mut worst_field = None;
    for &j in &levels {
        let spec = GridSpec::cube(2, -1.0, 1.0, j).expect("valid grid");
        let mut m: f64 = 0.0;
        for _ in 0..per_level {
            let u = random_field(&mut rng, &spec);
            let r = ratio(&u);
            if r > m {
                m = r;
                worst_field = Some((j, u.interior()));
            }
        }
        level_max.push(m);
    }
    let bound = 2.0 * level_max[0];
    let violations = level_max.iter().filter(|&&m| !(m <= bound)).count();
    let worst = level_max.iter().cloned().fold(0.0, f64::max);
    PropertyOutcome {
        name: "sobolev_linf".into(),
        samples: per_level * levels.len(),
        violations,
        worst_ratio: worst / bound,
        witness: (violations > 0).then(|| format!("{worst_field:?}")),
        detail: format!(
            "max_ratio_by_J={}",
            levels
                .iter()
                .zip(&level_max)
                .map(|(j, m)| format!("{j}:{m:.4}"))
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

/// Every scalar and discrete inequality, in a fixed order.
pub fn inequality_suite(cfg: &PropertyConfig) -> Vec<PropertyOutcome> {
    vec![
        log_lipschitz(cfg),
        holder_half(cfg),
        imaginary_part(cfg),
        regularization_gap(cfg),
        regularized_lipschitz(cfg),
        embedding(cfg),
        sobolev_l4(cfg),
        sobolev_linf(cfg),
    ]
}

/// Random grid with at most `max_interior` interior nodes, 1D to 3D.
fn random_small_grid(rng: &mut ChaCha8Rng, max_interior: usize) -> GridSpec {
    loop {
        let dim = rng.gen_range(1..=3);
        let cap = match dim {
            1 => max_interior + 1,
            2 => (max_interior as f64).sqrt() as usize + 1,
            _ => (max_interior as f64).cbrt().round() as usize + 1,
        };
        let spec = random_grid(rng, dim, cap.max(2));
        if spec.interior_count() <= max_interior {
            return spec;
        }
    }
}

/// Spectral versus dense solves of `(σI + δ²_∇)w = b` on `cases` random
/// grids with at most `max_interior` interior nodes and `Im σ ≥ 1`.
pub fn oracle_suite(seed: u64, cases: usize, max_interior: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diff = PropertyOutcome {
        name: "spectral_vs_dense".into(),
        samples: cases,
        violations: 0,
        worst_ratio: 0.0,
        witness: None,
        detail: String::new(),
    };
    let mut resid = PropertyOutcome {
        name: "spectral_residual".into(),
        ..diff.clone()
    };
    let (mut max_diff, mut max_resid): (f64, f64) = (0.0, 0.0);
    for _ in 0..cases {
        let spec = random_small_grid(&mut rng, max_interior);
        let sigma = Complex64::new(rng.gen_range(-100.0..100.0), 10f64.powf(rng.gen_range(0.0..4.0)));
        let b = random_field(&mut rng, &spec);
        let solver = ShiftedLaplacian::new(&spec)?;
        let w = solver.solve(sigma, &b)?;
        let w_dense = dense_solve(&spec, sigma, &b)?;
        let rel = l2(&(&w - &w_dense)) / l2(&w_dense).max(f64::MIN_POSITIVE);
        let res = solver.relative_residual(sigma, &w, &b)?;
        for (out, value, max) in [(&mut diff, rel, &mut max_diff), (&mut resid, res, &mut max_resid)] {
            *max = max.max(value);
            if !(value <= ORACLE_TOL) {
                out.violations += 1;
                if out.witness.is_none() {
                    out.witness = Some(format!("{spec:?} sigma={sigma} value={value:e}"));
                }
            }
        }
    }
    diff.worst_ratio = max_diff / ORACLE_TOL;
    diff.detail = format!("max_relative_difference={max_diff:.3e}");
    resid.worst_ratio = max_resid / ORACLE_TOL;
    resid.detail = format!("max_relative_residual={max_resid:.3e}");
    Ok(vec![diff, resid])
}

/// `conj(z) ln|z|`: a broken nonlinearity for mutation runs.
pub fn conjugated_f(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < f64::MIN_POSITIVE {
        Complex64::new(0.0, 0.0)
    } else {
        z.conj() * r.ln()
    }
}
