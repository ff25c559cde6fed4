use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use log::info;
use logse_core::analytic::{exact_on_grid, GaussonParams};
use logse_core::diagnostics::SeriesRecorder;
use logse_core::properties::{conjugated_f, inequality_suite, oracle_suite, PropertyConfig};
use logse_core::stepping::run_simulation;
use logse_core::study::{
    spatial_convergence, spatial_truncation, temporal_convergence, temporal_truncation, ExactSolution,
};
use logse_core::{ConvergenceReport, ErrorNorms, GridFunction, Observer, OrderEstimate, SchemeParams};

use crate::config::{Axis, Command, ExperimentConfig, Mutation, Scenario};
use crate::error::{CliError, CliResult};
use crate::report;
use crate::snapshot::{self, SnapshotMeta};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// All acceptance windows were met (always true for `simulate`).
    pub accepted: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.accepted {
            0
        } else {
            3
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    match cfg.command {
        Command::ConvergeTime | Command::ConvergeSpace => converge(cfg),
        Command::Truncation => truncation(cfg),
        Command::Simulate => simulate(cfg),
        Command::Properties => properties(cfg),
    }
}

fn exact_solution(cfg: &ExperimentConfig) -> CliResult<Option<ExactSolution>> {
    match cfg.scenario {
        Scenario::Gausson { omega } => Ok(Some(ExactSolution::Gausson(GaussonParams::new(
            omega,
            cfg.scheme.lambda,
            cfg.grid.dim,
        )?))),
        Scenario::Zero => Ok(Some(ExactSolution::Zero {
            lambda: cfg.scheme.lambda,
        })),
        Scenario::Synthetic { .. } => Ok(None),
        Scenario::Case(_) => Err(CliError::key("scenario.kind", "no exact solution for dynamics cases")),
    }
}

fn in_window(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn describe(name: &str, o: &OrderEstimate) -> String {
    let pairwise: Vec<String> = o.pairwise.iter().map(|p| format!("{p:.4}")).collect();
    let mut s = format!("{name}: fitted {:.4}, pairwise [{}]", o.fitted, pairwise.join(", "));
    if o.degenerate {
        s.push_str(" (degenerate data)");
    } else if o.non_monotone {
        s.push_str(" (non-monotone)");
    }
    s
}

fn converge(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let params = cfg.refinement.values();
    let temporal = cfg.command == Command::ConvergeTime;
    let report = match exact_solution(cfg)? {
        None => {
            let Scenario::Synthetic { order } = cfg.scenario else {
                unreachable!("only the synthetic scenario has no exact solution")
            };
            let errors = params
                .iter()
                .map(|p| ErrorNorms {
                    l2: p.powf(order),
                    h1: p.powf(order),
                })
                .collect();
            ConvergenceReport::new(if temporal { "tau" } else { "h" }, params, errors)?
        }
        Some(exact) if temporal => temporal_convergence(
            &exact,
            &cfg.grid.spec()?,
            cfg.scheme.scheme,
            cfg.scheme.t_final,
            &params,
            cfg.refinement.measure,
            cfg.residual_check,
        )?,
        Some(exact) => {
            let specs = params
                .iter()
                .map(|&h| cfg.grid.spec_with_spacing(h))
                .collect::<CliResult<Vec<_>>>()?;
            spatial_convergence(
                &exact,
                &specs,
                cfg.scheme.scheme,
                cfg.scheme.tau,
                cfg.scheme.t_final,
                cfg.refinement.measure,
                cfg.residual_check,
            )?
        }
    };
    let path = cfg.output_dir.join("report.csv");
    report::write_convergence(BufWriter::new(File::create(&path)?), &report)?;
    let a = &cfg.acceptance;
    let accepted = !report.degenerate()
        && in_window(report.l2.fitted, a.l2_min, a.l2_max)
        && in_window(report.h1.fitted, a.h1_min, a.h1_max);
    let summary = format!(
        "{} {}\n{}\n{}\nwindows: l2 [{}, {}], h1 [{}, {}]",
        cfg.command.name(),
        cfg.scheme.scheme,
        describe("l2", &report.l2),
        describe("h1", &report.h1),
        a.l2_min,
        a.l2_max,
        a.h1_min,
        a.h1_max
    );
    Ok(Outcome {
        accepted,
        summary,
        files: vec![path],
    })
}

fn truncation(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let Scenario::Gausson { omega } = cfg.scenario else {
        return Err(CliError::key("scenario.kind", "truncation needs the gausson scenario"));
    };
    let g = GaussonParams::new(omega, cfg.scheme.lambda, cfg.grid.dim)?;
    let params = cfg.refinement.values();
    let study = match cfg.refinement.axis {
        Axis::Time => temporal_truncation(cfg.scheme.scheme, &g, &cfg.grid.spec()?, &params, cfg.scheme.t_final)?,
        Axis::Space => {
            let specs = params
                .iter()
                .map(|&h| cfg.grid.spec_with_spacing(h))
                .collect::<CliResult<Vec<_>>>()?;
            let n = (cfg.scheme.t_final / cfg.scheme.tau).round() as usize;
            spatial_truncation(cfg.scheme.scheme, &g, &specs, cfg.scheme.tau, n)?
        }
    };
    let path = cfg.output_dir.join("report.csv");
    report::write_truncation(BufWriter::new(File::create(&path)?), &study)?;
    let a = &cfg.acceptance;
    let accepted =
        !study.orders.degenerate && study.orders.pairwise.iter().all(|&o| in_window(o, a.l2_min, a.l2_max));
    Ok(Outcome {
        accepted,
        summary: format!(
            "truncation {} {}\n{}\nwindow (pairwise): [{}, {}]",
            cfg.scheme.scheme,
            cfg.refinement.axis,
            describe("truncation", &study.orders),
            a.l2_min,
            a.l2_max
        ),
        files: vec![path],
    })
}

struct SnapshotWriter<'a> {
    cfg: &'a ExperimentConfig,
    written: Vec<PathBuf>,
}

impl Observer for SnapshotWriter<'_> {
    fn stride(&self) -> usize {
        self.cfg.output.snapshot_stride
    }

    fn observe(&mut self, step: usize, time: f64, u: &GridFunction) -> logse_core::Result<()> {
        let path = self.cfg.output_dir.join(format!("snap_{step:06}.bin"));
        let meta = SnapshotMeta {
            step,
            time,
            scheme: self.cfg.scheme.scheme.to_string(),
            lambda: self.cfg.scheme.lambda,
            tau: self.cfg.scheme.tau,
        };
        snapshot::save(&path, &meta, u).map_err(|e| match e {
            CliError::Io(io) => logse_core::Error::Io(io),
            other => logse_core::Error::Io(std::io::Error::other(other.to_string())),
        })?;
        self.written.push(path);
        Ok(())
    }
}

fn simulate(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let spec = cfg.grid.spec()?;
    let u0 = match cfg.scenario {
        Scenario::Gausson { omega } => exact_on_grid(&GaussonParams::new(omega, cfg.scheme.lambda, cfg.grid.dim)?, &spec, 0.0)?,
        Scenario::Case(c) => c.initial_condition(&spec)?,
        Scenario::Zero => GridFunction::zeros(&spec),
        Scenario::Synthetic { .. } => {
            return Err(CliError::key("scenario.kind", "synthetic data cannot be simulated"))
        }
    };
    let s = &cfg.scheme;
    let p = SchemeParams::to_time(s.scheme, s.lambda, s.tau, s.t_final)?;
    info!("simulate {} on {:?}: {} steps", cfg.scenario, spec, p.n_steps);
    let mut series = SeriesRecorder::new(s.lambda, cfg.output.series_stride);
    let mut snaps = SnapshotWriter {
        cfg,
        written: vec![],
    };
    if cfg.output.snapshot_stride > 0 {
        run_simulation(&u0, &p, &mut [&mut series, &mut snaps], cfg.residual_check)?;
    } else {
        run_simulation(&u0, &p, &mut [&mut series], cfg.residual_check)?;
    }
    let series = series.into_series();
    let path = cfg.output_dir.join("series.csv");
    report::write_series(BufWriter::new(File::create(&path)?), &series)?;
    let mut files = vec![path];
    files.extend(snaps.written);
    let peak = series.linf.iter().cloned().fold(0.0, f64::max);
    Ok(Outcome {
        accepted: true,
        summary: format!(
            "simulate {} {}: {} steps, relative mass drift {:.3e}, peak |u| {:.6}",
            cfg.scenario,
            s.scheme,
            p.n_steps,
            series.relative_mass_drift().unwrap_or(0.0),
            peak
        ),
        files,
    })
}

fn properties(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let pc = PropertyConfig {
        seed: cfg.properties.seed,
        samples: cfg.properties.samples,
        f: match cfg.properties.mutation {
            Mutation::None => logse_core::nonlinearity::f_log,
            Mutation::Conjugate => conjugated_f,
        },
    };
    let mut outcomes = inequality_suite(&pc);
    outcomes.extend(oracle_suite(cfg.properties.seed, cfg.properties.oracle_cases, 512)?);
    let path = cfg.output_dir.join("properties.txt");
    report::write_properties(BufWriter::new(File::create(&path)?), &outcomes)?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name.as_str()).collect();
    Ok(Outcome {
        accepted: failed.is_empty(),
        summary: if failed.is_empty() {
            format!("all {} properties passed", outcomes.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
        files: vec![path],
    })
}
