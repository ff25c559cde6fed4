//! CSV and text writers. Column names and order are fixed:
//!
//! - convergence: `tau|h,l2_error,h1_error,order_l2,order_h1`
//! - truncation: `tau|h,truncation_error,order`
//! - series: `step,t,mass,energy,linf`
//!
//! The order columns hold the pairwise order against the previous row and
//! are empty on the first row.

use std::io::Write;

use logse_core::diagnostics::ObservableSeries;
use logse_core::properties::PropertyOutcome;
use logse_core::study::TruncationStudy;
use logse_core::ConvergenceReport;

use crate::error::CliResult;

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn order(pairwise: &[f64], row: usize) -> String {
    if row == 0 {
        String::new()
    } else {
        format!("{:.6}", pairwise[row - 1])
    }
}

pub fn write_convergence<W: Write>(w: W, r: &ConvergenceReport) -> CliResult<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([r.parameter.as_str(), "l2_error", "h1_error", "order_l2", "order_h1"])?;
    for (i, (p, e)) in r.params.iter().zip(&r.errors).enumerate() {
        csv.write_record([
            num(*p),
            num(e.l2),
            num(e.h1),
            order(&r.l2.pairwise, i),
            order(&r.h1.pairwise, i),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_truncation<W: Write>(w: W, t: &TruncationStudy) -> CliResult<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([t.parameter.as_str(), "truncation_error", "order"])?;
    for (i, (p, e)) in t.params.iter().zip(&t.norms).enumerate() {
        csv.write_record([num(*p), num(*e), order(&t.orders.pairwise, i)])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_series<W: Write>(w: W, s: &ObservableSeries) -> CliResult<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["step", "t", "mass", "energy", "linf"])?;
    for i in 0..s.len() {
        csv.write_record([
            s.steps[i].to_string(),
            num(s.times[i]),
            num(s.mass[i]),
            num(s.energy[i]),
            num(s.linf[i]),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_properties<W: Write>(mut w: W, outcomes: &[PropertyOutcome]) -> CliResult<()> {
    for o in outcomes {
        writeln!(w, "{}", o.summary())?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    writeln!(w, "{} {} of {} properties passed", if failed == 0 { "PASS" } else { "FAIL" }, outcomes.len() - failed, outcomes.len())?;
    Ok(())
}
