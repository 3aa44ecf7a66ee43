//! Subcommand implementations. Each returns structured results; the
//! `write_*` helpers render them.

use std::io::Write;
use std::time::Instant;

use rlmc_core::{
    reference_value, run_ensemble, run_trajectory_traced, talay_tubaro, time_average, ConvergenceReport,
    ConvergenceRow, EstimateResult, TrajectoryOutcome,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "h,L,estimate,err,mcerr,ci_low,ci_high,n_rejected,wall_time_s";

/// One ensemble at one step size.
#[derive(Clone, Debug)]
pub struct RowRecord {
    pub h: f64,
    pub trajectories: usize,
    pub outcome: std::result::Result<EstimateResult, rlmc_core::Error>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceOutput {
    pub reference: f64,
    pub records: Vec<RowRecord>,
    pub report: ConvergenceReport,
}

pub fn cmd_reference(cfg: &ExperimentConfig) -> Result<f64> {
    Ok(reference_value(&cfg.potential, &cfg.observable)?)
}

/// Runs one ensemble at step size `h`.
pub fn run_row(cfg: &ExperimentConfig, h: f64, reference: Option<f64>) -> Result<RowRecord> {
    let sampler = cfg.sampler(h)?;
    let start = Instant::now();
    let outcome = run_ensemble(&sampler, &cfg.observable, cfg.trajectories, cfg.workers)
        .and_then(|s| s.estimate(reference));
    Ok(RowRecord {
        h,
        trajectories: cfg.trajectories,
        outcome,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<ConvergenceOutput> {
    cfg.validate_sampling()?;
    let reference = cmd_reference(cfg)?;
    let records = cfg
        .h_list
        .iter()
        .map(|&h| run_row(cfg, h, Some(reference)))
        .collect::<Result<Vec<_>>>()?;
    let rows = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|e| ConvergenceRow { h: r.h, result: *e }))
        .collect();
    Ok(ConvergenceOutput {
        reference,
        records,
        report: ConvergenceReport::new(rows),
    })
}

/// Single ensemble; the configuration must hold exactly one step size.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RowRecord> {
    let &[h] = cfg.h_list.as_slice() else {
        return Err(CliError::Usage(format!("run takes exactly one h, got {}", cfg.h_list.len())));
    };
    cfg.validate_sampling()?;
    run_row(cfg, h, Some(cmd_reference(cfg)?))
}

#[derive(Clone, Debug)]
pub struct ExtrapolationOutput {
    pub h: [f64; 2],
    pub estimates: [EstimateResult; 2],
    pub improved: f64,
    pub reference: f64,
}

impl ExtrapolationOutput {
    pub fn improved_err(&self) -> f64 {
        (self.improved - self.reference).abs()
    }
}

fn two_steps(cfg: &ExperimentConfig) -> Result<[f64; 2]> {
    match cfg.h_list.as_slice() {
        &[h1, h2] => Ok([h1, h2]),
        other => Err(CliError::Usage(format!("extrapolation takes exactly two h values, got {}", other.len()))),
    }
}

pub fn cmd_extrapolate(cfg: &ExperimentConfig) -> Result<ExtrapolationOutput> {
    let h = two_steps(cfg)?;
    cfg.validate_sampling()?;
    let reference = cmd_reference(cfg)?;
    let mut estimates = Vec::with_capacity(2);
    for &hi in &h {
        estimates.push(run_row(cfg, hi, Some(reference))?.outcome?);
    }
    let estimates: [EstimateResult; 2] = estimates.try_into().expect("two steps");
    let improved = talay_tubaro(h[0], estimates[0].estimate, h[1], estimates[1].estimate)?;
    Ok(ExtrapolationOutput {
        h,
        estimates,
        improved,
        reference,
    })
}

/// Extrapolation of the exact affine model `A(h) = a + b·h`.
pub fn cmd_extrapolate_synthetic(cfg: &ExperimentConfig, a: f64, b: f64) -> Result<f64> {
    let [h1, h2] = two_steps(cfg)?;
    Ok(talay_tubaro(h1, a + b * h1, h2, a + b * h2)?)
}

#[derive(Clone, Debug)]
pub struct TimeAverageOutput {
    pub h: f64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub estimate: f64,
    pub reference: f64,
}

/// Time average of the observable along trajectory 0.
pub fn cmd_time_average(cfg: &ExperimentConfig) -> Result<TimeAverageOutput> {
    let &[h] = cfg.h_list.as_slice() else {
        return Err(CliError::Usage(format!("time-average takes exactly one h, got {}", cfg.h_list.len())));
    };
    let sampler = cfg.sampler(h)?;
    let reference = cmd_reference(cfg)?;
    let trace = match run_trajectory_traced(&sampler, 0, &cfg.observable)? {
        TrajectoryOutcome::Completed { trace: Some(t), .. } => t,
        TrajectoryOutcome::Completed { trace: None, .. } => unreachable!("trace requested"),
        TrajectoryOutcome::Rejected { step } => {
            return Err(CliError::Usage(format!("trajectory left the rejection ball at step {step}")))
        }
    };
    Ok(TimeAverageOutput {
        h,
        n_steps: trace.len(),
        burn_in: cfg.burn_in,
        estimate: time_average(&trace, cfg.burn_in)?,
        reference,
    })
}

fn write_row(out: &mut impl Write, r: &RowRecord) -> std::io::Result<()> {
    match &r.outcome {
        Ok(e) => {
            let (lo, hi) = e.ci();
            let err = e.err.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.h, r.trajectories, e.estimate, err, e.mcerr, lo, hi, e.n_rejected, r.wall_time_s
            )
        }
        Err(err) => writeln!(out, "# h={} failed: {err}", r.h),
    }
}

pub fn write_csv(out: &mut impl Write, records: &[RowRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    records.iter().try_for_each(|r| write_row(out, r))
}

/// Rows followed by the slope block as `#`-prefixed lines.
pub fn write_convergence_csv(out: &mut impl Write, c: &ConvergenceOutput) -> std::io::Result<()> {
    write_csv(out, &c.records)?;
    writeln!(out, "# reference,{}", c.reference)?;
    match &c.report.fit {
        Ok(f) => {
            writeln!(out, "# slope,{}", f.slope)?;
            writeln!(out, "# intercept,{}", f.intercept)?;
            writeln!(out, "# fit_rows,{}", f.n_rows)
        }
        Err(e) => writeln!(out, "# slope,NA,{e}"),
    }
}

pub fn write_extrapolation(out: &mut impl Write, x: &ExtrapolationOutput) -> std::io::Result<()> {
    for i in 0..2 {
        let e = &x.estimates[i];
        writeln!(
            out,
            "h{n}={},A{n}={},err{n}={},ci{n}={}",
            x.h[i],
            e.estimate,
            e.err.unwrap_or(f64::NAN),
            e.ci_halfwidth,
            n = i + 1
        )?;
    }
    writeln!(out, "improved={},err={}", x.improved, x.improved_err())?;
    writeln!(out, "reference={}", x.reference)
}

pub fn write_time_average(out: &mut impl Write, t: &TimeAverageOutput) -> std::io::Result<()> {
    writeln!(
        out,
        "h={},N={},burn_in={},estimate={},err={},reference={}",
        t.h,
        t.n_steps,
        t.burn_in,
        t.estimate,
        (t.estimate - t.reference).abs(),
        t.reference
    )
}
