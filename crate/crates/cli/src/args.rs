//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, RawConfig, SEED_ENV};
use crate::error::{CliError, Result};
use crate::presets::preset;

#[derive(Debug, Parser)]
#[command(name = "rlmc", version, about = "Riemannian Langevin Monte Carlo on S² and SPD(3)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exact expectation of the observable under the target.
    Reference(ExperimentArgs),
    /// Run one ensemble per step size and write the convergence table as CSV.
    Converge(ExperimentArgs),
    /// Two-step extrapolation from ensembles at two step sizes.
    Extrapolate {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Skip sampling and extrapolate the affine model A(h) = a + b·h.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        synthetic: Option<Vec<f64>>,
    },
    /// Run a single ensemble.
    Run(ExperimentArgs),
    /// Time average along a single long trajectory.
    TimeAverage(ExperimentArgs),
}

#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Built-in preset (table-1 … table-4, gpu-extrapolation).
    #[arg(long)]
    pub preset: Option<String>,
    /// key = value configuration file, applied on top of the preset.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// Target distribution: vmf, rgauss or dwell.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Observable: sin_r, det or inv1ptr.
    #[arg(long)]
    pub obs: Option<String>,
    /// exp, retraction or splitting.
    #[arg(long)]
    pub scheme: Option<String>,
    /// rademacher, gaussian or sphere.
    #[arg(long)]
    pub noise: Option<String>,
    /// Comma-separated step sizes.
    #[arg(long = "h", allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Time horizon T.
    #[arg(long = "horizon", visible_alias = "T")]
    pub horizon: Option<String>,
    /// Ensemble size L.
    #[arg(long = "trajectories", visible_alias = "L")]
    pub trajectories: Option<String>,
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<String>,
    /// Geodesic radius around I beyond which SPD trajectories are rejected.
    #[arg(long = "rejection-radius", visible_alias = "R")]
    pub rejection_radius: Option<String>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<String>,
    /// Initial point: `r,theta` on the sphere or six hvec entries.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, short = 'j')]
    pub workers: Option<String>,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl ExperimentArgs {
    /// Layers preset, config file and flags into one configuration.
    pub fn raw_config(&self) -> Result<RawConfig> {
        let mut raw = match &self.preset {
            Some(name) => preset(name)?,
            None => RawConfig::default(),
        };
        if let Some(path) = &self.config {
            raw.merge(RawConfig::from_file(path)?);
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            raw.set(k.trim(), v.trim())?;
        }
        let flags = [
            ("target", &self.target),
            ("lambda", &self.lambda),
            ("sigma", &self.sigma),
            ("obs", &self.obs),
            ("scheme", &self.scheme),
            ("noise", &self.noise),
            ("h", &self.h),
            ("T", &self.horizon),
            ("L", &self.trajectories),
            ("seed", &self.seed),
            ("R", &self.rejection_radius),
            ("burn_in", &self.burn_in),
            ("x0", &self.x0),
            ("workers", &self.workers),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                raw.set(k, v.as_str())?;
            }
        }
        if let Some(p) = &self.output {
            raw.set("output", p.display().to_string())?;
        }
        Ok(raw)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(&self.raw_config()?)
    }
}
