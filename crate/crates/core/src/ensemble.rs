//! Parallel ensembles of independent trajectories.
//!
//! Trajectory `l` always uses RNG stream `l`, and trajectories are grouped
//! into fixed-size shards whose partial sums are combined in shard order.
//! The result is therefore bit-identical for any number of workers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::potential::Observable;
use crate::quadrature::pairwise_sum;
use crate::sampler::{run_trajectory, SamplerConfig, TrajectoryOutcome};

/// Trajectories per shard.
pub const SHARD_SIZE: usize = 1000;

/// Partial sums over a block of trajectories.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnsembleSums {
    pub sum: f64,
    pub sum_sq: f64,
    pub n_completed: usize,
    pub n_rejected: usize,
}

impl EnsembleSums {
    /// Combines partial sums in the given order with pairwise summation.
    pub fn combine(parts: &[EnsembleSums]) -> Self {
        let sums: Vec<f64> = parts.iter().map(|p| p.sum).collect();
        let squares: Vec<f64> = parts.iter().map(|p| p.sum_sq).collect();
        Self {
            sum: pairwise_sum(&sums),
            sum_sq: pairwise_sum(&squares),
            n_completed: parts.iter().map(|p| p.n_completed).sum(),
            n_rejected: parts.iter().map(|p| p.n_rejected).sum(),
        }
    }

    /// Ensemble estimate over the completed trajectories.
    pub fn estimate(&self, reference: Option<f64>) -> Result<EstimateResult> {
        EstimateResult::from_sums(self.sum, self.sum_sq, self.n_completed, self.n_rejected, reference)
    }
}

fn run_shard(cfg: &SamplerConfig, obs: &Observable, ids: std::ops::Range<u64>) -> Result<EnsembleSums> {
    let mut values = Vec::with_capacity((ids.end - ids.start) as usize);
    let mut n_rejected = 0;
    for id in ids {
        match run_trajectory(cfg, id)? {
            TrajectoryOutcome::Completed { final_point, .. } => values.push(obs.eval(&final_point)?),
            TrajectoryOutcome::Rejected { .. } => n_rejected += 1,
        }
    }
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    Ok(EnsembleSums {
        sum: pairwise_sum(&values),
        sum_sq: pairwise_sum(&squares),
        n_completed: values.len(),
        n_rejected,
    })
}

/// Simulates `n_trajectories` independent chains and accumulates `φ(X_N)`.
///
/// `workers` caps the thread count; `None` uses the global rayon pool. If
/// several trajectories fail, the error of the lowest-indexed shard is
/// returned.
pub fn run_ensemble(
    cfg: &SamplerConfig,
    obs: &Observable,
    n_trajectories: usize,
    workers: Option<usize>,
) -> Result<EnsembleSums> {
    cfg.validate()?;
    if let Some(m) = obs.manifold() {
        if m != cfg.manifold() {
            return Err(Error::Unsupported {
                target: cfg.potential.to_string(),
                observable: obs.name().to_string(),
            });
        }
    }
    let n = n_trajectories as u64;
    let shards: Vec<std::ops::Range<u64>> = (0..n)
        .step_by(SHARD_SIZE)
        .map(|lo| lo..(lo + SHARD_SIZE as u64).min(n))
        .collect();
    let work = || -> Vec<Result<EnsembleSums>> {
        shards.par_iter().map(|ids| run_shard(cfg, obs, ids.clone())).collect()
    };
    let parts = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSums::combine(&parts))
}
