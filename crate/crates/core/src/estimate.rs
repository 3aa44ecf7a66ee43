//! Estimators, Monte Carlo error, extrapolation and slope fitting.

use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;

/// z-quantile of the two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult {
    pub estimate: f64,
    /// Sample variance of the observable values, not of their mean.
    pub mcerr: f64,
    /// `1.96·sqrt(mcerr / n_samples)`.
    pub ci_halfwidth: f64,
    pub n_samples: usize,
    pub n_rejected: usize,
    /// `|estimate − reference|` when a reference value is known.
    pub err: Option<f64>,
}

impl EstimateResult {
    /// Builds the result from `Σφ`, `Σφ²` and the sample count.
    pub fn from_sums(
        sum: f64,
        sum_sq: f64,
        n_samples: usize,
        n_rejected: usize,
        reference: Option<f64>,
    ) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: n_samples,
            });
        }
        if !(sum.is_finite() && sum_sq.is_finite()) {
            return Err(Error::NonFinite);
        }
        let l = n_samples as f64;
        let estimate = sum / l;
        let mcerr = ((sum_sq - sum * sum / l) / (l - 1.0)).max(0.0);
        Ok(Self {
            estimate,
            mcerr,
            ci_halfwidth: Z95 * (mcerr / l).sqrt(),
            n_samples,
            n_rejected,
            err: reference.map(|r| (estimate - r).abs()),
        })
    }

    pub fn ci(&self) -> (f64, f64) {
        (self.estimate - self.ci_halfwidth, self.estimate + self.ci_halfwidth)
    }

    /// Standard error of the estimate, `sqrt(mcerr / n_samples)`.
    pub fn std_error(&self) -> f64 {
        (self.mcerr / self.n_samples as f64).sqrt()
    }
}

/// Ensemble average `(1/L) Σ φ(X_N^{(l)})` with its sample variance.
///
/// Values are sorted before the pairwise summation so the result does not
/// depend on the order of the input.
pub fn ensemble_estimate(values: &[f64], reference: Option<f64>) -> Result<EstimateResult> {
    if values.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let squares: Vec<f64> = sorted.iter().map(|v| v * v).collect();
    EstimateResult::from_sums(pairwise_sum(&sorted), pairwise_sum(&squares), values.len(), 0, reference)
}

/// Time average `(1/(N−b)) Σ_{n=b}^{N−1} φ(X_n)` over a single trajectory.
pub fn time_average(trace: &[f64], burn_in: usize) -> Result<f64> {
    let kept = trace.get(burn_in..).unwrap_or(&[]);
    if kept.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: burn_in + 1,
            got: trace.len(),
        });
    }
    Ok(pairwise_sum(kept) / kept.len() as f64)
}

/// Two-step extrapolation `A₁·h₂/(h₂−h₁) − A₂·h₁/(h₂−h₁)`, which removes the
/// first-order term of `A(h) = A + C·h + O(h²)`.
pub fn talay_tubaro(h1: f64, a1: f64, h2: f64, a2: f64) -> Result<f64> {
    if !(h1 > 0.0 && h2 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step sizes must be positive, got {h1} and {h2}"
        )));
    }
    if h1 == h2 {
        return Err(Error::DegenerateSteps { h: h1 });
    }
    // a1·h2/(h2−h1) − a2·h1/(h2−h1), arranged so equal inputs pass through unchanged
    Ok(a1 + (a1 - a2) * h1 / (h2 - h1))
}

/// Unweighted least squares of `ln err` against `ln h`; returns
/// `(slope, intercept)`.
pub fn convergence_slope(rows: &[(f64, f64)]) -> Result<(f64, f64)> {
    if rows.len() < 2 {
        return Err(Error::CannotFit(format!("need at least 2 rows, got {}", rows.len())));
    }
    if let Some(&(h, e)) = rows.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0)) {
        return Err(Error::CannotFit(format!("nonpositive entry (h = {h}, err = {e})")));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::CannotFit("all step sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub result: EstimateResult,
}

impl ConvergenceRow {
    /// Whether the bias is resolved above Monte Carlo noise (`err ≥ 2·ci`).
    pub fn resolved(&self) -> bool {
        self.result.err.is_some_and(|e| e >= 2.0 * self.result.ci_halfwidth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of rows that entered the fit.
    pub n_rows: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub fit: Result<SlopeFit>,
}

impl ConvergenceReport {
    /// Fits the log-log slope over the rows whose error is resolved.
    pub fn new(rows: Vec<ConvergenceRow>) -> Self {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.resolved())
            .map(|r| (r.h, r.result.err.unwrap_or(0.0)))
            .collect();
        let fit = convergence_slope(&pts).map(|(slope, intercept)| SlopeFit {
            slope,
            intercept,
            n_rows: pts.len(),
        });
        Self { rows, fit }
    }
}
