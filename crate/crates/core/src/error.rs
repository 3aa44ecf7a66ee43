use thiserror::Error;

/// Errors raised by the geometry kernel, the samplers and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry in matrix input")]
    NonFinite,

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:e}, floor {floor:e})")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    #[error("r = {r} lies outside the chart band ({lo}, {hi}); switch charts first")]
    ChartDomain { r: f64, lo: f64, hi: f64 },

    #[error("geodesic RK4 stage hit a coordinate singularity (r = {r}); step size too large")]
    StepOutOfChart { r: f64 },

    #[error("observable {observable} is not supported for target {target}")]
    Unsupported { target: String, observable: String },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("extrapolation requires distinct step sizes (h1 = h2 = {h})")]
    DegenerateSteps { h: f64 },

    #[error("cannot fit convergence slope: {0}")]
    CannotFit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
