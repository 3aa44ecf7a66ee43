//! Intrinsic Riemannian Langevin Monte Carlo on the 2-sphere and on the
//! cone of 3×3 symmetric positive definite matrices.
//!
//! The chain moves along (approximate) geodesics, so every iterate stays on
//! the manifold. Expectations under the target are estimated by ensemble or
//! time averages, and the first-order step-size bias can be removed by
//! two-step extrapolation.

pub mod ensemble;
pub mod error;
pub mod estimate;
pub mod manifold;
pub mod noise;
pub mod potential;
pub mod quadrature;
pub mod sampler;
pub mod symmat;

pub use ensemble::{run_ensemble, EnsembleSums};
pub use error::{Error, Result};
pub use estimate::{
    convergence_slope, ensemble_estimate, talay_tubaro, time_average, ConvergenceReport, ConvergenceRow,
    EstimateResult, SlopeFit,
};
pub use manifold::{Chart, Point, SpdPoint, SpherePoint, TangentCoords};
pub use noise::{NoiseKind, NoiseSpec, RngStream};
pub use potential::{reference_value, ManifoldKind, Observable, PotentialSpec};
pub use sampler::{run_trajectory, run_trajectory_traced, SamplerConfig, Scheme, TrajectoryOutcome};
pub use symmat::{hvec, hvec_inv, HalfVec, Spd3, SpdMatrix, Sym3, SymMatrix};
