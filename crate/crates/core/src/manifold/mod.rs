//! Geometry of the two supported manifolds.

pub mod spd;
pub mod sphere;

pub use spd::{
    spd_dist, spd_exp, spd_log, spd_metric_inv, spd_metric_inv_sqrt, spd_tangent_norm, SpdFactors,
    SpdPoint,
};
pub use sphere::{
    sphere_embed, sphere_geodesic_rk4, sphere_geodesic_rk4_with_velocity, sphere_metric_inv_sqrt,
    sphere_transition, Chart, SpherePoint, CHART_EPS,
};

/// Tangent vector in coordinates of the active chart: `(∂_r, ∂_θ)`
/// components on the sphere, half-vectorization components on the SPD cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentCoords<const Q: usize>(pub [f64; Q]);

/// A point on either manifold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Sphere(SpherePoint),
    Spd(SpdPoint),
}
