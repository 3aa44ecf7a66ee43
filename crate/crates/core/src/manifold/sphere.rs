//! The unit 2-sphere in two spherical-coordinate charts.
//!
//! Chart 1 embeds `(r, θ) ↦ (sin r cos θ, sin r sin θ, cos r)`; chart 2 is
//! the same map with the ambient axes permuted,
//! `(r, θ) ↦ (cos r, sin r cos θ, sin r sin θ)`. Both carry the round metric
//! `dr² + sin²r dθ²`. Each chart is only used on the band `r ∈ (ε, π − ε)`,
//! and the two bands together cover the sphere.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::manifold::TangentCoords;

/// Half-width of the excluded polar caps in each chart.
pub const CHART_EPS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    One,
    Two,
}

impl Chart {
    pub fn other(self) -> Self {
        match self {
            Chart::One => Chart::Two,
            Chart::Two => Chart::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Chart::One => 1,
            Chart::Two => 2,
        }
    }
}

/// Point on the 2-sphere in intrinsic coordinates of one chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    pub chart: Chart,
    pub r: f64,
    pub theta: f64,
}

impl SpherePoint {
    /// `theta` is wrapped into `[0, 2π)`.
    pub fn new(chart: Chart, r: f64, theta: f64) -> Self {
        Self {
            chart,
            r,
            theta: wrap_angle(theta),
        }
    }

    pub fn in_band(&self) -> bool {
        self.r > CHART_EPS && self.r < PI - CHART_EPS
    }

    /// Same point expressed in chart 1.
    pub fn to_chart_one(self) -> Self {
        match self.chart {
            Chart::One => self,
            Chart::Two => sphere_transition(&self),
        }
    }

    /// Switches chart when the point has drifted into a polar cap of its
    /// current chart.
    pub fn rechart(self) -> Self {
        if self.in_band() {
            self
        } else {
            sphere_transition(&self)
        }
    }
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Embedding into ℝ³.
pub fn sphere_embed(p: &SpherePoint) -> [f64; 3] {
    let (sr, cr) = p.r.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    match p.chart {
        Chart::One => [sr * ct, sr * st, cr],
        Chart::Two => [cr, sr * ct, sr * st],
    }
}

/// Recovers chart coordinates of a unit vector.
pub fn sphere_from_embedding(chart: Chart, e: [f64; 3]) -> SpherePoint {
    // (axis, first, second) of the spherical coordinates in ambient components
    let (axis, a, b) = match chart {
        Chart::One => (e[2], e[0], e[1]),
        Chart::Two => (e[0], e[1], e[2]),
    };
    let r = a.hypot(b).atan2(axis);
    let theta = b.atan2(a);
    SpherePoint::new(chart, r, theta)
}

/// Re-expresses a point in the opposite chart.
pub fn sphere_transition(p: &SpherePoint) -> SpherePoint {
    sphere_from_embedding(p.chart.other(), sphere_embed(p))
}

/// `g^{-1/2} = diag(1, 1/sin r)`, returned as its diagonal.
pub fn sphere_metric_inv_sqrt(p: &SpherePoint) -> Result<[f64; 2]> {
    check_band(p)?;
    Ok([1.0, 1.0 / p.r.sin()])
}

pub(crate) fn check_band(p: &SpherePoint) -> Result<()> {
    if p.in_band() {
        Ok(())
    } else {
        Err(Error::ChartDomain {
            r: p.r,
            lo: CHART_EPS,
            hi: PI - CHART_EPS,
        })
    }
}

/// Riemannian norm of a tangent vector at `p`.
pub fn sphere_tangent_norm(p: &SpherePoint, v: &TangentCoords<2>) -> f64 {
    let s = p.r.sin();
    (v.0[0] * v.0[0] + s * s * v.0[1] * v.0[1]).sqrt()
}

/// Pushes chart-coordinate velocity forward to an ambient ℝ³ vector.
pub fn sphere_pushforward(p: &SpherePoint, v: &TangentCoords<2>) -> [f64; 3] {
    let (sr, cr) = p.r.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let [vr, vt] = v.0;
    // (d/dr, d/dθ) of (sin r cos θ, sin r sin θ, cos r)
    let a = [cr * ct * vr - sr * st * vt, cr * st * vr + sr * ct * vt, -sr * vr];
    match p.chart {
        Chart::One => a,
        Chart::Two => [a[2], a[0], a[1]],
    }
}

#[inline]
fn geodesic_rhs(state: &[f64; 4]) -> Result<[f64; 4]> {
    let [r, _, y, z] = *state;
    let (s, c) = r.sin_cos();
    if s == 0.0 || !state.iter().all(|v| v.is_finite()) {
        return Err(Error::StepOutOfChart { r });
    }
    Ok([y, z, s * c * z * z, -2.0 * (c / s) * y * z])
}

/// Brings `r` back into `[0, π]`. A chart stays valid beyond its poles:
/// `(r, θ)` and `(−r, θ + π)` name the same point, with the radial velocity
/// reversed.
fn canonical(chart: Chart, x: [f64; 4]) -> (SpherePoint, TangentCoords<2>) {
    let [mut r, mut theta, mut y, z] = x;
    r = r.rem_euclid(TAU);
    if r > PI {
        r = TAU - r;
        theta += PI;
        y = -y;
    }
    (SpherePoint::new(chart, r, theta), TangentCoords([y, z]))
}

/// One classical RK4 step `(1/6, 1/3, 1/3, 1/6)` of the geodesic equations
/// in spherical coordinates, returning the end point and end velocity.
///
/// Stages may pass over a pole of the chart; the end point is reported with
/// `r ∈ [0, π]`. Fails only if a stage lands exactly on a pole or overflows.
pub fn sphere_geodesic_rk4_with_velocity(
    p: &SpherePoint,
    v: &TangentCoords<2>,
    s: f64,
) -> Result<(SpherePoint, TangentCoords<2>)> {
    let x0 = [p.r, p.theta, v.0[0], v.0[1]];
    let add = |x: &[f64; 4], k: &[f64; 4], f: f64| -> [f64; 4] {
        std::array::from_fn(|i| x[i] + f * k[i])
    };
    let k1 = geodesic_rhs(&x0)?;
    let k2 = geodesic_rhs(&add(&x0, &k1, 0.5 * s))?;
    let k3 = geodesic_rhs(&add(&x0, &k2, 0.5 * s))?;
    let k4 = geodesic_rhs(&add(&x0, &k3, s))?;
    let x1: [f64; 4] =
        std::array::from_fn(|i| x0[i] + s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    if !x1.iter().all(|v| v.is_finite()) {
        return Err(Error::StepOutOfChart { r: x1[0] });
    }
    Ok(canonical(p.chart, x1))
}

/// Retraction used by the sphere sampler: a single RK4 step of length `s`
/// along the geodesic with initial velocity `v`.
pub fn sphere_geodesic_rk4(p: &SpherePoint, v: &TangentCoords<2>, s: f64) -> Result<SpherePoint> {
    sphere_geodesic_rk4_with_velocity(p, v, s).map(|(q, _)| q)
}
