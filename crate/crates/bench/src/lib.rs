//! Fixtures shared by the benchmarks.

use rlmc_core::{
    hvec_inv, Chart, HalfVec, NoiseKind, Point, PotentialSpec, SamplerConfig, Scheme, SpdMatrix, SpdPoint, SpherePoint,
};
use std::f64::consts::FRAC_PI_4;

/// `hvec⁻¹(2, 4, 2, 1, 1, 0)`.
pub fn spd_start() -> SpdPoint {
    SpdMatrix::new(hvec_inv(&HalfVec([2.0, 4.0, 2.0, 1.0, 1.0, 0.0]))).expect("SPD start")
}

pub fn sphere_start() -> SpherePoint {
    SpherePoint::new(Chart::One, FRAC_PI_4, FRAC_PI_4)
}

pub fn sphere_config(h: f64, horizon: f64) -> SamplerConfig {
    SamplerConfig {
        potential: PotentialSpec::VonMisesFisher { lambda: 1.0 },
        scheme: Scheme::RetractionEuler,
        noise: NoiseKind::Rademacher,
        h,
        horizon,
        rejection_radius: None,
        initial: Point::Sphere(sphere_start()),
        seed: 1,
    }
}

pub fn spd_config(potential: PotentialSpec, h: f64, horizon: f64) -> SamplerConfig {
    SamplerConfig {
        potential,
        scheme: Scheme::ExpEuler,
        noise: NoiseKind::Rademacher,
        h,
        horizon,
        rejection_radius: None,
        initial: Point::Spd(spd_start()),
        seed: 1,
    }
}
