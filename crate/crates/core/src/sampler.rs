//! Riemannian Langevin chains.
//!
//! One step moves from `X` along the curve with initial velocity
//! `−(√h/2)∇φ(X) + g^{-1/2}(X)ξ` for time `√h`. On the SPD cone the curve is
//! the exact geodesic; on the sphere it is one RK4 step of the geodesic
//! equations in the active chart. The splitting variant takes the drift and
//! noise moves as two successive curves.

use crate::error::{Error, Result};
use crate::manifold::sphere::sphere_metric_inv_sqrt;
use crate::manifold::{sphere_geodesic_rk4, Point, SpdFactors, SpdPoint, SpherePoint, TangentCoords};
use crate::manifold::spd::spd_metric_inv_sqrt;
use crate::noise::{NoiseKind, NoiseSpec, RngStream};
use crate::potential::{spd_drift_from_factors, vmf_drift_tangent, ManifoldKind, Observable, PotentialSpec};
use crate::symmat::{hvec_inv, HalfVec, Sym3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Exact exponential map (SPD cone).
    ExpEuler,
    /// RK4 geodesic retraction (sphere).
    RetractionEuler,
    /// Drift move followed by a noise move.
    Splitting,
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub potential: PotentialSpec,
    pub scheme: Scheme,
    pub noise: NoiseKind,
    /// Step size.
    pub h: f64,
    /// Time horizon `T`; the chain takes `round(T/h)` steps.
    pub horizon: f64,
    /// Geodesic ball `ρ(X, I) ≤ R` outside which SPD trajectories are rejected.
    pub rejection_radius: Option<f64>,
    pub initial: Point,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn manifold(&self) -> ManifoldKind {
        self.potential.manifold()
    }

    pub fn dim(&self) -> usize {
        match self.manifold() {
            ManifoldKind::Sphere2 => 2,
            ManifoldKind::Spd3 => 6,
        }
    }

    pub fn noise_spec(&self) -> NoiseSpec {
        NoiseSpec::new(self.noise, self.dim())
    }

    /// `N = round(T/h)`, requiring `T` to be an integer multiple of `h`.
    pub fn n_steps(&self) -> Result<usize> {
        let (h, t) = (self.h, self.horizon);
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("step size must be positive, got {h}")));
        }
        if !(t >= h && t.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon T = {t} must be at least h = {h}")));
        }
        let n = (t / h).round();
        if (n * h - t).abs() >= 1e-9 * t {
            return Err(Error::InvalidConfig(format!("T = {t} is not a multiple of h = {h}")));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.n_steps()?;
        match (self.manifold(), &self.initial, self.scheme) {
            (ManifoldKind::Sphere2, Point::Sphere(p), Scheme::RetractionEuler | Scheme::Splitting) => {
                if !(p.r > 0.0 && p.r < std::f64::consts::PI) {
                    return Err(Error::InvalidConfig(format!("initial r = {} outside (0, π)", p.r)));
                }
            }
            (ManifoldKind::Sphere2, Point::Sphere(_), Scheme::ExpEuler) => {
                return Err(Error::InvalidConfig(
                    "no closed-form exponential map in spherical coordinates; use the retraction scheme".into(),
                ))
            }
            (ManifoldKind::Spd3, Point::Spd(_), Scheme::ExpEuler | Scheme::Splitting) => {}
            (ManifoldKind::Spd3, Point::Spd(_), Scheme::RetractionEuler) => {
                return Err(Error::InvalidConfig(
                    "the SPD sampler uses the exact exponential map; use the exp scheme".into(),
                ))
            }
            (m, _, _) => {
                return Err(Error::InvalidConfig(format!("initial point does not lie on {m}")))
            }
        }
        if let Some(r) = self.rejection_radius {
            if r.is_nan() || r < 0.0 {
                return Err(Error::InvalidConfig(format!("rejection radius must be nonnegative, got {r}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryOutcome {
    Completed {
        final_point: Point,
        /// `φ(X_n)` for `n = 0, …, N−1` when tracing was requested.
        trace: Option<Vec<f64>>,
    },
    /// The chain left the rejection ball after this many steps.
    Rejected { step: usize },
}

fn vmf_lambda(spec: &PotentialSpec) -> f64 {
    match *spec {
        PotentialSpec::VonMisesFisher { lambda } => lambda,
        _ => unreachable!("sphere step with SPD potential"),
    }
}

/// One step of the RK4-retraction chain on the sphere. Switches chart first
/// if the point lies in a polar cap of its current chart.
pub fn step_retraction_sphere(p: &SpherePoint, lambda: f64, h: f64, xi: &[f64; 2]) -> Result<SpherePoint> {
    let p = p.rechart();
    let drift = vmf_drift_tangent(&p, lambda, h)?;
    let g = sphere_metric_inv_sqrt(&p)?;
    let v = TangentCoords([drift.0[0] + g[0] * xi[0], drift.0[1] + g[1] * xi[1]]);
    sphere_geodesic_rk4(&p, &v, h.sqrt())
}

fn spd_noise_inner(x: &SpdPoint, f: &SpdFactors, h: f64, xi: &[f64; 6]) -> Result<Sym3> {
    let u = spd_metric_inv_sqrt(x)?.matvec(xi);
    Ok(hvec_inv(&HalfVec(u)).congruence(&f.inv_sqrt).scale(h.sqrt()))
}

fn step_exp_spd_factored(
    x: &SpdPoint,
    f: &SpdFactors,
    spec: &PotentialSpec,
    h: f64,
    xi: &[f64; 6],
) -> Result<SpdPoint> {
    let m = spd_drift_from_factors(f, spec, h).add(&spd_noise_inner(x, f, h, xi)?);
    f.exp_inner(&m)
}

/// One exponential-map step on the SPD cone:
/// `M = drift + √h X^{-1/2} hvec⁻¹(G^{-1/2}(X) ξ) X^{-1/2}`,
/// `X⁺ = X^{1/2} Exp(M) X^{1/2}`.
pub fn step_exp_spd(x: &SpdPoint, spec: &PotentialSpec, h: f64, xi: &[f64; 6]) -> Result<SpdPoint> {
    step_exp_spd_factored(x, &SpdFactors::new(x)?, spec, h, xi)
}

fn step_splitting_spd(f: &SpdFactors, spec: &PotentialSpec, h: f64, xi: &[f64; 6]) -> Result<SpdPoint> {
    let mid = f.exp_inner(&spd_drift_from_factors(f, spec, h))?;
    let fm = SpdFactors::new(&mid)?;
    fm.exp_inner(&spd_noise_inner(&mid, &fm, h, xi)?)
}

fn step_splitting_sphere(p: &SpherePoint, lambda: f64, h: f64, xi: &[f64; 2]) -> Result<SpherePoint> {
    let s = h.sqrt();
    let p = p.rechart();
    let mid = sphere_geodesic_rk4(&p, &vmf_drift_tangent(&p, lambda, h)?, s)?.rechart();
    let g = sphere_metric_inv_sqrt(&mid)?;
    sphere_geodesic_rk4(&mid, &TangentCoords([g[0] * xi[0], g[1] * xi[1]]), s)
}

/// One splitting step: drift move `F_X(−(h/2)∇φ)`, then noise move
/// `F_X̂(√h g^{-1/2} ξ)` from the intermediate point.
pub fn step_splitting(p: &Point, spec: &PotentialSpec, h: f64, xi: &[f64]) -> Result<Point> {
    match p {
        Point::Sphere(q) => {
            let xi: [f64; 2] = noise_array(xi)?;
            step_splitting_sphere(q, vmf_lambda(spec), h, &xi).map(Point::Sphere)
        }
        Point::Spd(x) => {
            let xi: [f64; 6] = noise_array(xi)?;
            step_splitting_spd(&SpdFactors::new(x)?, spec, h, &xi).map(Point::Spd)
        }
    }
}

/// One step of whichever scheme `cfg` selects.
pub fn step(cfg: &SamplerConfig, p: &Point, xi: &[f64]) -> Result<Point> {
    match (cfg.scheme, p) {
        (Scheme::Splitting, _) => step_splitting(p, &cfg.potential, cfg.h, xi),
        (_, Point::Sphere(q)) => {
            step_retraction_sphere(q, vmf_lambda(&cfg.potential), cfg.h, &noise_array(xi)?).map(Point::Sphere)
        }
        (_, Point::Spd(x)) => step_exp_spd(x, &cfg.potential, cfg.h, &noise_array(xi)?).map(Point::Spd),
    }
}

fn noise_array<const Q: usize>(xi: &[f64]) -> Result<[f64; Q]> {
    xi.try_into()
        .map_err(|_| Error::InvalidConfig(format!("noise vector has length {}, expected {Q}", xi.len())))
}

/// Simulates trajectory `stream_id` of the ensemble described by `cfg`.
pub fn run_trajectory(cfg: &SamplerConfig, stream_id: u64) -> Result<TrajectoryOutcome> {
    simulate(cfg, stream_id, None)
}

/// As [`run_trajectory`], also recording `φ(X_n)` for `n = 0, …, N−1`.
pub fn run_trajectory_traced(cfg: &SamplerConfig, stream_id: u64, obs: &Observable) -> Result<TrajectoryOutcome> {
    simulate(cfg, stream_id, Some(obs))
}

fn simulate(cfg: &SamplerConfig, stream_id: u64, obs: Option<&Observable>) -> Result<TrajectoryOutcome> {
    cfg.validate()?;
    let n_steps = cfg.n_steps()?;
    let noise = cfg.noise_spec();
    let mut rng = RngStream::new(cfg.seed, stream_id);
    let mut trace = obs.map(|_| Vec::with_capacity(n_steps));
    let mut record = |p: &Point| -> Result<()> {
        if let (Some(t), Some(o)) = (trace.as_mut(), obs) {
            t.push(o.eval(p)?);
        }
        Ok(())
    };

    let final_point = match cfg.initial {
        Point::Sphere(p0) => {
            let lambda = vmf_lambda(&cfg.potential);
            let mut p = p0;
            let mut xi = [0.0; 2];
            for n in 0..n_steps {
                record(&Point::Sphere(p))?;
                noise.draw_into(&mut rng, &mut xi);
                p = match cfg.scheme {
                    Scheme::Splitting => step_splitting_sphere(&p, lambda, cfg.h, &xi),
                    _ => step_retraction_sphere(&p, lambda, cfg.h, &xi),
                }
                .map_err(|e| e.at_step(n + 1))?;
            }
            Point::Sphere(p.to_chart_one())
        }
        Point::Spd(x0) => {
            let mut x = x0;
            let mut f = SpdFactors::new(&x)?;
            let mut xi = [0.0; 6];
            for n in 0..n_steps {
                record(&Point::Spd(x))?;
                noise.draw_into(&mut rng, &mut xi);
                x = match cfg.scheme {
                    Scheme::Splitting => step_splitting_spd(&f, &cfg.potential, cfg.h, &xi),
                    _ => step_exp_spd_factored(&x, &f, &cfg.potential, cfg.h, &xi),
                }
                .map_err(|e| e.at_step(n + 1))?;
                f = SpdFactors::new(&x).map_err(|e| e.at_step(n + 1))?;
                if let Some(radius) = cfg.rejection_radius {
                    if f.dist_to_identity > radius {
                        return Ok(TrajectoryOutcome::Rejected { step: n + 1 });
                    }
                }
            }
            Point::Spd(x)
        }
    };
    Ok(TrajectoryOutcome::Completed { final_point, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::sphere::{sphere_embed, sphere_geodesic_rk4_with_velocity};
    use crate::manifold::Chart;
    use crate::symmat::{mat_exp, SpdMatrix};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn x0() -> SpdPoint {
        SpdMatrix::new(hvec_inv(&HalfVec([2.0, 4.0, 2.0, 1.0, 1.0, 0.0]))).unwrap()
    }

    fn spd_cfg(potential: PotentialSpec, scheme: Scheme) -> SamplerConfig {
        SamplerConfig {
            potential,
            scheme,
            noise: NoiseKind::Rademacher,
            h: 0.1,
            horizon: 1.0,
            rejection_radius: None,
            initial: Point::Spd(x0()),
            seed: 11,
        }
    }

    fn sphere_cfg() -> SamplerConfig {
        SamplerConfig {
            potential: PotentialSpec::VonMisesFisher { lambda: 1.0 },
            scheme: Scheme::RetractionEuler,
            noise: NoiseKind::Rademacher,
            h: 0.1,
            horizon: 1.0,
            rejection_radius: None,
            initial: Point::Sphere(SpherePoint::new(Chart::One, FRAC_PI_4, FRAC_PI_4)),
            seed: 11,
        }
    }

    fn close(a: &SpdPoint, b: &SpdPoint, tol: f64) -> bool {
        a.as_sym().sub(b.as_sym()).frobenius_norm() <= tol * b.as_sym().frobenius_norm()
    }

    #[test]
    fn identity_is_fixed_without_noise() {
        let rg = PotentialSpec::RiemannianGaussian { sigma: 0.7 };
        let x = step_exp_spd(&SpdPoint::identity(), &rg, 0.1, &[0.0; 6]).unwrap();
        assert!(close(&x, &SpdPoint::identity(), 1e-15));
    }

    #[test]
    fn unit_noise_at_identity() {
        let h: f64 = 0.04;
        let xi = [1.0; 6];
        let x = step_exp_spd(&SpdPoint::identity(), &PotentialSpec::RiemannianGaussian { sigma: 3.0 }, h, &xi).unwrap();
        let r = 0.5f64.sqrt();
        let m = hvec_inv(&HalfVec([1.0, 1.0, 1.0, r, r, r])).scale(h.sqrt());
        assert!(close(&x, &mat_exp(&m).unwrap(), 1e-13));
    }

    #[test]
    fn splitting_reduces_to_single_moves() {
        let rg = PotentialSpec::RiemannianGaussian { sigma: 0.7 };
        let x = x0();
        // no noise: pure drift move
        let a = step_splitting(&Point::Spd(x), &rg, 0.1, &[0.0; 6]).unwrap();
        let b = step_exp_spd(&x, &rg, 0.1, &[0.0; 6]).unwrap();
        let Point::Spd(a) = a else { panic!() };
        assert!(close(&a, &b, 1e-13));
        // no gradient at the identity: pure noise move
        let xi = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let Point::Spd(a) = step_splitting(&Point::Spd(SpdPoint::identity()), &rg, 0.1, &xi).unwrap() else { panic!() };
        let b = step_exp_spd(&SpdPoint::identity(), &rg, 0.1, &xi).unwrap();
        assert!(close(&a, &b, 1e-13));
    }

    #[test]
    fn sphere_mode_is_fixed_without_noise() {
        let p = SpherePoint::new(Chart::Two, FRAC_PI_2, FRAC_PI_2);
        let q = step_retraction_sphere(&p, 1.0, 0.1, &[0.0, 0.0]).unwrap();
        assert_eq!(q.chart, Chart::Two);
        assert!((q.r - p.r).abs() < 1e-15 && (q.theta - p.theta).abs() < 1e-15);
    }

    #[test]
    fn sphere_step_switches_chart_in_polar_cap() {
        let p = SpherePoint::new(Chart::One, 0.3, 1.0);
        let q = step_retraction_sphere(&p, 1.0, 0.01, &[0.0, 0.0]).unwrap();
        assert_eq!(q.chart, Chart::Two);
    }

    /// Many small RK4 substeps of the same geodesic problem.
    fn refined_geodesic(p: &SpherePoint, v: TangentCoords<2>, s: f64, substeps: usize) -> SpherePoint {
        let ds = s / substeps as f64;
        let (mut q, mut w) = (*p, v);
        for _ in 0..substeps {
            (q, w) = sphere_geodesic_rk4_with_velocity(&q, &w, ds).unwrap();
        }
        q
    }

    #[test]
    fn sphere_step_matches_refined_geodesic() {
        let (h, lambda) = (0.01f64, 1.0);
        let p = SpherePoint::new(Chart::One, FRAC_PI_2, 1.0);
        let xi = [1.0, 1.0];
        let got = step_retraction_sphere(&p, lambda, h, &xi).unwrap();
        let d = vmf_drift_tangent(&p, lambda, h).unwrap();
        let g = sphere_metric_inv_sqrt(&p).unwrap();
        let v = TangentCoords([d.0[0] + g[0] * xi[0], d.0[1] + g[1] * xi[1]]);
        let want = refined_geodesic(&p, v, h.sqrt(), 100);
        let (a, b) = (sphere_embed(&got), sphere_embed(&want));
        let dist = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        assert!(dist <= 1e-6, "distance {dist}");
    }

    #[test]
    fn trajectories_are_deterministic_and_on_manifold() {
        for cfg in [
            sphere_cfg(),
            spd_cfg(PotentialSpec::DoubleWell, Scheme::ExpEuler),
            spd_cfg(PotentialSpec::RiemannianGaussian { sigma: 0.7 }, Scheme::Splitting),
        ] {
            let a = run_trajectory(&cfg, 3).unwrap();
            assert_eq!(a, run_trajectory(&cfg, 3).unwrap());
            assert_ne!(a, run_trajectory(&cfg, 4).unwrap());
            match a {
                TrajectoryOutcome::Completed { final_point: Point::Spd(x), .. } => {
                    assert!(SpdMatrix::new(x.into_sym()).is_ok())
                }
                TrajectoryOutcome::Completed { final_point: Point::Sphere(p), .. } => {
                    assert_eq!(p.chart, Chart::One);
                    assert!(p.r > 0.0 && p.r < PI && (0.0..2.0 * PI).contains(&p.theta));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn one_step_horizon() {
        let mut cfg = sphere_cfg();
        cfg.horizon = cfg.h;
        let out = run_trajectory_traced(&cfg, 0, &Observable::SinR).unwrap();
        let TrajectoryOutcome::Completed { trace: Some(t), .. } = out else { panic!() };
        assert_eq!(t, vec![FRAC_PI_4.sin()]);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = sphere_cfg();
        cfg.horizon = 0.25;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg.horizon = 0.05;
        assert!(cfg.validate().is_err());
        let mut cfg = sphere_cfg();
        cfg.scheme = Scheme::ExpEuler;
        assert!(cfg.validate().is_err());
        let mut cfg = spd_cfg(PotentialSpec::DoubleWell, Scheme::RetractionEuler);
        assert!(cfg.validate().is_err());
        cfg.scheme = Scheme::ExpEuler;
        cfg.initial = sphere_cfg().initial;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tiny_rejection_radius_rejects_first_step() {
        let mut cfg = spd_cfg(PotentialSpec::DoubleWell, Scheme::ExpEuler);
        cfg.rejection_radius = Some(0.01);
        assert_eq!(run_trajectory(&cfg, 0).unwrap(), TrajectoryOutcome::Rejected { step: 1 });
    }

    #[test]
    fn chain_is_constant_without_drift_and_noise() {
        let mut cfg = spd_cfg(PotentialSpec::RiemannianGaussian { sigma: 1.0 }, Scheme::ExpEuler);
        cfg.initial = Point::Spd(SpdPoint::identity());
        let mut p = cfg.initial;
        for _ in 0..50 {
            p = step(&cfg, &p, &[0.0; 6]).unwrap();
        }
        let Point::Spd(x) = p else { panic!() };
        assert!(close(&x, &SpdPoint::identity(), 1e-14));
    }

    #[test]
    fn oversized_step_reports_step_index() {
        let cfg = SamplerConfig {
            h: 1e200,
            horizon: 2e200,
            noise: NoiseKind::Gaussian,
            ..sphere_cfg()
        };
        let failure = (0..200).find_map(|id| run_trajectory(&cfg, id).err());
        match failure {
            Some(Error::AtStep { source, .. }) => assert!(matches!(*source, Error::StepOutOfChart { .. })),
            other => panic!("expected a step error, got {other:?}"),
        }
    }
}
