//! Target potentials `φ` (the target is `e^{−φ} dvol_g`), their drift
//! terms, test observables and quadrature reference values of `μ_φ(f)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::sphere::{check_band, sphere_embed};
use crate::manifold::{Chart, Point, SpdFactors, SpdPoint, SpherePoint, TangentCoords};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre_on, pairwise_sum};
use crate::symmat::Sym3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    Sphere2,
    Spd3,
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ManifoldKind::Sphere2 => "sphere2",
            ManifoldKind::Spd3 => "spd3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialSpec {
    /// `φ = −λ cos r` on the sphere.
    VonMisesFisher { lambda: f64 },
    /// `φ = ρ(X, I)² / (2σ²)` on the SPD cone.
    RiemannianGaussian { sigma: f64 },
    /// `φ = ρ(X, I)⁴ − ρ(X, I)²` on the SPD cone.
    DoubleWell,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialSpec::VonMisesFisher { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidConfig(format!("lambda must be positive, got {lambda}")))
            }
            PotentialSpec::RiemannianGaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn manifold(&self) -> ManifoldKind {
        match self {
            PotentialSpec::VonMisesFisher { .. } => ManifoldKind::Sphere2,
            _ => ManifoldKind::Spd3,
        }
    }

    /// `φ` on the SPD cone as a function of `ρ² = ρ(X, I)²`.
    fn spd_phi(&self, rho_sq: f64) -> f64 {
        match *self {
            PotentialSpec::RiemannianGaussian { sigma } => rho_sq / (2.0 * sigma * sigma),
            PotentialSpec::DoubleWell => rho_sq * rho_sq - rho_sq,
            PotentialSpec::VonMisesFisher { .. } => unreachable!("sphere potential"),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::VonMisesFisher { lambda } => write!(f, "vmf(lambda={lambda})"),
            PotentialSpec::RiemannianGaussian { sigma } => write!(f, "rgauss(sigma={sigma})"),
            PotentialSpec::DoubleWell => f.write_str("dwell"),
        }
    }
}

/// User-supplied observable.
#[derive(Clone)]
pub struct CustomObservable {
    pub name: String,
    pub f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomObservable").field("name", &self.name).finish()
    }
}

/// Test function whose expectation under the target is estimated.
#[derive(Clone, Debug)]
pub enum Observable {
    /// `sin r` in chart-1 coordinates of the sphere.
    SinR,
    /// `det X`.
    Det,
    /// `1 / (1 + tr X)`.
    InvOnePlusTrace,
    Custom(CustomObservable),
}

impl Observable {
    pub fn custom(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Observable::Custom(CustomObservable {
            name: name.into(),
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Observable::SinR => "sin_r",
            Observable::Det => "det",
            Observable::InvOnePlusTrace => "inv1ptr",
            Observable::Custom(c) => &c.name,
        }
    }

    /// Manifold the observable is defined on; `None` for custom functions.
    pub fn manifold(&self) -> Option<ManifoldKind> {
        match self {
            Observable::SinR => Some(ManifoldKind::Sphere2),
            Observable::Det | Observable::InvOnePlusTrace => Some(ManifoldKind::Spd3),
            Observable::Custom(_) => None,
        }
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        match (self, p) {
            (Observable::SinR, Point::Sphere(q)) => Ok(sin_r_chart_one(q)),
            (Observable::Det, Point::Spd(x)) => Ok(x.as_sym().det()),
            (Observable::InvOnePlusTrace, Point::Spd(x)) => Ok(1.0 / (1.0 + x.as_sym().trace())),
            (Observable::Custom(c), p) => Ok((c.f)(p)),
            (obs, p) => Err(Error::Unsupported {
                target: match p {
                    Point::Sphere(_) => "sphere2".into(),
                    Point::Spd(_) => "spd3".into(),
                },
                observable: obs.name().into(),
            }),
        }
    }
}

fn sin_r_chart_one(p: &SpherePoint) -> f64 {
    match p.chart {
        Chart::One => p.r.sin(),
        Chart::Two => {
            let e = sphere_embed(p);
            e[0].hypot(e[1])
        }
    }
}

/// Drift part of the initial retraction velocity, `−(√h/2)∇φ`, for the
/// von Mises–Fisher potential in the coordinates of the point's chart.
pub fn vmf_drift_tangent(p: &SpherePoint, lambda: f64, h: f64) -> Result<TangentCoords<2>> {
    check_band(p)?;
    let k = 0.5 * lambda * h.sqrt();
    let (sr, cr) = p.r.sin_cos();
    Ok(match p.chart {
        Chart::One => TangentCoords([-k * sr, 0.0]),
        Chart::Two => {
            let (st, ct) = p.theta.sin_cos();
            TangentCoords([k * cr * st, k * ct / sr])
        }
    })
}

/// Drift contribution to the inner matrix `M` of the SPD update
/// `X⁺ = X^{1/2} Exp(M) X^{1/2}`, i.e. `X^{-1/2}(−(h/2)∇φ)X^{-1/2}`.
pub fn spd_drift_matrix(x: &SpdPoint, spec: &PotentialSpec, h: f64) -> Result<Sym3> {
    Ok(spd_drift_from_factors(&SpdFactors::new(x)?, spec, h))
}

pub(crate) fn spd_drift_from_factors(f: &SpdFactors, spec: &PotentialSpec, h: f64) -> Sym3 {
    let coef = match *spec {
        PotentialSpec::RiemannianGaussian { sigma } => -h / (2.0 * sigma * sigma),
        PotentialSpec::DoubleWell => {
            let rho = f.dist_to_identity;
            h * (1.0 - 2.0 * rho * rho)
        }
        PotentialSpec::VonMisesFisher { .. } => unreachable!("sphere potential"),
    };
    f.log.scale(coef)
}

/// Node counts for the reference quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureResolution {
    /// Composite Gauss–Legendre on `[0, π]`: panels × nodes per panel.
    pub sphere_panels: usize,
    pub sphere_nodes_per_panel: usize,
    /// Nodes per axis of the tensor rule in log-eigenvalue coordinates.
    pub spd_nodes: usize,
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        Self {
            sphere_panels: 16,
            sphere_nodes_per_panel: 16,
            spd_nodes: 96,
        }
    }
}

impl QuadratureResolution {
    pub fn doubled(self) -> Self {
        Self {
            sphere_panels: 2 * self.sphere_panels,
            sphere_nodes_per_panel: self.sphere_nodes_per_panel,
            spd_nodes: 2 * self.spd_nodes,
        }
    }
}

/// `μ_φ(f)` for the von Mises–Fisher target and an observable depending only on `r`:
/// `∫ f(r) e^{λ cos r} sin r dr / ∫ e^{λ cos r} sin r dr` over `[0, π]`.
pub fn sphere_reference_integral(
    lambda: f64,
    f: impl Fn(f64) -> f64,
    res: QuadratureResolution,
) -> f64 {
    let (nodes, weights) = composite_gauss_legendre(
        res.sphere_panels,
        res.sphere_nodes_per_panel,
        0.0,
        std::f64::consts::PI,
    );
    let dens: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&r, &w)| w * (lambda * r.cos()).exp() * r.sin())
        .collect();
    let num: Vec<f64> = nodes.iter().zip(&dens).map(|(&r, &d)| d * f(r)).collect();
    pairwise_sum(&num) / pairwise_sum(&dens)
}

/// `μ_φ(f)` for an SPD target and a spectral observable `f(λ₁, λ₂, λ₃)` of
/// the log-eigenvalues.
///
/// The eigenvalue density `e^{−φ} Π_{i<j} sinh(|λᵢ − λⱼ|/2)` is symmetric
/// under permutations, so the integral is taken over the ordered wedge
/// `λ₃ = a, λ₂ = a + u, λ₁ = a + u + v` with `u, v ≥ 0`, where the density
/// is smooth. Normalizing constants cancel in the ratio.
pub fn spd_reference_integral(
    spec: &PotentialSpec,
    f: impl Fn(&[f64; 3]) -> f64,
    res: QuadratureResolution,
) -> Result<f64> {
    let half_width = match *spec {
        PotentialSpec::RiemannianGaussian { sigma } => (2.0 * sigma * sigma + 7.0 * sigma).max(4.0),
        PotentialSpec::DoubleWell => 5.0,
        PotentialSpec::VonMisesFisher { .. } => {
            return Err(Error::InvalidConfig("vmf is a sphere potential".into()))
        }
    };
    let n = res.spd_nodes;
    let (a_nodes, a_w) = gauss_legendre_on(n, -half_width, half_width);
    let (g_nodes, g_w) = gauss_legendre_on(n, 0.0, 2.0 * half_width);
    let sinh_half: Vec<f64> = g_nodes.iter().map(|g| (0.5 * g).sinh()).collect();

    let mut num_slabs = Vec::with_capacity(n);
    let mut den_slabs = Vec::with_capacity(n);
    let mut num_row = vec![0.0; n * n];
    let mut den_row = vec![0.0; n * n];
    for (ia, &a) in a_nodes.iter().enumerate() {
        for iu in 0..n {
            let u = g_nodes[iu];
            for iv in 0..n {
                let v = g_nodes[iv];
                let l = [a + u + v, a + u, a];
                let rho_sq = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
                let w = a_w[ia]
                    * g_w[iu]
                    * g_w[iv]
                    * sinh_half[iu]
                    * sinh_half[iv]
                    * (0.5 * (u + v)).sinh()
                    * (-spec.spd_phi(rho_sq)).exp();
                den_row[iu * n + iv] = w;
                num_row[iu * n + iv] = w * f(&l);
            }
        }
        num_slabs.push(pairwise_sum(&num_row));
        den_slabs.push(pairwise_sum(&den_row));
    }
    Ok(pairwise_sum(&num_slabs) / pairwise_sum(&den_slabs))
}

/// Exact expectation `μ_φ(f)` of a supported observable under the target.
pub fn reference_value(spec: &PotentialSpec, obs: &Observable) -> Result<f64> {
    reference_value_with(spec, obs, QuadratureResolution::default())
}

pub fn reference_value_with(
    spec: &PotentialSpec,
    obs: &Observable,
    res: QuadratureResolution,
) -> Result<f64> {
    spec.validate()?;
    let unsupported = || Error::Unsupported {
        target: spec.to_string(),
        observable: obs.name().into(),
    };
    match (spec, obs) {
        (PotentialSpec::VonMisesFisher { lambda }, Observable::SinR) => {
            Ok(sphere_reference_integral(*lambda, f64::sin, res))
        }
        (PotentialSpec::VonMisesFisher { .. }, _) => Err(unsupported()),
        (_, Observable::Det) => {
            spd_reference_integral(spec, |l| (l[0] + l[1] + l[2]).exp(), res)
        }
        (_, Observable::InvOnePlusTrace) => spd_reference_integral(
            spec,
            |l| 1.0 / (1.0 + l[0].exp() + l[1].exp() + l[2].exp()),
            res,
        ),
        _ => Err(unsupported()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::sphere::{sphere_pushforward, sphere_transition};
    use crate::symmat::{mat_exp, HalfVec, SpdMatrix};
    use std::f64::consts::{E, FRAC_PI_2, PI};

    /// `I_ν(x)` by its power series.
    fn bessel_i(nu: f64, x: f64) -> f64 {
        let mut term = (0.5 * x).powf(nu) / gamma(nu + 1.0);
        let mut sum = term;
        for k in 1..60 {
            let k = k as f64;
            term *= (0.25 * x * x) / (k * (k + nu));
            sum += term;
        }
        sum
    }

    fn gamma(x: f64) -> f64 {
        // only needed at 1, 3/2, 2, 5/2 …
        match x {
            v if (v - 1.0).abs() < 1e-12 || (v - 2.0).abs() < 1e-12 => 1.0,
            v if (v - 1.5).abs() < 1e-12 => 0.5 * PI.sqrt(),
            v if (v - 2.5).abs() < 1e-12 => 0.75 * PI.sqrt(),
            v => panic!("gamma({v}) not tabulated"),
        }
    }

    #[test]
    fn vmf_reference_matches_bessel_closed_form() {
        let closed = 2f64.sqrt() * bessel_i(1.0, 1.0) * gamma(1.5) / bessel_i(0.5, 1.0);
        let q = reference_value(&PotentialSpec::VonMisesFisher { lambda: 1.0 }, &Observable::SinR).unwrap();
        assert!((q - closed).abs() < 1e-12, "{q} vs {closed}");
        assert!((q - 0.7554024361).abs() < 1e-6);
    }

    #[test]
    fn vmf_normalization() {
        let one = sphere_reference_integral(2.5, |_| 1.0, QuadratureResolution::default());
        assert!((one - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spd_references_match_published_values() {
        let rg = PotentialSpec::RiemannianGaussian { sigma: 0.5f64.sqrt() };
        let v = reference_value(&rg, &Observable::Det).unwrap();
        assert!((v - 2.11699998).abs() < 1e-5, "{v}");
        let v = reference_value(&PotentialSpec::DoubleWell, &Observable::InvOnePlusTrace).unwrap();
        assert!((v - 0.2204801571878534).abs() < 1e-6, "{v}");
    }

    #[test]
    fn references_are_resolution_independent() {
        let cases = [
            (PotentialSpec::VonMisesFisher { lambda: 1.0 }, Observable::SinR),
            (PotentialSpec::RiemannianGaussian { sigma: 0.5f64.sqrt() }, Observable::Det),
            (PotentialSpec::DoubleWell, Observable::InvOnePlusTrace),
        ];
        let base = QuadratureResolution::default();
        for (spec, obs) in cases {
            let a = reference_value_with(&spec, &obs, base).unwrap();
            let b = reference_value_with(&spec, &obs, base.doubled()).unwrap();
            assert!((a - b).abs() < 1e-7, "{spec}: {a} vs {b}");
        }
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        let vmf = PotentialSpec::VonMisesFisher { lambda: 1.0 };
        assert!(matches!(reference_value(&vmf, &Observable::Det), Err(Error::Unsupported { .. })));
        let custom = Observable::custom("one", |_| 1.0);
        assert!(matches!(
            reference_value(&PotentialSpec::DoubleWell, &custom),
            Err(Error::Unsupported { .. })
        ));
        assert!(reference_value(&PotentialSpec::RiemannianGaussian { sigma: -1.0 }, &Observable::Det).is_err());
    }

    #[test]
    fn vmf_drift_examples() {
        let h = 0.04;
        let d = vmf_drift_tangent(&SpherePoint::new(Chart::One, FRAC_PI_2, 1.0), 1.0, h).unwrap();
        assert_eq!(d.0, [-0.5 * h.sqrt(), 0.0]);
        let d = vmf_drift_tangent(&SpherePoint::new(Chart::Two, FRAC_PI_2, FRAC_PI_2), 1.0, h).unwrap();
        assert!(d.0[0].abs() < 1e-16 && d.0[1].abs() < 1e-16);
        let cap = SpherePoint::new(Chart::One, 0.2, 1.0);
        assert!(matches!(vmf_drift_tangent(&cap, 1.0, h), Err(Error::ChartDomain { .. })));
    }

    /// Central-difference pushforward through the embedding, Richardson-refined.
    fn fd_pushforward(p: &SpherePoint, v: &TangentCoords<2>) -> [f64; 3] {
        let diff = |eps: f64| -> [f64; 3] {
            let fwd = sphere_embed(&SpherePoint { r: p.r + eps * v.0[0], theta: p.theta + eps * v.0[1], ..*p });
            let bwd = sphere_embed(&SpherePoint { r: p.r - eps * v.0[0], theta: p.theta - eps * v.0[1], ..*p });
            std::array::from_fn(|i| (fwd[i] - bwd[i]) / (2.0 * eps))
        };
        let (d1, d2) = (diff(1e-3), diff(5e-4));
        std::array::from_fn(|i| (4.0 * d2[i] - d1[i]) / 3.0)
    }

    #[test]
    fn drifts_agree_across_charts() {
        let lambda = 1.7;
        let h = 0.09;
        for &(r, th) in &[(1.0, 0.3), (1.4, 2.0), (2.2, 4.0), (0.9, 5.5)] {
            let p1 = SpherePoint::new(Chart::One, r, th);
            let p2 = sphere_transition(&p1);
            if !p2.in_band() {
                continue;
            }
            let a = fd_pushforward(&p1, &vmf_drift_tangent(&p1, lambda, h).unwrap());
            let b = fd_pushforward(&p2, &vmf_drift_tangent(&p2, lambda, h).unwrap());
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-10, "({r},{th}) comp {i}: {} vs {}", a[i], b[i]);
            }
            // and the analytic pushforward agrees with the finite differences
            let c = sphere_pushforward(&p2, &vmf_drift_tangent(&p2, lambda, h).unwrap());
            for i in 0..3 {
                assert!((b[i] - c[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spd_drift_examples() {
        let h = 0.1;
        let rg = PotentialSpec::RiemannianGaussian { sigma: 1.0 };
        for spec in [rg, PotentialSpec::DoubleWell] {
            assert_eq!(spd_drift_matrix(&SpdPoint::identity(), &spec, h).unwrap(), Sym3::zeros());
        }
        let x = SpdMatrix::new(Sym3::from_diag([E, 1.0, 1.0])).unwrap();
        let d = spd_drift_matrix(&x, &rg, h).unwrap();
        assert!(d.sub(&Sym3::from_diag([-0.5 * h, 0.0, 0.0])).frobenius_norm() < 1e-15);

        // ρ(X, I) = 1/√2 zeroes the double-well factor
        let s = crate::symmat::hvec_inv(&HalfVec([0.3, -0.1, 0.2, 0.4, -0.2, 0.1]));
        let s = s.scale(0.5f64.sqrt() / s.frobenius_norm());
        let x = mat_exp(&s).unwrap();
        let d = spd_drift_matrix(&x, &PotentialSpec::DoubleWell, h).unwrap();
        assert!(d.frobenius_norm() < 1e-14);
    }

    #[test]
    fn observables_evaluate() {
        let p = SpherePoint::new(Chart::One, 1.0, 0.4);
        let q = sphere_transition(&p);
        let a = Observable::SinR.eval(&Point::Sphere(p)).unwrap();
        let b = Observable::SinR.eval(&Point::Sphere(q)).unwrap();
        assert!((a - 1f64.sin()).abs() < 1e-15 && (a - b).abs() < 1e-14);
        let x = SpdMatrix::new(Sym3::from_diag([2.0, 3.0, 4.0])).unwrap();
        assert_eq!(Observable::Det.eval(&Point::Spd(x)).unwrap(), 24.0);
        assert_eq!(Observable::InvOnePlusTrace.eval(&Point::Spd(x)).unwrap(), 0.1);
        assert!(Observable::Det.eval(&Point::Sphere(p)).is_err());
    }
}
