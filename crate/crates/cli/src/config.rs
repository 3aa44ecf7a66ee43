//! Experiment configuration.
//!
//! Configuration files hold one `key = value` pair per line; `#` starts a
//! comment. Settings are layered: preset, then config file, then the
//! `RLMC_SEED` environment variable, then command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use rlmc_core::{
    hvec_inv, Chart, HalfVec, ManifoldKind, NoiseKind, Observable, Point, PotentialSpec, SamplerConfig, Scheme,
    SpdMatrix, SpherePoint,
};

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "RLMC_SEED";

const KEYS: &[&str] = &[
    "name", "target", "lambda", "sigma", "obs", "scheme", "noise", "h", "T", "L", "seed", "R", "burn_in", "x0",
    "output", "workers",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = match key {
        "observable" => "obs",
        "horizon" => "T",
        "trajectories" => "L",
        "rejection_radius" => "R",
        "h_list" => "h",
        other => other,
    };
    KEYS.iter().copied().find(|k| *k == key)
}

/// Unparsed settings, keyed by canonical name. Later layers overwrite
/// earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<&'static str, String>,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut out = Self::default();
        for (i, line) in text.lines().enumerate() {
            let err = |msg: String| CliError::Config {
                path: origin.to_string(),
                line: i + 1,
                msg,
            };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = canonical_key(k.trim()).ok_or_else(|| err(format!("unknown key `{}`", k.trim())))?;
            if out.entries.insert(key, v.trim().to_string()).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let k = canonical_key(key).ok_or_else(|| CliError::Usage(format!("unknown key `{key}`")))?;
        self.entries.insert(k, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        canonical_key(key).and_then(|k| self.entries.get(k)).map(String::as_str)
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: RawConfig) {
        self.entries.extend(other.entries);
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub potential: PotentialSpec,
    pub observable: Observable,
    pub scheme: Scheme,
    pub noise: NoiseKind,
    pub h_list: Vec<f64>,
    pub horizon: Option<f64>,
    /// Ensemble size `L`.
    pub trajectories: usize,
    pub seed: u64,
    pub rejection_radius: Option<f64>,
    pub burn_in: usize,
    pub initial: Point,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn value_err(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Value {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| value_err(key, format!("`{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(value_err(key, "must be finite"))
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64(key, s)).collect()
}

/// Counts may be written in exponent form (`1e5`).
fn parse_count(key: &str, v: &str) -> Result<u64> {
    if let Ok(n) = v.trim().parse::<u64>() {
        return Ok(n);
    }
    let x = parse_f64(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63) {
        Ok(x as u64)
    } else {
        Err(value_err(key, format!("`{v}` is not a nonnegative integer")))
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let get = |k: &str| raw.get(k);
        let target = get("target").ok_or_else(|| CliError::Usage("no target given (vmf, rgauss or dwell)".into()))?;
        let potential = match target {
            "vmf" => PotentialSpec::VonMisesFisher {
                lambda: get("lambda").map(|v| parse_f64("lambda", v)).transpose()?.unwrap_or(1.0),
            },
            "rgauss" => PotentialSpec::RiemannianGaussian {
                sigma: parse_f64("sigma", get("sigma").ok_or_else(|| value_err("sigma", "required for rgauss"))?)?,
            },
            "dwell" => PotentialSpec::DoubleWell,
            other => return Err(value_err("target", format!("unknown target `{other}`"))),
        };
        potential.validate()?;
        let manifold = potential.manifold();

        let observable = match get("obs") {
            None => match potential {
                PotentialSpec::VonMisesFisher { .. } => Observable::SinR,
                PotentialSpec::RiemannianGaussian { .. } => Observable::Det,
                PotentialSpec::DoubleWell => Observable::InvOnePlusTrace,
            },
            Some("sin_r") => Observable::SinR,
            Some("det") => Observable::Det,
            Some("inv1ptr") => Observable::InvOnePlusTrace,
            Some(other) => return Err(value_err("obs", format!("unknown observable `{other}`"))),
        };
        if observable.manifold() != Some(manifold) {
            return Err(rlmc_core::Error::Unsupported {
                target: potential.to_string(),
                observable: observable.name().to_string(),
            }
            .into());
        }

        let scheme = match (get("scheme"), manifold) {
            (None, ManifoldKind::Sphere2) => Scheme::RetractionEuler,
            (None, ManifoldKind::Spd3) => Scheme::ExpEuler,
            (Some("exp"), _) => Scheme::ExpEuler,
            (Some("retraction"), _) => Scheme::RetractionEuler,
            (Some("splitting"), _) => Scheme::Splitting,
            (Some(other), _) => return Err(value_err("scheme", format!("unknown scheme `{other}`"))),
        };
        let noise = match get("noise").unwrap_or("rademacher") {
            "rademacher" => NoiseKind::Rademacher,
            "gaussian" => NoiseKind::Gaussian,
            "sphere" => NoiseKind::ScaledSphereUniform,
            other => return Err(value_err("noise", format!("unknown noise `{other}`"))),
        };

        let h_list = get("h").map(|v| parse_list("h", v)).transpose()?.unwrap_or_default();
        if let Some(h) = h_list.iter().find(|h| **h <= 0.0) {
            return Err(value_err("h", format!("step sizes must be positive, got {h}")));
        }
        let horizon = get("T").map(|v| parse_f64("T", v)).transpose()?;
        let trajectories = get("L").map(|v| parse_count("L", v)).transpose()?.unwrap_or(10_000) as usize;
        if trajectories < 2 {
            return Err(value_err("L", "need at least 2 trajectories"));
        }
        let seed = get("seed").map(|v| parse_count("seed", v)).transpose()?.unwrap_or(1);
        let rejection_radius = match get("R") {
            None | Some("none") => None,
            Some(v) => {
                let r = parse_f64("R", v)?;
                if r < 0.0 {
                    return Err(value_err("R", "must be nonnegative"));
                }
                Some(r)
            }
        };
        let burn_in = get("burn_in").map(|v| parse_count("burn_in", v)).transpose()?.unwrap_or(0) as usize;
        let initial = match get("x0") {
            None => default_initial(manifold),
            Some(v) => parse_initial(manifold, &parse_list("x0", v)?)?,
        };
        let workers = get("workers").map(|v| parse_count("workers", v)).transpose()?.map(|w| w as usize);
        if workers == Some(0) {
            return Err(value_err("workers", "must be at least 1"));
        }

        Ok(Self {
            name: get("name").unwrap_or("experiment").to_string(),
            potential,
            observable,
            scheme,
            noise,
            h_list,
            horizon,
            trajectories,
            seed,
            rejection_radius,
            burn_in,
            initial,
            output: get("output").map(PathBuf::from),
            workers,
        })
    }

    /// Sampler settings for step size `h`.
    pub fn sampler(&self, h: f64) -> Result<SamplerConfig> {
        let horizon = self.horizon.ok_or_else(|| value_err("T", "a time horizon is required for sampling"))?;
        let cfg = SamplerConfig {
            potential: self.potential,
            scheme: self.scheme,
            noise: self.noise,
            h,
            horizon,
            rejection_radius: self.rejection_radius,
            initial: self.initial,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything a sampling command needs, for every `h` in the list.
    pub fn validate_sampling(&self) -> Result<()> {
        if self.h_list.is_empty() {
            return Err(value_err("h", "h_list is empty"));
        }
        for &h in &self.h_list {
            self.sampler(h)?;
        }
        Ok(())
    }
}

fn default_initial(m: ManifoldKind) -> Point {
    match m {
        ManifoldKind::Sphere2 => Point::Sphere(SpherePoint::new(Chart::One, FRAC_PI_4, FRAC_PI_4)),
        ManifoldKind::Spd3 => parse_initial(m, &[2.0, 4.0, 2.0, 1.0, 1.0, 0.0]).expect("default start is SPD"),
    }
}

/// `x0 = r, θ` (chart 1) on the sphere, or the six half-vectorization
/// entries on the SPD cone.
fn parse_initial(m: ManifoldKind, v: &[f64]) -> Result<Point> {
    match (m, v) {
        (ManifoldKind::Sphere2, &[r, theta]) => {
            if r > 0.0 && r < std::f64::consts::PI {
                Ok(Point::Sphere(SpherePoint::new(Chart::One, r, theta)))
            } else {
                Err(value_err("x0", format!("r = {r} outside (0, π)")))
            }
        }
        (ManifoldKind::Spd3, v) if v.len() == 6 => {
            let h: [f64; 6] = v.try_into().expect("length checked");
            SpdMatrix::new(hvec_inv(&HalfVec(h)))
                .map(Point::Spd)
                .map_err(|e| value_err("x0", e.to_string()))
        }
        (ManifoldKind::Sphere2, _) => Err(value_err("x0", "expected `r, theta`")),
        (ManifoldKind::Spd3, _) => Err(value_err("x0", "expected six half-vectorization entries")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(&RawConfig::parse(text, "test")?)
    }

    #[test]
    fn parses_comments_and_lists() {
        let c = cfg("# vmf run\ntarget = vmf  # inline\nh = 0.2, 0.1,0.05\nT = 5\nL = 1e5\n").unwrap();
        assert_eq!(c.h_list, vec![0.2, 0.1, 0.05]);
        assert_eq!(c.trajectories, 100_000);
        assert_eq!(c.scheme, Scheme::RetractionEuler);
        assert!(matches!(c.observable, Observable::SinR));
        assert!(c.validate_sampling().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(cfg("target vmf"), Err(CliError::Config { line: 1, .. })));
        assert!(matches!(cfg("target = vmf\nbogus = 1"), Err(CliError::Config { line: 2, .. })));
        assert!(matches!(cfg("target = vmf\ntarget = dwell"), Err(CliError::Config { .. })));
        assert!(cfg("target = rgauss").is_err());
        assert!(cfg("target = vmf\nobs = det").is_err());
        assert!(cfg("target = dwell\nx0 = 1, 0, 0, 2, 0, 0").is_err());
        assert!(cfg("target = vmf\nL = 1").is_err());
        let empty = cfg("target = vmf\nT = 5").unwrap();
        assert!(matches!(empty.validate_sampling(), Err(CliError::Value { .. })));
        let uneven = cfg("target = vmf\nT = 5\nh = 0.3").unwrap();
        assert!(uneven.validate_sampling().is_err());
    }

    #[test]
    fn later_layers_win() {
        let mut raw = RawConfig::parse("target = vmf\nseed = 3", "a").unwrap();
        raw.merge(RawConfig::parse("seed = 4", "b").unwrap());
        assert_eq!(raw.get("seed"), Some("4"));
        raw.set("trajectories", "50").unwrap();
        assert_eq!(raw.get("L"), Some("50"));
        assert!(raw.set("nope", "1").is_err());
    }

    #[test]
    fn spd_defaults() {
        let c = cfg("target = rgauss\nsigma = 0.5\nT = 1\nh = 0.1\nR = 2.7").unwrap();
        assert_eq!(c.scheme, Scheme::ExpEuler);
        assert_eq!(c.rejection_radius, Some(2.7));
        let Point::Spd(x) = c.initial else { panic!() };
        assert_eq!(x.as_sym().get(1, 1), 4.0);
        assert_eq!(x.as_sym().get(0, 1), 1.0);
    }
}
