//! Noise increments `ξ` for the Langevin chains.
//!
//! Any distribution with independent components of mean 0, variance 1,
//! vanishing third moment and finite fourth moment gives a first-order
//! weak scheme. Three are offered: Rademacher `±1`, standard Gaussian, and
//! `√q` times a uniform point on the unit sphere of `ℝ^q` (the walk-on-sphere
//! variant, whose components are uncorrelated rather than independent).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Rademacher,
    Gaussian,
    ScaledSphereUniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub dim: usize,
}

/// Per-trajectory random stream.
///
/// Every trajectory gets its own ChaCha8 stream selected by `stream_id`
/// under a shared key derived from `seed`, so streams never overlap.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, dim: usize) -> Self {
        Self { kind, dim }
    }

    /// Fills `out[..dim]` with one increment.
    pub fn draw_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        let out = &mut out[..self.dim];
        match self.kind {
            NoiseKind::Rademacher => {
                let mut bits = rng.rng().next_u64();
                for (i, v) in out.iter_mut().enumerate() {
                    if i > 0 && i % 64 == 0 {
                        bits = rng.rng().next_u64();
                    }
                    *v = if bits & 1 == 1 { 1.0 } else { -1.0 };
                    bits >>= 1;
                }
            }
            NoiseKind::Gaussian => {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng.rng());
                }
            }
            NoiseKind::ScaledSphereUniform => loop {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng.rng());
                }
                let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    let k = (self.dim as f64).sqrt() / norm;
                    out.iter_mut().for_each(|v| *v *= k);
                    break;
                }
            },
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.draw_into(rng, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(spec: NoiseSpec, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
        let mut rng = RngStream::new(7, 3);
        let q = spec.dim;
        let (mut m1, mut m2, mut m4) = (vec![0.0; q], vec![0.0; q], vec![0.0; q]);
        let mut cross = vec![vec![0.0; q]; q];
        let mut buf = vec![0.0; q];
        for _ in 0..n {
            spec.draw_into(&mut rng, &mut buf);
            for i in 0..q {
                m1[i] += buf[i];
                m2[i] += buf[i] * buf[i];
                m4[i] += buf[i].powi(4);
                for j in 0..q {
                    cross[i][j] += buf[i] * buf[j];
                }
            }
        }
        let nf = n as f64;
        let scale = |v: Vec<f64>| v.into_iter().map(|x| x / nf).collect::<Vec<_>>();
        (scale(m1), scale(m2), scale(m4), cross.into_iter().map(scale).collect())
    }

    #[test]
    fn rademacher_moments() {
        let (m1, m2, m4, _) = moments(NoiseSpec::new(NoiseKind::Rademacher, 6), 1_000_000);
        for i in 0..6 {
            assert!(m1[i].abs() < 0.004);
            assert_eq!(m2[i], 1.0);
            assert_eq!(m4[i], 1.0);
        }
    }

    #[test]
    fn sphere_uniform_is_isotropic_with_fixed_norm() {
        let spec = NoiseSpec::new(NoiseKind::ScaledSphereUniform, 6);
        let mut rng = RngStream::new(1, 0);
        for _ in 0..1000 {
            let v = spec.draw(&mut rng);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 6f64.sqrt()).abs() < 1e-14);
        }
        let (_, _, _, cross) = moments(spec, 1_000_000);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((cross[i][j] - want).abs() < 0.01, "E[ξ{i}ξ{j}] = {}", cross[i][j]);
            }
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let spec = NoiseSpec::new(NoiseKind::Gaussian, 2);
        let draw_seq = |seed, id| {
            let mut r = RngStream::new(seed, id);
            (0..100).flat_map(|_| spec.draw(&mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw_seq(42, 5), draw_seq(42, 5));
        assert_ne!(draw_seq(42, 5), draw_seq(42, 6));
        assert_ne!(draw_seq(42, 5), draw_seq(43, 5));
    }
}
