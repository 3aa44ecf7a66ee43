use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlmc_core::manifold::{spd_dist, sphere_embed};
use rlmc_core::sampler::{step_exp_spd, step_retraction_sphere, step_splitting};
use rlmc_core::symmat::sym_eig;
use rlmc_core::{hvec_inv, Chart, HalfVec, Point, PotentialSpec, SpdMatrix, SpdPoint, SpherePoint};
use std::f64::consts::PI;

const STEPS: usize = 100_000;

fn x0() -> SpdPoint {
    SpdMatrix::new(hvec_inv(&HalfVec([2.0, 4.0, 2.0, 1.0, 1.0, 0.0]))).unwrap()
}

fn random_xi<const Q: usize>(rng: &mut ChaCha8Rng) -> [f64; Q] {
    std::array::from_fn(|_| rng.random_range(-2.0..2.0))
}

#[test]
fn spd_chain_stays_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for spec in [PotentialSpec::RiemannianGaussian { sigma: 0.5f64.sqrt() }, PotentialSpec::DoubleWell] {
        let mut x = x0();
        for n in 0..STEPS {
            let h = rng.random_range(0.01..0.2);
            x = step_exp_spd(&x, &spec, h, &random_xi(&mut rng)).unwrap();
            let e = sym_eig(x.as_sym()).unwrap();
            assert!(e.min() > 0.0, "step {n}: min eigenvalue {}", e.min());
            assert!(SpdMatrix::new(x.into_sym()).is_ok(), "step {n}");
            // restart far excursions so the walk samples a bounded region
            if spd_dist(&x, &SpdPoint::identity()).unwrap() > 8.0 {
                x = x0();
            }
        }
    }
}

#[test]
fn spd_splitting_stays_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let spec = PotentialSpec::RiemannianGaussian { sigma: 0.5f64.sqrt() };
    let mut p = Point::Spd(x0());
    for _ in 0..STEPS / 10 {
        p = step_splitting(&p, &spec, 0.1, &random_xi::<6>(&mut rng)).unwrap();
        let Point::Spd(x) = p else { unreachable!() };
        assert!(sym_eig(x.as_sym()).unwrap().min() > 0.0);
    }
}

#[test]
fn sphere_chain_stays_on_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut p = SpherePoint::new(Chart::One, PI / 4.0, PI / 4.0);
    for n in 0..STEPS {
        let h = rng.random_range(0.01..0.2);
        p = step_retraction_sphere(&p, 1.0, h, &random_xi(&mut rng)).unwrap();
        assert!(p.r > 0.0 && p.r < PI, "step {n}: r = {}", p.r);
        assert!((0.0..2.0 * PI).contains(&p.theta), "step {n}: θ = {}", p.theta);
        let e = sphere_embed(&p);
        let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        assert!((norm - 1.0).abs() < 1e-14);
    }
}
