#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::prob::{Channel, Distribution, JointXZ};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the simplex (flat Dirichlet).
pub fn random_distribution<R: Rng>(rng: &mut R, size: usize) -> Distribution {
    let weights: Vec<f64> = (0..size)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    Distribution::normalized(weights).unwrap()
}

pub fn random_channel<R: Rng>(rng: &mut R, inputs: usize, outputs: usize) -> Channel {
    Channel::from_rows(
        (0..inputs)
            .map(|_| random_distribution(rng, outputs))
            .collect(),
    )
    .unwrap()
}

pub fn random_joint<R: Rng>(rng: &mut R, inputs: usize, outputs: usize) -> JointXZ {
    JointXZ::new(
        random_distribution(rng, inputs),
        random_channel(rng, inputs, outputs),
    )
    .unwrap()
}

pub fn bsc_joint(crossover: f64) -> JointXZ {
    JointXZ::new(Distribution::uniform(2), Channel::bsc(crossover).unwrap()).unwrap()
}

pub fn independent_joint() -> JointXZ {
    let px = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
    let row = Distribution::new(vec![0.6, 0.4]).unwrap();
    JointXZ::new(px, Channel::constant(3, row)).unwrap()
}

/// Max of `f` over an evenly spaced grid on `[lo, hi]`; returns (arg, value).
pub fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let steps = ((hi - lo) / step).round() as usize;
    (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .map(|x| (x, f(x)))
        .fold(
            (lo, f64::NEG_INFINITY),
            |best, c| if c.1 > best.1 { c } else { best },
        )
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: {actual} vs {expected} (tol {tol})"
    );
}
