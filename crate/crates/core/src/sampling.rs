//! Seeded pseudo-random sampling shared by the property suite, cone
//! separation and pinching estimates.
//!
//! All generators are `ChaCha8Rng` seeded from a `u64`, so every sampled
//! report is reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal variate by the Box-Muller transform.
pub fn normal(rng: &mut SampleRng) -> f64 {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Uniformly distributed point on the unit sphere in R^n.
pub fn unit_vector(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random symmetric n x n matrix with independent standard normal entries
/// on and above the diagonal.
pub fn symmetric_matrix(rng: &mut SampleRng, n: usize) -> nalgebra::DMatrix<f64> {
    let mut t = nalgebra::DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let x = normal(rng);
            t[(a, b)] = x;
            t[(b, a)] = x;
        }
    }
    t
}

pub fn permutation(rng: &mut SampleRng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
