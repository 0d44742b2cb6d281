//! Shared inputs for the benchmarks.

use translator_core::sampling;
use translator_core::{CurvatureVector, SpeedSpec};

/// Speeds exercised by the evaluation benchmarks, labelled.
pub fn speeds(n: usize) -> Vec<(String, SpeedSpec)> {
    let mut out = Vec::new();
    for k in 1..=n {
        let s = SpeedSpec::sigma_k_root(k, n).expect("valid k");
        out.push((s.label(), s));
    }
    if n >= 2 {
        out.push(("harmonic".into(), SpeedSpec::harmonic_pairs(n).expect("valid n")));
    }
    out
}

/// `count` unit vectors from the positive orthant, which lies in every cone used here.
pub fn positive_points(n: usize, count: usize, seed: u64) -> Vec<CurvatureVector> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let v: Vec<f64> = sampling::unit_vector(&mut rng, n).into_iter().map(|x| x.abs() + 1e-3).collect();
            let norm = sampling::norm(&v);
            CurvatureVector::new(v.into_iter().map(|x| x / norm).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_inside_every_cone() {
        for n in 2..=5 {
            for (_, spec) in speeds(n) {
                for p in positive_points(n, 20, 1) {
                    assert!(spec.in_domain(&p));
                }
            }
        }
    }
}
