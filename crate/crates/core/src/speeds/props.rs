//! Sampled checks of the structural properties a flow speed must have:
//! symmetry, positivity, monotonicity, 1-homogeneity, concavity off the
//! radial direction and vanishing at the boundary of its cone.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{eval_derivatives, eval_speed, CurvatureVector, SpeedSpec};
use crate::error::{Error, Result};
use crate::sampling::{self, SampleRng};

const EULER_TOL: f64 = 1e-9;
const HOMOGENEITY_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;
const CONCAVITY_TOL: f64 = 1e-8;
const RADIAL_TOL: f64 = 1e-10;
const VANISHING_FRACTION: f64 = 1e-3;
const MAX_REJECTIONS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub tolerance: f64,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed violation measure (meaning depends on the property).
    pub worst: f64,
    /// First failing sample, normalised to unit length.
    pub witness: Option<Vec<f64>>,
}

impl PropertyOutcome {
    fn new(name: &str, tolerance: f64) -> Self {
        PropertyOutcome { name: name.to_string(), tolerance, passed: 0, failed: 0, worst: 0.0, witness: None }
    }

    fn record(&mut self, ok: bool, measure: f64, sample: &[f64]) {
        if measure.is_nan() || measure > self.worst {
            self.worst = measure;
        }
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(sample.to_vec());
            }
        }
    }

    pub fn satisfied(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub speed: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub outcomes: Vec<PropertyOutcome>,
}

impl PropertyReport {
    pub fn outcome(&self, name: &str) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.outcomes.iter().filter(|o| !o.satisfied()).map(|o| o.name.as_str()).collect()
    }
}

/// Draws a unit vector inside the open cone of `spec` by rejection.
pub(crate) fn sample_interior(spec: &SpeedSpec, rng: &mut SampleRng) -> Result<CurvatureVector> {
    for _ in 0..MAX_REJECTIONS {
        let v = CurvatureVector::new(sampling::unit_vector(rng, spec.n()));
        if spec.in_domain(&v) {
            return Ok(v);
        }
    }
    Err(Error::EmptyCone { samples: MAX_REJECTIONS, what: format!("the cone of {}", spec.label()) })
}

/// Runs the sampled property suite on `sample_count` unit vectors drawn from
/// the interior of the speed's cone.
pub fn check_properties(spec: &SpeedSpec, sample_count: usize, seed: u64) -> Result<PropertyReport> {
    if sample_count == 0 {
        return Err(Error::Parameter("sample_count must be at least 1".into()));
    }
    let n = spec.n();
    let mut rng = sampling::rng(seed);
    let mut symmetry = PropertyOutcome::new("symmetry", 0.0);
    let mut positivity = PropertyOutcome::new("positivity", 0.0);
    let mut monotone = PropertyOutcome::new("gradient_positivity", 0.0);
    let mut euler = PropertyOutcome::new("euler_relation", EULER_TOL);
    let mut homogeneity = PropertyOutcome::new("homogeneity", HOMOGENEITY_TOL);
    let mut fd = PropertyOutcome::new("gradient_finite_difference", FD_TOL);
    let mut concavity = PropertyOutcome::new("off_radial_concavity", CONCAVITY_TOL);
    let mut vanishing = PropertyOutcome::new("boundary_vanishing", VANISHING_FRACTION);

    for _ in 0..sample_count {
        let lam = sample_interior(spec, &mut rng)?;
        let x = lam.as_slice();
        let value = eval_speed(spec, &lam)?;

        let perm = sampling::permutation(&mut rng, n);
        let permuted = CurvatureVector::new(perm.iter().map(|&i| x[i]).collect());
        let pv = eval_speed(spec, &permuted)?;
        symmetry.record(pv == value, (pv - value).abs(), x);

        positivity.record(value > 0.0, if value > 0.0 { 0.0 } else { -value }, x);

        let d = eval_derivatives(spec, &lam)?;
        let gmin = d.gradient.min();
        monotone.record(gmin > 0.0, if gmin > 0.0 { 0.0 } else { -gmin }, x);

        let e: f64 = x.iter().zip(d.gradient.iter()).map(|(l, g)| l * g).sum();
        let rel = (e - value).abs() / value.abs();
        euler.record(rel <= EULER_TOL, rel, x);

        let mut worst_h: f64 = 0.0;
        for c in [0.5, 2.0, 10.0] {
            let sv = eval_speed(spec, &lam.scaled(c))?;
            worst_h = worst_h.max((sv - c * value).abs() / (c * value));
        }
        homogeneity.record(worst_h <= HOMOGENEITY_TOL, worst_h, x);

        let rel_fd = finite_difference_gap(spec, x, &d.gradient)?;
        fd.record(rel_fd <= FD_TOL, rel_fd, x);

        let (off_radial, radial) = concavity_measures(x, &d.hessian);
        concavity.record(off_radial <= CONCAVITY_TOL && radial <= RADIAL_TOL, off_radial.max(radial), x);

        let v = boundary_decay(spec, &lam, value, &d.gradient, &mut rng)?;
        vanishing.record(v.monotone && v.ratio < VANISHING_FRACTION, v.ratio, x);
    }

    Ok(PropertyReport {
        speed: spec.label(),
        n,
        samples: sample_count,
        seed,
        outcomes: vec![symmetry, positivity, monotone, euler, homogeneity, fd, concavity, vanishing],
    })
}

/// Relative sup-norm gap between the analytic gradient and central differences,
/// Richardson-extrapolated from steps `h` and `h/2` so that samples close to the
/// cone boundary are not dominated by truncation error.
fn finite_difference_gap(spec: &SpeedSpec, x: &[f64], grad: &DVector<f64>) -> Result<f64> {
    let h = FD_STEP * sampling::norm(x);
    let central = |a: usize, h: f64| -> Result<f64> {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[a] += h;
        minus[a] -= h;
        let fp = eval_speed(spec, &CurvatureVector::new(plus))?;
        let fm = eval_speed(spec, &CurvatureVector::new(minus))?;
        Ok((fp - fm) / (2.0 * h))
    };
    let mut gap: f64 = 0.0;
    for a in 0..x.len() {
        let d = (4.0 * central(a, 0.5 * h)? - central(a, h)?) / 3.0;
        gap = gap.max((d - grad[a]).abs());
    }
    Ok(gap / grad.amax())
}

/// Largest eigenvalue of the Hessian compressed to the orthogonal complement
/// of `lambda`, and the magnitude of the radial quadratic form.
fn concavity_measures(x: &[f64], hess: &DMatrix<f64>) -> (f64, f64) {
    let n = x.len();
    let u = DVector::from_column_slice(x).normalize();
    let p = DMatrix::identity(n, n) - &u * u.transpose();
    let compressed = &p * hess * &p;
    let sym = (&compressed + compressed.transpose()) * 0.5;
    let top = sym.symmetric_eigen().eigenvalues.max();
    let radial = (u.transpose() * hess * &u)[(0, 0)].abs();
    (top, radial)
}

struct Decay {
    monotone: bool,
    ratio: f64,
}

/// Follows a straight path from `lam` to the boundary of the cone along a
/// direction of decrease and reports the smallest value reached relative to
/// the starting value.
fn boundary_decay(
    spec: &SpeedSpec,
    lam: &CurvatureVector,
    value: f64,
    grad: &DVector<f64>,
    rng: &mut SampleRng,
) -> Result<Decay> {
    let n = lam.len();
    let x = lam.as_slice();
    let g = grad.normalize();
    let xi = sampling::unit_vector(rng, n);
    let mut dir: Vec<f64> = (0..n).map(|a| -g[a] + 0.5 * xi[a]).collect();
    let descent: f64 = dir.iter().zip(g.iter()).map(|(d, g)| d * g).sum();
    let trace: f64 = dir.iter().sum();
    if descent >= 0.0 || trace >= 0.0 {
        dir = (0..n).map(|a| -g[a]).collect();
    }
    let point = |s: f64| CurvatureVector::new((0..n).map(|a| x[a] + s * dir[a]).collect());

    // every cone here lies in {H > 0}, so a direction with negative trace leaves it
    let mut hi = 1.0;
    while spec.in_domain(&point(hi)) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain(format!("path from {x:?} never leaves the cone of {}", spec.label())));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spec.in_domain(&point(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut prev = value;
    let mut monotone = true;
    let mut smallest = value;
    for j in 1..=17 {
        let s = if j == 17 { lo } else { lo * (1.0 - 10f64.powi(-j)) };
        let p = point(s);
        if !spec.in_domain(&p) {
            continue;
        }
        let v = eval_speed(spec, &p)?;
        // round-off in a k-th root near the boundary is of order eps^(1/k), so the
        // walk stops as soon as the value is small enough
        if v > prev + 1e-7 * value {
            monotone = false;
        }
        prev = v;
        smallest = smallest.min(v);
        if smallest < VANISHING_FRACTION * value {
            break;
        }
    }
    Ok(Decay { monotone, ratio: smallest / value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_is_a_parameter_error() {
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        assert!(matches!(check_properties(&s, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn sigma2_root_passes_everything() {
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        let r = check_properties(&s, 300, 42).unwrap();
        assert!(r.failing().is_empty(), "{r:#?}");
    }

    #[test]
    fn harmonic_pairs_passes_everything() {
        let s = SpeedSpec::harmonic_pairs(4).unwrap();
        let r = check_properties(&s, 300, 42).unwrap();
        assert!(r.failing().is_empty(), "{r:#?}");
    }

    #[test]
    fn report_is_deterministic_under_seed() {
        let s = SpeedSpec::harmonic_pairs(3).unwrap();
        assert_eq!(check_properties(&s, 50, 9).unwrap(), check_properties(&s, 50, 9).unwrap());
    }
}
