//! Membership in the cones that carry the speeds and the hypotheses of the
//! convexity estimate.
//!
//! `GammaK` and `TwoConvex` are open cones (strict inequalities);
//! `GammaAlphaDelta` and `UniformTwoConvex` are closed conditions. Points
//! exactly on a boundary are classified by the inequality as written.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling;
use crate::speeds::{elementary_symmetric, eval_speed, CurvatureVector, SpeedKind, SpeedSpec};

/// The first condition a curvature vector fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// `S_l(lambda) > 0` fails.
    SigmaNonPositive { l: usize, value: f64 },
    /// `lambda_i + lambda_j > 0` fails.
    PairSumNonPositive { i: usize, j: usize, sum: f64 },
    /// `(delta + 1) H <= alpha gamma` fails; `lhs = (delta + 1) H`, `rhs = alpha gamma`.
    Pinching { lhs: f64, rhs: f64 },
    /// `lambda_i + lambda_j >= beta H` fails.
    UniformPair { i: usize, j: usize, sum: f64, bound: f64 },
    /// `H > 0` fails.
    MeanNonPositive { h: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SigmaNonPositive { l, value } => write!(f, "S_{l} = {value} is not positive"),
            Violation::PairSumNonPositive { i, j, sum } => {
                write!(f, "lambda_{i} + lambda_{j} = {sum} is not positive")
            }
            Violation::Pinching { lhs, rhs } => write!(f, "(delta+1)H = {lhs} exceeds alpha*gamma = {rhs}"),
            Violation::UniformPair { i, j, sum, bound } => {
                write!(f, "lambda_{i} + lambda_{j} = {sum} is below beta*H = {bound}")
            }
            Violation::MeanNonPositive { h } => write!(f, "H = {h} is not positive"),
        }
    }
}

pub(crate) fn gamma_k_violation(lambda: &[f64], k: usize) -> Option<Violation> {
    let e = elementary_symmetric(lambda);
    (1..=k.min(lambda.len())).find_map(|l| (!(e[l] > 0.0)).then_some(Violation::SigmaNonPositive { l, value: e[l] }))
}

pub(crate) fn two_convex_violation(lambda: &[f64]) -> Option<Violation> {
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            let sum = lambda[i] + lambda[j];
            if !(sum > 0.0) {
                return Some(Violation::PairSumNonPositive { i, j, sum });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeKind {
    GammaK { k: usize },
    TwoConvex,
    GammaAlphaDelta { alpha: f64, delta: f64, speed: SpeedSpec },
    UniformTwoConvex { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    kind: ConeKind,
    n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Inside,
    Outside(Violation),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Membership::Inside => None,
            Membership::Outside(v) => Some(v),
        }
    }
}

impl ConeSpec {
    pub fn gamma_k(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("Gamma_k needs 1 <= k <= n, got k = {k}, n = {n}")));
        }
        Ok(ConeSpec { kind: ConeKind::GammaK { k }, n })
    }

    pub fn two_convex(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("the 2-convex cone needs n >= 2".into()));
        }
        Ok(ConeSpec { kind: ConeKind::TwoConvex, n })
    }

    pub fn gamma_alpha_delta(alpha: f64, delta: f64, speed: SpeedSpec) -> Result<Self> {
        if !(alpha > 0.0 && delta > 0.0) {
            return Err(Error::Parameter(format!("alpha and delta must be positive, got {alpha}, {delta}")));
        }
        let n = speed.n();
        Ok(ConeSpec { kind: ConeKind::GammaAlphaDelta { alpha, delta, speed }, n })
    }

    pub fn uniform_two_convex(beta: f64, n: usize) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Parameter(format!("beta must lie in (0, 1), got {beta}")));
        }
        Ok(ConeSpec { kind: ConeKind::UniformTwoConvex { beta }, n })
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, lambda: &CurvatureVector) -> Result<Membership> {
        if lambda.len() != self.n {
            return Err(Error::Parameter(format!(
                "curvature vector has length {}, cone expects n = {}",
                lambda.len(),
                self.n
            )));
        }
        let x = lambda.as_slice();
        let violation = match &self.kind {
            ConeKind::GammaK { k } => gamma_k_violation(x, *k),
            ConeKind::TwoConvex => two_convex_violation(x),
            ConeKind::GammaAlphaDelta { alpha, delta, speed } => match speed.domain_violation(x) {
                Some(v) => Some(v),
                None => {
                    let lhs = (delta + 1.0) * lambda.mean_curvature();
                    let rhs = alpha * eval_speed(speed, lambda)?;
                    (lhs > rhs).then_some(Violation::Pinching { lhs, rhs })
                }
            },
            ConeKind::UniformTwoConvex { beta } => {
                let h = lambda.mean_curvature();
                if !(h > 0.0) {
                    Some(Violation::MeanNonPositive { h })
                } else {
                    lambda.min_pair_sum().and_then(|(i, j, sum)| {
                        let bound = beta * h;
                        (sum < bound).then_some(Violation::UniformPair { i, j, sum, bound })
                    })
                }
            }
        };
        Ok(violation.map_or(Membership::Inside, Membership::Outside))
    }
}

/// Unit generator of the cylindrical ray `Cyl_j`: `n - j` leading ones, `j` trailing zeros.
pub fn cyl_ray(n: usize, j: usize) -> Result<CurvatureVector> {
    if n == 0 || j >= n {
        return Err(Error::Parameter(format!("Cyl_j needs 0 <= j <= n - 1, got j = {j}, n = {n}")));
    }
    let ones = n - j;
    let c = 1.0 / (ones as f64).sqrt();
    Ok(CurvatureVector::new((0..n).map(|a| if a < ones { c } else { 0.0 }).collect()))
}

/// Distance from a unit vector to the union of the rays `Cyl_{n-1}` (all
/// coordinate half-axes, by symmetry), their closure including the origin.
fn distance_to_cyl_rays(x: &[f64]) -> f64 {
    x.iter().map(|&xi| if xi > 0.0 { (1.0 - xi * xi).max(0.0).sqrt() } else { 1.0 }).fold(f64::INFINITY, f64::min)
}

/// Distance from an interior point to the boundary of the speed's cone.
///
/// Exact for the 2-convex cone (an intersection of half-spaces). For the
/// Garding cones it is the shortest exit distance over a fixed fan of
/// directions, which bounds the true distance from above.
fn distance_to_boundary(speed: &SpeedSpec, x: &[f64], fan: &[Vec<f64>]) -> f64 {
    match speed.kind() {
        SpeedKind::HarmonicPairs => {
            let mut d = f64::INFINITY;
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    d = d.min((x[i] + x[j]) / std::f64::consts::SQRT_2);
                }
            }
            d
        }
        SpeedKind::Product { factors, .. } => {
            factors.iter().map(|f| distance_to_boundary(f, x, fan)).fold(f64::INFINITY, f64::min)
        }
        SpeedKind::SigmaKRoot { .. } | SpeedKind::Quotient { .. } => {
            fan.iter().map(|d| exit_distance(speed, x, d)).fold(f64::INFINITY, f64::min)
        }
    }
}

fn exit_distance(speed: &SpeedSpec, x: &[f64], dir: &[f64]) -> f64 {
    let at = |s: f64| -> Vec<f64> { x.iter().zip(dir).map(|(a, d)| a + s * d).collect() };
    let mut hi = 1.0;
    while speed.domain_violation(&at(hi)).is_none() {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if speed.domain_violation(&at(mid)).is_none() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn direction_fan(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut fan = Vec::new();
    for a in 0..n {
        let mut e = vec![0.0; n];
        e[a] = -1.0;
        fan.push(e);
    }
    fan.push(vec![-1.0 / (n as f64).sqrt(); n]);
    let mut rng = sampling::rng(seed ^ 0x5eed_fa11);
    for _ in 0..8 * n {
        fan.push(sampling::unit_vector(&mut rng, n));
    }
    fan
}

/// Smallest distance, over sampled unit vectors of `Gamma_{alpha,delta}`, to
/// either the rays `Cyl_{n-1}` or the boundary of the speed's cone.
///
/// `samples` counts candidate draws on the unit sphere, not accepted points.
pub fn cone_separation(cone: &ConeSpec, samples: usize, seed: u64) -> Result<f64> {
    let speed = match &cone.kind {
        ConeKind::GammaAlphaDelta { speed, .. } => speed,
        _ => return Err(Error::Parameter("cone separation is defined for Gamma_{alpha,delta} only".into())),
    };
    if samples == 0 {
        return Err(Error::Parameter("samples must be at least 1".into()));
    }
    let n = cone.n;
    let fan = direction_fan(n, seed);
    let mut rng = sampling::rng(seed);
    let mut best = f64::INFINITY;
    let mut inside = 0usize;
    for _ in 0..samples {
        let x = CurvatureVector::new(sampling::unit_vector(&mut rng, n));
        if !cone.contains(&x)?.is_inside() {
            continue;
        }
        inside += 1;
        let d = distance_to_cyl_rays(x.as_slice()).min(distance_to_boundary(speed, x.as_slice(), &fan));
        best = best.min(d);
    }
    if inside == 0 {
        return Err(Error::EmptyCone { samples, what: "(delta+1)H <= alpha*gamma".into() });
    }
    Ok(best)
}
