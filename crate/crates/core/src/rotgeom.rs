//! Principal curvatures of rotationally symmetric graphs `x_{n+1} = u(|x|)`
//! and of surfaces of revolution `(r(z) cos t, r(z) sin t, z)` in R^3.
//!
//! Graphs are oriented so that bowl-like profiles (`u' > 0`, `u'' > 0`) have
//! positive curvatures and the normal pairs positively with `e_{n+1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::speeds::{eval_speed, CurvatureVector, SpeedSpec};

/// Radial 2-jet `(r, u, u', u'')` of a rotational graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialJet {
    pub r: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
}

/// 2-jet `(r(z), r'(z), r''(z))` of a surface of revolution about the `z`-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylJet {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

/// `(lambda_1, lambda_2, ..., lambda_2)`: the radial curvature
/// `u''/(1+u'^2)^{3/2}` followed by `n - 1` copies of `u'/(r sqrt(1+u'^2))`.
pub fn graph_curvatures(jet: &RadialJet, n: usize) -> Result<CurvatureVector> {
    if n < 2 {
        return Err(Error::Parameter(format!("rotational graphs need n >= 2, got {n}")));
    }
    if !(jet.r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got r = {}", jet.r)));
    }
    let w2 = 1.0 + jet.du * jet.du;
    let w = w2.sqrt();
    let radial = jet.ddu / (w2 * w);
    let rotational = jet.du / (jet.r * w);
    let mut lambda = vec![rotational; n];
    lambda[0] = radial;
    Ok(CurvatureVector::new(lambda))
}

/// `(r''/(1+r'^2)^{3/2}, -1/(r sqrt(1+r'^2)))`.
pub fn cylinder_curvatures(jet: &CylJet) -> Result<CurvatureVector> {
    if !(jet.r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got r = {}", jet.r)));
    }
    let w2 = 1.0 + jet.dr * jet.dr;
    let w = w2.sqrt();
    Ok(CurvatureVector::new(vec![jet.ddr / (w2 * w), -1.0 / (jet.r * w)]))
}

/// `<nu, e_{n+1}> = 1/sqrt(1 + u'^2)` for a graph.
pub fn tilt(du: f64) -> f64 {
    1.0 / (1.0 + du * du).sqrt()
}

/// `|<nu, e_3>| = |r'|/sqrt(1 + r'^2)` for a surface of revolution about the `z`-axis.
pub fn cylinder_normal_component(dr: f64) -> f64 {
    dr.abs() / (1.0 + dr * dr).sqrt()
}

/// Translator residual `gamma(lambda) - <nu, v>`.
pub fn soliton_residual(spec: &SpeedSpec, lambda: &CurvatureVector, normal_component: f64) -> Result<f64> {
    Ok(eval_speed(spec, lambda)? - normal_component)
}
