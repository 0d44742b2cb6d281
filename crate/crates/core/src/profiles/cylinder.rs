//! The surface-of-revolution translator `r(z)` with `dr/dz = 1/sqrt(e^{r^2-2a} - 1)` and `r(0) = 1`.

use super::rhs::closed_form_cyl;
use crate::error::{Error, Result};
use crate::rotgeom::CylJet;

const QUAD_TOL: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-12;

fn integrand(a: f64, s: f64) -> f64 {
    (s * s - 2.0 * a).exp_m1().max(0.0).sqrt()
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let fm = f(0.5 * (lo + hi));
    let whole = simpson(fa, fm, fb, hi - lo);
    sign * adaptive(&f, lo, hi, fa, fm, fb, whole, tol, 48)
}

/// Height `z(r) = int_1^r sqrt(e^{s^2 - 2a} - 1) ds` of the profile at radius `r`.
pub fn cyl_height(a: f64, r: f64) -> Result<f64> {
    check_a(a)?;
    let waist = (2.0 * a).sqrt();
    if !(r >= waist) {
        return Err(Error::Domain(format!("radius {r} is below the waist {waist}")));
    }
    let z = adaptive_simpson(|s| integrand(a, s), 1.0, r, QUAD_TOL);
    if !z.is_finite() {
        return Err(Error::Domain(format!("height integral overflows at r = {r}")));
    }
    Ok(z)
}

fn check_a(a: f64) -> Result<()> {
    if !(0.0..0.5).contains(&a) {
        return Err(Error::Parameter(format!("need 0 <= a < 1/2 so that r(0) = 1 lies above the waist, got a = {a}")));
    }
    Ok(())
}

/// Smallest solvable height: the waist `r = sqrt(2a)`, where the slope is vertical.
pub fn cyl_min_height(a: f64) -> Result<f64> {
    cyl_height(a, (2.0 * a).sqrt())
}

/// Solves `z(r) = z` for `r`; `r(0) = 1` exactly.
pub fn solve_cyl_profile(a: f64, z: f64) -> Result<f64> {
    check_a(a)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("height must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let z_min = cyl_min_height(a)?;
    if z <= z_min {
        return Err(Error::Domain(format!("height {z} is at or below the waist height {z_min}; no radius solves it")));
    }
    let (mut lo, mut hi) = if z > 0.0 {
        let mut hi = 2.0;
        while cyl_height(a, hi)? < z {
            hi *= 1.5;
        }
        (1.0, hi)
    } else {
        ((2.0 * a).sqrt(), 1.0)
    };
    // safeguarded Newton on z(r) - z, with dz/dr = 1/closed_form_cyl
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = cyl_height(a, r)? - z;
        if g > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let slope = integrand(a, r);
        let newton = r - g / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - r).abs() <= ROOT_TOL * r.max(1.0) || hi - lo <= ROOT_TOL * r.max(1.0) {
            return Ok(next);
        }
        r = next;
    }
    Err(Error::NoConvergence { iterations: 200, last_change: hi - lo })
}

/// Profile jet at height `z`: `r`, `r' = f(r)` and `r'' = -(1 + r'^2) r r'^2`.
pub fn cyl_jet(a: f64, z: f64) -> Result<CylJet> {
    let r = solve_cyl_profile(a, z)?;
    let dr = closed_form_cyl(a, r)?;
    Ok(CylJet { r, dr, ddr: -(1.0 + dr * dr) * r * dr * dr })
}
