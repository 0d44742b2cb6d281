//! Right-hand sides of the profile equations and their closed-form solutions.

use crate::binomial;
use crate::error::{Error, Result};

/// `(n^2 - 3n + 2)/4 = (n-1)(n-2)/4`, the pole of the harmonic-pairs equation in `w/r`.
pub fn harmonic_pole(n: usize) -> f64 {
    let n = n as f64;
    (n * n - 3.0 * n + 2.0) / 4.0
}

/// Slope `(n^2 + n + 2)/8` of the linear sub-solution `w_1`; also the axis slope.
pub fn harmonic_axis_slope(n: usize) -> f64 {
    let n = n as f64;
    (n * n + n + 2.0) / 8.0
}

/// Radius `8/(n^2 + n + 2)` at which `w_3` and `w_5` (with `a^2 = (n^2+n+2)/8`) blow up.
pub fn harmonic_asymptote(n: usize) -> f64 {
    1.0 / harmonic_axis_slope(n)
}

/// Axis slope `(k / (n binom(n-1, k-1)))^{1/k}` of the sigma-k profile equation.
pub fn sigma_axis_slope(k: usize, n: usize) -> f64 {
    (k as f64 / (n as f64 * binomial(n - 1, k - 1))).powf(1.0 / k as f64)
}

/// `F_{k,n}(r, v) = (v/r)(1+v^2)((r/v)^k / binom(n-1,k-1) - (n-k)/k)`.
pub fn rhs_f(k: usize, n: usize, r: f64, v: f64) -> Result<f64> {
    if !(k >= 2 && k <= n) {
        return Err(Error::Parameter(format!("F_(k,n) needs 2 <= k <= n, got k = {k}, n = {n}")));
    }
    if !(r > 0.0) || !(v > 0.0) {
        return Err(Error::Domain(format!("F_(k,n) needs r > 0 and v > 0, got r = {r}, v = {v}")));
    }
    Ok(f_unchecked(k, n, r, v))
}

pub(crate) fn f_unchecked(k: usize, n: usize, r: f64, v: f64) -> f64 {
    let bracket = (r / v).powi(k as i32) / binomial(n - 1, k - 1) - (n - k) as f64 / k as f64;
    (v / r) * (1.0 + v * v) * bracket
}

/// `G_n(r, w) = (w/r)(1+w^2)(n - w/r)/((w/r) - (n^2-3n+2)/4)`.
pub fn rhs_g(n: usize, r: f64, w: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("G_n needs n >= 2, got {n}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("G_n needs r > 0, got r = {r}")));
    }
    let s = w / r;
    let den = s - harmonic_pole(n);
    if !(den > 0.0) {
        return Err(Error::Domain(format!(
            "G_n denominator w/r - (n^2-3n+2)/4 = {den} is not positive at r = {r}, w = {w}"
        )));
    }
    Ok(s * (1.0 + w * w) * (n as f64 - s) / den)
}

/// `d G_n / d w`, derived from the quotient rule in `s = w/r`:
/// `[(-s^2 + 2qs - nq)(1+w^2)/r + 2w s (n-s)(s-q)] / (s-q)^2`.
pub fn rhs_g_dw(n: usize, r: f64, w: f64) -> Result<f64> {
    rhs_g(n, r, w)?;
    let q = harmonic_pole(n);
    let nf = n as f64;
    let s = w / r;
    let num = (-s * s + 2.0 * q * s - nf * q) * (1.0 + w * w) / r + 2.0 * w * s * (nf - s) * (s - q);
    Ok(num / ((s - q) * (s - q)))
}

/// The part `L(r, w) = -w^2 - n q r^2 + 2 q r w` of the numerator of `d G_n / d w`
/// that survives at order `r^2` near the axis.
pub fn leading_numerator(n: usize, r: f64, w: f64) -> f64 {
    let q = harmonic_pole(n);
    -w * w - n as f64 * q * r * r + 2.0 * q * r * w
}

/// `v_{+-,a}(r) = +-sqrt(e^{r^2 + a} - 1)`, solutions of `v' = F_{2,2}(r, v)`.
pub fn closed_form_v(a: f64, r: f64, sign: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::Parameter(format!("closed form needs a >= 0, got {a}")));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::Parameter(format!("sign must be +1 or -1, got {sign}")));
    }
    Ok(sign * (r * r + a).exp_m1().sqrt())
}

/// Slope `dr/dz = 1/sqrt(e^{r^2 - 2a} - 1)` of the surface-of-revolution translator.
pub fn closed_form_cyl(a: f64, r: f64) -> Result<f64> {
    let x = r * r - 2.0 * a;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("r^2 = {} is not above 2a = {}", r * r, 2.0 * a)));
    }
    Ok(1.0 / x.exp_m1().sqrt())
}
