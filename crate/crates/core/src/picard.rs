//! The integral operator `T(w)(r) = int_0^r G_n(s, w(s)) ds` on a uniform grid and its
//! barrier-clamped Picard iteration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{harmonic_axis_slope, rhs_g, rhs_g_dw, Barrier, BarrierName};
use crate::sampling;
use rand::Rng;

/// Right end `12/(n^2+5n+2)` of the interval on which `w_2` is a super-solution.
pub fn band_radius(n: usize) -> f64 {
    let n = n as f64;
    12.0 / (n * n + 5.0 * n + 2.0)
}

/// Default grid length used by the CLI: `0.65 * band_radius(n)`.
pub fn default_radius(n: usize) -> f64 {
    0.65 * band_radius(n)
}

fn check_n(n: usize) -> Result<()> {
    if !(3..=6).contains(&n) {
        return Err(Error::Parameter(format!("the harmonic-pairs construction needs n in 3..=6, got {n}")));
    }
    Ok(())
}

/// Lower and upper walls `w_4(r)` and `w_3(r)` of the space `X`.
fn walls(n: usize, r: f64) -> Result<(f64, f64)> {
    let w4 = Barrier::new(BarrierName::W4, n, None, None)?;
    let w3 = Barrier::new(BarrierName::W3, n, None, None)?;
    Ok((w4.eval(r)?, w3.eval(r)?))
}

/// Values at the uniform nodes `r_i = i R / (m - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    radius: f64,
    values: Vec<f64>,
}

impl GridFunction {
    /// Builds a grid function; `values[0]` must be zero.
    pub fn new(radius: f64, values: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("grid radius must be positive, got {radius}")));
        }
        if values.len() < 2 {
            return Err(Error::Parameter(format!("a grid needs at least 2 nodes, got {}", values.len())));
        }
        if values[0] != 0.0 {
            return Err(Error::Parameter(format!("w(0) must be 0, got {}", values[0])));
        }
        Ok(GridFunction { radius, values })
    }

    /// Samples `f` at the nodes; the value at `r = 0` is forced to 0.
    pub fn from_fn(radius: f64, m: usize, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Parameter(format!("a grid needs at least 2 nodes, got {m}")));
        }
        let h = radius / (m - 1) as f64;
        let mut values = vec![0.0; m];
        for (i, v) in values.iter_mut().enumerate().skip(1) {
            *v = f(i as f64 * h)?;
        }
        GridFunction::new(radius, values)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.radius / (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.radius
        } else {
            i as f64 * self.step()
        }
    }

    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.len() != other.len() || self.radius != other.radius {
            return Err(Error::Parameter("grids differ".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Sup distance on the nodes shared with a grid of `2(m-1)+1` nodes over the same radius.
    pub fn refinement_distance(&self, fine: &GridFunction) -> Result<f64> {
        if fine.len() != 2 * (self.len() - 1) + 1 || fine.radius != self.radius {
            return Err(Error::Parameter("the second grid is not the midpoint refinement of the first".into()));
        }
        Ok(self.values.iter().enumerate().map(|(i, v)| (v - fine.values[2 * i]).abs()).fold(0.0, f64::max))
    }

    /// Indices `i >= 1` where `w_4(r_i) <= w_i <= w_3(r_i)` fails.
    pub fn x_violations(&self, n: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 1..self.len() {
            let (lo, hi) = walls(n, self.node(i))?;
            let v = self.values[i];
            if !(v >= lo && v <= hi) {
                out.push(i);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOutput {
    pub image: GridFunction,
    /// Nodes at which the raw quadrature left `[w_4, w_3]` before clamping.
    pub clamped_nodes: Vec<usize>,
    pub max_clamp: f64,
}

/// One application of `T` by cumulative trapezoid, clamped into `X`.
///
/// The integrand at `s = 0` is its limit along slope `(n^2+n+2)/8`, where
/// `G_n(s, c s) -> c`.
pub fn operator_t(n: usize, w: &GridFunction) -> Result<OperatorOutput> {
    check_n(n)?;
    let m = w.len();
    let h = w.step();
    let mut integrand = vec![0.0; m];
    integrand[0] = harmonic_axis_slope(n);
    for (i, (slot, &v)) in integrand.iter_mut().zip(&w.values).enumerate().skip(1) {
        let r = w.node(i);
        *slot = rhs_g(n, r, v)
            .map_err(|e| Error::BandViolation { r, detail: format!("integrand undefined for w = {v}: {e}") })?;
    }
    let mut values = vec![0.0; m];
    let mut clamped_nodes = Vec::new();
    let mut max_clamp: f64 = 0.0;
    let mut acc = 0.0;
    for i in 1..m {
        acc += 0.5 * h * (integrand[i - 1] + integrand[i]);
        let (lo, hi) = walls(n, w.node(i))?;
        let v = acc.clamp(lo, hi);
        if v != acc {
            clamped_nodes.push(i);
            max_clamp = max_clamp.max((v - acc).abs());
        }
        values[i] = v;
    }
    Ok(OperatorOutput { image: GridFunction::new(w.radius, values)?, clamped_nodes, max_clamp })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub sup_change: f64,
    /// `|w^{j+1} - w^j| / |w^j - w^{j-1}|`; absent on the first step and once changes hit round-off.
    pub contraction_ratio: Option<f64>,
    pub clamp_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardSolution {
    pub n: usize,
    pub radius: f64,
    pub m: usize,
    pub tol: f64,
    pub fixed_point: GridFunction,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
}

impl PicardSolution {
    pub fn max_ratio(&self) -> Option<f64> {
        self.iterations.iter().filter_map(|r| r.contraction_ratio).reduce(f64::max)
    }
}

/// Midpoint of `[w_4, min(w_2, w_3)]` at every node.
pub fn initial_iterate(n: usize, radius: f64, m: usize) -> Result<GridFunction> {
    let w2 = Barrier::new(BarrierName::W2, n, None, None)?;
    GridFunction::from_fn(radius, m, |r| {
        let (lo, hi) = walls(n, r)?;
        let hi = if w2.domain().contains(r) { hi.min(w2.eval(r)?) } else { hi };
        Ok(0.5 * (lo + hi))
    })
}

/// Iterates `w <- T(w)` until the sup-norm change drops below `tol`.
pub fn picard_solve(n: usize, radius: f64, m: usize, tol: f64, max_iter: usize) -> Result<PicardSolution> {
    check_n(n)?;
    let limit = band_radius(n);
    if !(radius > 0.0 && radius <= limit) {
        return Err(Error::Parameter(format!("grid radius must lie in (0, {limit}] for n = {n}, got {radius}")));
    }
    if m < 64 {
        return Err(Error::Parameter(format!("need at least 64 nodes, got {m}")));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::Parameter("tol and max_iter must be positive".into()));
    }
    let mut w = initial_iterate(n, radius, m)?;
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut above_one = 0;
    let mut converged = false;
    for j in 0..max_iter {
        let out = operator_t(n, &w)?;
        let change = out.image.sup_distance(&w)?;
        let scale = out.image.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let ratio = iterations
            .last()
            .filter(|prev| prev.sup_change > 1e3 * f64::EPSILON * scale.max(1.0))
            .map(|prev| change / prev.sup_change);
        iterations.push(IterationRecord {
            sup_change: change,
            contraction_ratio: ratio,
            clamp_events: out.clamped_nodes.len(),
        });
        w = out.image;
        if change < tol {
            converged = true;
            break;
        }
        match ratio {
            Some(q) if q >= 1.0 => {
                above_one += 1;
                if above_one >= 3 {
                    return Err(Error::ContractionFailure { iteration: j, ratio: q });
                }
            }
            _ => above_one = 0,
        }
    }
    Ok(PicardSolution { n, radius, m, tol, fixed_point: w, iterations, converged })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub n: usize,
    /// Sampled supremum of `dG_n/dw / r` over the band `w_4 <= w <= w_3`, `0 < r <= 12/(n^2+5n+2)`.
    pub c_n: f64,
    /// `sqrt(2 * 0.99 / C_n)`, infinite when `C_n <= 0`.
    pub r2: f64,
    pub witness_r: f64,
    pub witness_w: f64,
    /// Largest relative gap between the analytic partial and a central difference.
    pub fd_gap: f64,
}

/// Samples `dG_n/dw / r` on the band and derives the radius on which `C_n R^2/2 < 1`.
pub fn lipschitz_radius(n: usize, samples: usize, seed: u64) -> Result<LipschitzEstimate> {
    check_n(n)?;
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let mut rng = sampling::rng(seed);
    let end = band_radius(n);
    let mut best =
        LipschitzEstimate { n, c_n: f64::NEG_INFINITY, r2: f64::INFINITY, witness_r: 0.0, witness_w: 0.0, fd_gap: 0.0 };
    for _ in 0..samples {
        let r = end * (1.0 - rng.random::<f64>());
        let (lo, hi) = walls(n, r)?;
        let w = lo + (hi - lo) * rng.random::<f64>();
        let d = rhs_g_dw(n, r, w).map_err(|e| Error::BandViolation { r, detail: e.to_string() })?;
        let ratio = d / r;
        if !ratio.is_finite() {
            return Err(Error::BandViolation { r, detail: format!("dG/dw is unbounded at w = {w}") });
        }
        let hw = 1e-6 * w;
        let fd = (rhs_g(n, r, w + hw)? - rhs_g(n, r, w - hw)?) / (2.0 * hw);
        best.fd_gap = best.fd_gap.max((fd - d).abs() / d.abs().max(1.0));
        if ratio > best.c_n {
            best.c_n = ratio;
            best.witness_r = r;
            best.witness_w = w;
        }
    }
    best.r2 = if best.c_n > 0.0 { (2.0 * 0.99 / best.c_n).sqrt() } else { f64::INFINITY };
    Ok(best)
}
