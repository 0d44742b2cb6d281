//! Curvature speeds `gamma(lambda)` and their derivatives in the principal
//! curvatures.
//!
//! Every speed here is symmetric, positive and 1-homogeneous on an open
//! convex cone. Evaluation sorts the curvature vector first, so permuting the
//! input never changes a single bit of the result.

mod props;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cones::{self, Violation};
use crate::error::{Error, Result};

pub use props::{check_properties, PropertyOutcome, PropertyReport};

/// Principal curvature vector of a hypersurface at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVector(Vec<f64>);

impl CurvatureVector {
    pub fn new(lambda: Vec<f64>) -> Self {
        CurvatureVector(lambda)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mean curvature `H`, the sum of the principal curvatures.
    pub fn mean_curvature(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Smallest principal curvature `lambda_1`.
    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `S_{1,1} = H - lambda_1`.
    pub fn s11(&self) -> f64 {
        self.mean_curvature() - self.min()
    }

    /// Smallest pairwise sum `lambda_i + lambda_j` over `i < j`, with its indices.
    pub fn min_pair_sum(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                let s = self.0[i] + self.0[j];
                if best.map_or(true, |(_, _, b)| s < b) {
                    best = Some((i, j, s));
                }
            }
        }
        best
    }

    pub fn scaled(&self, c: f64) -> Self {
        CurvatureVector(self.0.iter().map(|x| c * x).collect())
    }

    pub fn norm(&self) -> f64 {
        crate::sampling::norm(&self.0)
    }
}

impl From<Vec<f64>> for CurvatureVector {
    fn from(v: Vec<f64>) -> Self {
        CurvatureVector(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SpeedKind {
    /// `S_k^{1/k}` on the Garding cone `Gamma_k`.
    SigmaKRoot { k: usize },
    /// `(sum_{i<j} 1/(lambda_i + lambda_j))^{-1}` on the 2-convex cone.
    HarmonicPairs,
    /// `(S_k / S_l)^{1/(k-l)}` on `Gamma_k`.
    Quotient { k: usize, l: usize },
    /// Weighted geometric mean `prod f_i^{w_i}` on the intersection of the factor cones.
    Product { factors: Vec<SpeedSpec>, weights: Vec<f64> },
}

/// A curvature speed together with the number of principal curvatures it acts on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedSpec {
    kind: SpeedKind,
    n: usize,
}

impl SpeedSpec {
    pub fn sigma_k_root(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("sigma-k root needs 1 <= k <= n, got k = {k}, n = {n}")));
        }
        Ok(SpeedSpec { kind: SpeedKind::SigmaKRoot { k }, n })
    }

    pub fn harmonic_pairs(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("harmonic pairs speed needs n >= 2, got {n}")));
        }
        Ok(SpeedSpec { kind: SpeedKind::HarmonicPairs, n })
    }

    pub fn quotient(k: usize, l: usize, n: usize) -> Result<Self> {
        if !(0 < l && l < k && k <= n) {
            return Err(Error::Parameter(format!("quotient needs 0 < l < k <= n, got k = {k}, l = {l}, n = {n}")));
        }
        Ok(SpeedSpec { kind: SpeedKind::Quotient { k, l }, n })
    }

    pub fn product(factors: Vec<SpeedSpec>, weights: Vec<f64>) -> Result<Self> {
        if factors.is_empty() || factors.len() != weights.len() {
            return Err(Error::Parameter(format!(
                "product needs one weight per factor, got {} factors and {} weights",
                factors.len(),
                weights.len()
            )));
        }
        let n = factors[0].n;
        if factors.iter().any(|f| f.n != n) {
            return Err(Error::Parameter("product factors must share n".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Parameter("product weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("product weights must sum to 1, got {total}")));
        }
        Ok(SpeedSpec { kind: SpeedKind::Product { factors, weights }, n })
    }

    pub fn kind(&self) -> &SpeedKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Short human-readable name, used in reports and file metadata.
    pub fn label(&self) -> String {
        match &self.kind {
            SpeedKind::SigmaKRoot { k } => format!("sigma-k(k={k})"),
            SpeedKind::HarmonicPairs => "harmonic".to_string(),
            SpeedKind::Quotient { k, l } => format!("quotient(k={k},l={l})"),
            SpeedKind::Product { factors, weights } => {
                let parts: Vec<String> =
                    factors.iter().zip(weights).map(|(f, w)| format!("{}^{w}", f.label())).collect();
                format!("product[{}]", parts.join("*"))
            }
        }
    }

    fn check_dim(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(Error::Parameter(format!(
                "curvature vector has length {}, speed expects n = {}",
                lambda.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// First violated condition of the open cone on which this speed lives.
    pub fn domain_violation(&self, lambda: &[f64]) -> Option<Violation> {
        match &self.kind {
            SpeedKind::SigmaKRoot { k } | SpeedKind::Quotient { k, .. } => cones::gamma_k_violation(lambda, *k),
            SpeedKind::HarmonicPairs => cones::two_convex_violation(lambda),
            SpeedKind::Product { factors, .. } => factors.iter().find_map(|f| f.domain_violation(lambda)),
        }
    }

    pub fn in_domain(&self, lambda: &CurvatureVector) -> bool {
        lambda.len() == self.n && self.domain_violation(lambda.as_slice()).is_none()
    }
}

/// Value, gradient and Hessian of a speed in the principal curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedDerivatives {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Elementary symmetric polynomials `e_0, ..., e_m` of `lambda` (with `m = lambda.len()`).
pub fn elementary_symmetric(lambda: &[f64]) -> Vec<f64> {
    let m = lambda.len();
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for (count, &x) in lambda.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Unnormalised k-th elementary symmetric polynomial `S_k(lambda)`.
pub fn eval_sigma_k(lambda: &CurvatureVector, k: usize) -> Result<f64> {
    let n = lambda.len();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("S_k needs 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(elementary_symmetric(lambda.as_slice())[k])
}

fn sorted_with_perm(lambda: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..lambda.len()).collect();
    perm.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
    (perm.iter().map(|&i| lambda[i]).collect(), perm)
}

fn sorted(lambda: &[f64]) -> Vec<f64> {
    let mut v = lambda.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `gamma(lambda)`, checked against the speed's cone.
pub fn eval_speed(spec: &SpeedSpec, lambda: &CurvatureVector) -> Result<f64> {
    spec.check_dim(lambda.as_slice())?;
    if let Some(v) = spec.domain_violation(lambda.as_slice()) {
        return Err(Error::OutsideCone(v));
    }
    Ok(value_sorted(spec, &sorted(lambda.as_slice())))
}

fn value_sorted(spec: &SpeedSpec, lam: &[f64]) -> f64 {
    match &spec.kind {
        SpeedKind::SigmaKRoot { k } => {
            let s = elementary_symmetric(lam)[*k];
            match k {
                1 => s,
                2 => s.sqrt(),
                _ => s.powf(1.0 / *k as f64),
            }
        }
        SpeedKind::HarmonicPairs => 1.0 / harmonic_sum(lam),
        SpeedKind::Quotient { k, l } => {
            let e = elementary_symmetric(lam);
            (e[*k] / e[*l]).powf(1.0 / (k - l) as f64)
        }
        SpeedKind::Product { factors, weights } => {
            factors.iter().zip(weights).map(|(f, w)| value_sorted(f, lam).powf(*w)).product()
        }
    }
}

fn harmonic_sum(lam: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..lam.len() {
        for j in i + 1..lam.len() {
            sum += 1.0 / (lam[i] + lam[j]);
        }
    }
    sum
}

/// Analytic gradient and Hessian of `gamma` at an interior point of its cone.
pub fn eval_derivatives(spec: &SpeedSpec, lambda: &CurvatureVector) -> Result<SpeedDerivatives> {
    spec.check_dim(lambda.as_slice())?;
    if let Some(v) = spec.domain_violation(lambda.as_slice()) {
        return Err(Error::OutsideCone(v));
    }
    let (lam, perm) = sorted_with_perm(lambda.as_slice());
    let d = derivatives_sorted(spec, &lam);
    let n = lam.len();
    let mut gradient = DVector::zeros(n);
    let mut hessian = DMatrix::zeros(n, n);
    for a in 0..n {
        gradient[perm[a]] = d.gradient[a];
        for b in 0..n {
            hessian[(perm[a], perm[b])] = d.hessian[(a, b)];
        }
    }
    Ok(SpeedDerivatives { value: d.value, gradient, hessian })
}

/// `S_k` with its gradient `S_{k-1}(lambda | i)` and Hessian `S_{k-2}(lambda | i, j)`.
fn sigma_jet(lam: &[f64], k: usize) -> (f64, DVector<f64>, DMatrix<f64>) {
    let n = lam.len();
    let value = elementary_symmetric(lam)[k];
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    if k == 0 {
        return (value, grad, hess);
    }
    for i in 0..n {
        let rest: Vec<f64> = lam.iter().enumerate().filter(|&(a, _)| a != i).map(|(_, &x)| x).collect();
        grad[i] = elementary_symmetric(&rest)[k - 1];
        if k >= 2 {
            for j in i + 1..n {
                let rest2: Vec<f64> =
                    lam.iter().enumerate().filter(|&(a, _)| a != i && a != j).map(|(_, &x)| x).collect();
                let h = elementary_symmetric(&rest2)[k - 2];
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
    }
    (value, grad, hess)
}

/// Gradient and Hessian of `ln S_k`.
fn log_sigma_jet(lam: &[f64], k: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (s, g, h) = sigma_jet(lam, k);
    if k == 0 {
        return (g, h);
    }
    let gl = &g / s;
    let hl = &h / s - &gl * gl.transpose();
    (gl, hl)
}

/// Turns the derivatives of `psi = ln gamma` into those of `gamma = exp(psi)`.
fn from_log(value: f64, gl: DVector<f64>, hl: DMatrix<f64>) -> SpeedDerivatives {
    let hessian = (&hl + &gl * gl.transpose()) * value;
    SpeedDerivatives { value, gradient: gl * value, hessian }
}

fn derivatives_sorted(spec: &SpeedSpec, lam: &[f64]) -> SpeedDerivatives {
    let n = lam.len();
    let value = value_sorted(spec, lam);
    match &spec.kind {
        SpeedKind::SigmaKRoot { k: 1 } => {
            SpeedDerivatives { value, gradient: DVector::from_element(n, 1.0), hessian: DMatrix::zeros(n, n) }
        }
        SpeedKind::SigmaKRoot { k } => {
            let (gl, hl) = log_sigma_jet(lam, *k);
            let kf = *k as f64;
            from_log(value, gl / kf, hl / kf)
        }
        SpeedKind::Quotient { k, l } => {
            let (gk, hk) = log_sigma_jet(lam, *k);
            let (gl, hl) = log_sigma_jet(lam, *l);
            let d = (k - l) as f64;
            from_log(value, (gk - gl) / d, (hk - hl) / d)
        }
        SpeedKind::HarmonicPairs => {
            // gamma = 1/sum; d sum/d lambda_a = -sum_{j != a} p_aj^{-2} with p_aj = lambda_a + lambda_j
            let sum = harmonic_sum(lam);
            let mut ds = DVector::zeros(n);
            let mut dds = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let p = lam[a] + lam[b];
                    ds[a] -= 1.0 / (p * p);
                    dds[(a, a)] += 2.0 / (p * p * p);
                    dds[(a, b)] = 2.0 / (p * p * p);
                }
            }
            let gradient = -&ds / (sum * sum);
            let hessian = -&dds / (sum * sum) + (&ds * ds.transpose()) * (2.0 / (sum * sum * sum));
            SpeedDerivatives { value, gradient, hessian }
        }
        SpeedKind::Product { factors, weights } => {
            let mut gl = DVector::zeros(n);
            let mut hl = DMatrix::zeros(n, n);
            for (f, w) in factors.iter().zip(weights) {
                let d = derivatives_sorted(f, lam);
                let g = &d.gradient / d.value;
                hl += (&d.hessian / d.value - &g * g.transpose()) * *w;
                gl += g * *w;
            }
            from_log(value, gl, hl)
        }
    }
}

/// Second derivative of the matrix function `A -> gamma(eig(A))` at
/// `A = diag(lambda)` in the direction of a symmetric matrix `t`.
///
/// Requires pairwise distinct curvatures: the off-diagonal part is the divided
/// difference `(gamma^b - gamma^a)/(lambda_b - lambda_a)`.
pub fn hessian_quadratic_form(spec: &SpeedSpec, lambda: &CurvatureVector, t: &DMatrix<f64>) -> Result<f64> {
    let n = spec.n;
    spec.check_dim(lambda.as_slice())?;
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::Parameter(format!("T must be {n}x{n}, got {}x{}", t.nrows(), t.ncols())));
    }
    let scale = t.amax().max(1.0);
    for a in 0..n {
        for b in a + 1..n {
            if (t[(a, b)] - t[(b, a)]).abs() > 1e-12 * scale {
                return Err(Error::Parameter(format!("T is not symmetric at ({a}, {b})")));
            }
        }
    }
    let lam = lambda.as_slice();
    let lmax = lam.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for a in 0..n {
        for b in a + 1..n {
            let gap = (lam[a] - lam[b]).abs();
            if gap < 1e-10 * lmax {
                return Err(Error::DegenerateEigenvalues { i: a, j: b, gap });
            }
        }
    }
    let d = eval_derivatives(spec, lambda)?;
    let mut q = 0.0;
    for a in 0..n {
        for b in 0..n {
            q += d.hessian[(a, b)] * t[(a, a)] * t[(b, b)];
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let div = (d.gradient[b] - d.gradient[a]) / (lam[b] - lam[a]);
            q += 2.0 * div * t[(a, b)] * t[(a, b)];
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn cv(v: &[f64]) -> CurvatureVector {
        CurvatureVector::new(v.to_vec())
    }

    fn brute_sigma(lam: &[f64], k: usize) -> f64 {
        let n = lam.len();
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| lam[i]).product::<f64>())
            .sum()
    }

    #[test]
    fn sigma_k_examples() {
        assert_eq!(eval_sigma_k(&cv(&[1.0, 1.0, 1.0]), 2).unwrap(), 3.0);
        assert_eq!(eval_sigma_k(&cv(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0);
        assert_eq!(eval_sigma_k(&cv(&[1.0, 2.0, 3.0]), 1).unwrap(), 6.0);
        assert!(matches!(eval_sigma_k(&cv(&[1.0, 2.0]), 3), Err(Error::Parameter(_))));
        assert!(matches!(eval_sigma_k(&cv(&[1.0, 2.0]), 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn sigma_k_matches_subset_enumeration() {
        let mut rng = sampling::rng(7);
        for n in 1..=6 {
            for _ in 0..20 {
                let lam: Vec<f64> = (0..n).map(|_| sampling::normal(&mut rng)).collect();
                let e = elementary_symmetric(&lam);
                for (k, ek) in e.iter().enumerate() {
                    let b = brute_sigma(&lam, k);
                    assert!((ek - b).abs() <= 1e-12 * (1.0 + b.abs()), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn speed_examples() {
        let s2 = SpeedSpec::sigma_k_root(2, 2).unwrap();
        assert_eq!(eval_speed(&s2, &cv(&[1.0, 1.0])).unwrap(), 1.0);
        let h3 = SpeedSpec::harmonic_pairs(3).unwrap();
        let v = eval_speed(&h3, &cv(&[1.0, 1.0, 1.0])).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let s23 = SpeedSpec::sigma_k_root(2, 3).unwrap();
        let v = eval_speed(&s23, &cv(&[1.0, 2.0, 3.0])).unwrap();
        assert!((v - 11f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn speed_outside_cone_names_condition() {
        let h = SpeedSpec::harmonic_pairs(2).unwrap();
        match eval_speed(&h, &cv(&[0.0, -1.0])) {
            Err(Error::OutsideCone(Violation::PairSumNonPositive { i: 0, j: 1, .. })) => {}
            other => panic!("unexpected {other:?}"),
        }
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        match eval_speed(&s, &cv(&[1.0, 1.0, -0.5])) {
            Err(Error::OutsideCone(Violation::SigmaNonPositive { l: 2, .. })) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constructor_preconditions() {
        assert!(SpeedSpec::sigma_k_root(4, 3).is_err());
        assert!(SpeedSpec::harmonic_pairs(1).is_err());
        assert!(SpeedSpec::quotient(2, 2, 3).is_err());
        assert!(SpeedSpec::quotient(2, 0, 3).is_err());
        let f = vec![SpeedSpec::sigma_k_root(2, 3).unwrap(), SpeedSpec::harmonic_pairs(3).unwrap()];
        assert!(SpeedSpec::product(f.clone(), vec![0.5, 0.6]).is_err());
        assert!(SpeedSpec::product(f.clone(), vec![0.5]).is_err());
        assert!(SpeedSpec::product(f, vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn derivative_examples() {
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        let d = eval_derivatives(&s, &cv(&[1.0, 1.0, 1.0])).unwrap();
        for a in 0..3 {
            assert!((d.gradient[a] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let h = SpeedSpec::sigma_k_root(1, 4).unwrap();
        let d = eval_derivatives(&h, &cv(&[0.3, -0.1, 2.0, 5.0])).unwrap();
        assert!(d.gradient.iter().all(|&g| g == 1.0));
        assert!(d.hessian.iter().all(|&x| x == 0.0));
        let hp = SpeedSpec::harmonic_pairs(3).unwrap();
        let lam = cv(&[1.0, 1.0, 1.0]);
        let d = eval_derivatives(&hp, &lam).unwrap();
        let euler: f64 = d.gradient.iter().sum();
        assert!((euler - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_follow_input_order() {
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        let d = eval_derivatives(&s, &cv(&[3.0, 1.0, 2.0])).unwrap();
        // (H - lambda_i) / (2 sqrt(S_2)), H = 6, S_2 = 11
        let expect = [3.0, 5.0, 4.0].map(|x| x / (2.0 * 11f64.sqrt()));
        for (g, e) in d.gradient.iter().zip(expect) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let s = SpeedSpec::sigma_k_root(2, 2).unwrap();
        let lam = cv(&[1.0, 2.0]);
        let off = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let q = hessian_quadratic_form(&s, &lam, &off).unwrap();
        assert!((q + 1.0 / 2f64.sqrt()).abs() < 1e-14);

        let diag = DMatrix::identity(2, 2);
        let q = hessian_quadratic_form(&s, &lam, &diag).unwrap();
        let d = eval_derivatives(&s, &lam).unwrap();
        assert!((q - d.hessian.sum()).abs() < 1e-14);

        let h = SpeedSpec::sigma_k_root(1, 3).unwrap();
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, -1.0, 0.5, 3.0, 0.5, 4.0]);
        assert_eq!(hessian_quadratic_form(&h, &cv(&[0.5, 1.0, 2.0]), &t).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_form_rejects_degenerate_eigenvalues() {
        let s = SpeedSpec::sigma_k_root(2, 3).unwrap();
        let t = DMatrix::identity(3, 3);
        let err = hessian_quadratic_form(&s, &cv(&[1.0, 1.0, 2.0]), &t).unwrap_err();
        assert!(matches!(err, Error::DegenerateEigenvalues { i: 0, j: 1, .. }));
    }

    /// Second difference of `t -> gamma(eig(diag(lambda) + t T))`, independent
    /// of the divided-difference formula.
    fn matrix_second_difference(spec: &SpeedSpec, lam: &[f64], t: &DMatrix<f64>, h: f64) -> f64 {
        let n = lam.len();
        let f = |s: f64| {
            let a = DMatrix::from_diagonal(&DVector::from_column_slice(lam)) + t * s;
            let eig = a.symmetric_eigen();
            eval_speed(spec, &CurvatureVector::new(eig.eigenvalues.iter().copied().collect())).unwrap()
        };
        let _ = n;
        (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
    }

    #[test]
    fn quadratic_form_matches_matrix_function_second_difference() {
        let mut rng = sampling::rng(11);
        let specs = [
            SpeedSpec::sigma_k_root(2, 3).unwrap(),
            SpeedSpec::harmonic_pairs(3).unwrap(),
            SpeedSpec::quotient(3, 1, 3).unwrap(),
            SpeedSpec::sigma_k_root(3, 4).unwrap(),
        ];
        for spec in &specs {
            let n = spec.n();
            let mut done = 0;
            while done < 5 {
                let lam: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rand::Rng::random::<f64>(&mut rng)).collect();
                let lv = cv(&lam);
                if !spec.in_domain(&lv) {
                    continue;
                }
                let t = sampling::symmetric_matrix(&mut rng, n);
                let q = hessian_quadratic_form(spec, &lv, &t).unwrap();
                let fd = matrix_second_difference(spec, &lam, &t, 1e-4);
                assert!((q - fd).abs() <= 1e-5 * (1.0 + q.abs()), "{} q={q} fd={fd}", spec.label());
                done += 1;
            }
        }
    }
}
