//! Pointwise verification of computed profiles: translator residuals, barrier
//! orderings, the convexity estimate and sampled pinching constants.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cones::{ConeSpec, Membership};
use crate::error::{Error, Result};
use crate::io::ProfileMetadata;
use crate::profiles::{cyl_jet, harmonic_asymptote, Barrier, BarrierName, ProfileSolution, ProfileStatus};
use crate::rotgeom::{cylinder_curvatures, cylinder_normal_component, graph_curvatures, soliton_residual, tilt};
use crate::sampling;
use crate::speeds::{eval_derivatives, eval_speed, hessian_quadratic_form, CurvatureVector, SpeedKind, SpeedSpec};

/// Slack allowed in the convexity estimate.
pub const CONVEXITY_TOL: f64 = 1e-10;
/// Relative tolerance of barrier orderings.
pub const BARRIER_TOL: f64 = 1e-9;
/// Tolerance on the cylinder residual.
pub const CYLINDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub tolerance: f64,
    /// Largest violation seen; `None` when the check was skipped.
    pub worst_violation: Option<f64>,
    pub witness: Option<Value>,
    pub details: Value,
}

impl CheckEntry {
    fn judged(name: impl Into<String>, tolerance: f64, worst: f64, witness: Option<Value>, details: Value) -> Self {
        let status = if worst <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckEntry { name: name.into(), status, tolerance, worst_violation: Some(worst), witness, details }
    }

    fn skipped(name: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            status: CheckStatus::Skipped,
            tolerance,
            worst_violation: None,
            witness: None,
            details: json!({ "reason": reason.into() }),
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, witness: Value, details: Value) -> Self {
        CheckEntry {
            name: name.into(),
            status: CheckStatus::Fail,
            tolerance,
            worst_violation: Some(f64::INFINITY),
            witness: Some(witness),
            details,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub profile: Option<ProfileMetadata>,
    pub checks: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new(profile: Option<&ProfileSolution>) -> Self {
        VerificationReport { profile: profile.map(ProfileMetadata::of), checks: Vec::new() }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.checks.push(entry);
    }

    /// No check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&CheckEntry> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }
}

fn lambda_json(lambda: &CurvatureVector) -> Value {
    json!(lambda.as_slice())
}

/// Largest `|gamma(lambda) - <nu, e_{n+1}>|` over the samples.
pub fn check_soliton(profile: &ProfileSolution, tol: f64) -> CheckEntry {
    const NAME: &str = "soliton";
    if profile.status == ProfileStatus::StepFailure {
        return CheckEntry::skipped(NAME, tol, "profile integration ended with a step failure");
    }
    let mut worst = 0.0;
    let mut witness = None;
    for s in &profile.samples {
        let lambda = match graph_curvatures(&s.jet(), profile.n) {
            Ok(l) => l,
            Err(e) => return CheckEntry::failed(NAME, tol, json!({ "r": s.r }), json!({ "error": e.to_string() })),
        };
        let normal = tilt(s.du);
        match soliton_residual(&profile.speed, &lambda, normal) {
            Ok(res) if res.abs() > worst || witness.is_none() => {
                worst = res.abs();
                witness = Some(json!({ "r": s.r, "lambda": lambda_json(&lambda), "tilt": normal, "residual": res }));
            }
            Ok(_) => {}
            Err(e) => {
                return CheckEntry::failed(
                    NAME,
                    tol,
                    json!({ "r": s.r, "lambda": lambda_json(&lambda) }),
                    json!({ "error": e.to_string() }),
                )
            }
        }
    }
    CheckEntry::judged(NAME, tol, worst, witness, json!({ "samples": profile.samples.len() }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityConstants {
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
}

/// `alpha = 1.05 sup (delta+1) H/gamma` and `beta = 0.9 inf (min pair sum)/H` over samples in the cone.
pub fn fit_convexity_constants(profile: &ProfileSolution, delta: f64) -> Result<ConvexityConstants> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let mut sup_ratio = f64::NEG_INFINITY;
    let mut inf_pairs = f64::INFINITY;
    for s in &profile.samples {
        let lambda = graph_curvatures(&s.jet(), profile.n)?;
        let Ok(gamma) = eval_speed(&profile.speed, &lambda) else { continue };
        let h = lambda.mean_curvature();
        if h <= 0.0 {
            continue;
        }
        sup_ratio = sup_ratio.max((delta + 1.0) * h / gamma);
        if let Some((_, _, pair)) = lambda.min_pair_sum() {
            inf_pairs = inf_pairs.min(pair / h);
        }
    }
    if !sup_ratio.is_finite() || !inf_pairs.is_finite() {
        return Err(Error::Parameter("no profile sample lies in the cone of the speed".into()));
    }
    let beta = 0.9 * inf_pairs;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Parameter(format!("fitted beta = {beta} is outside (0, 1)")));
    }
    Ok(ConvexityConstants { alpha: 1.05 * sup_ratio, delta, beta })
}

/// Tests `lambda_1 >= H - alpha gamma` on the samples satisfying
/// `(delta+1) H <= alpha gamma` and `lambda_i + lambda_j >= beta H`.
pub fn check_convexity_estimate(profile: &ProfileSolution, alpha: f64, delta: f64, beta: f64) -> CheckEntry {
    const NAME: &str = "convexity";
    let mut admissible = 0usize;
    let mut min_slack = f64::INFINITY;
    let mut witness = None;
    for s in &profile.samples {
        let Ok(lambda) = graph_curvatures(&s.jet(), profile.n) else { continue };
        let Ok(gamma) = eval_speed(&profile.speed, &lambda) else { continue };
        let h = lambda.mean_curvature();
        let pinched = (delta + 1.0) * h <= alpha * gamma;
        let uniform = lambda.min_pair_sum().is_some_and(|(_, _, p)| p >= beta * h);
        if !(pinched && uniform) {
            continue;
        }
        admissible += 1;
        let slack = lambda.min() - (h - alpha * gamma);
        if slack < min_slack {
            min_slack = slack;
            witness = Some(json!({ "r": s.r, "lambda": lambda_json(&lambda), "gamma": gamma, "slack": slack }));
        }
    }
    let details = json!({
        "alpha": alpha,
        "delta": delta,
        "beta": beta,
        "admissible": admissible,
        "samples": profile.samples.len(),
        "admissible_fraction": admissible as f64 / profile.samples.len().max(1) as f64,
        "min_slack": if admissible > 0 { Some(min_slack) } else { None },
    });
    if admissible == 0 {
        let mut entry = CheckEntry::skipped(NAME, CONVEXITY_TOL, "no sample satisfies both hypotheses");
        entry.details["alpha"] = json!(alpha);
        entry.details["delta"] = json!(delta);
        entry.details["beta"] = json!(beta);
        return entry;
    }
    CheckEntry::judged(NAME, CONVEXITY_TOL, (-min_slack).max(0.0), witness, details)
}

struct Ordering<'a> {
    name: String,
    barrier: Barrier,
    lower: bool,
    window: (f64, f64),
    samples: &'a ProfileSolution,
}

impl Ordering<'_> {
    fn run(self) -> CheckEntry {
        let mut worst: f64 = 0.0;
        let mut witness = None;
        let mut checked = 0usize;
        for s in &self.samples.samples {
            if s.r < self.window.0 || s.r > self.window.1 || !self.barrier.domain().contains(s.r) {
                continue;
            }
            let Ok(b) = self.barrier.eval(s.r) else { continue };
            checked += 1;
            let excess = if self.lower { b - s.du } else { s.du - b };
            let rel = excess / b.abs().max(f64::MIN_POSITIVE);
            if rel > worst || witness.is_none() {
                worst = worst.max(rel);
                witness = Some(json!({ "r": s.r, "du": s.du, "barrier": b }));
            }
        }
        if checked == 0 {
            return CheckEntry::skipped(self.name, BARRIER_TOL, "no sample in the barrier's domain");
        }
        let details = json!({
            "barrier": self.barrier.to_string(),
            "role": self.barrier.role(),
            "from": self.window.0,
            "to": self.window.1,
            "samples": checked,
        });
        CheckEntry::judged(self.name, BARRIER_TOL, worst, witness, details)
    }
}

/// Radius at which the harmonic profile is expected to blow up: the detected one, else `8/(n^2+n+2)`.
pub fn blowup_reference(profile: &ProfileSolution) -> f64 {
    profile.blowup_radius.unwrap_or_else(|| harmonic_asymptote(profile.n))
}

/// Pointwise barrier orderings for the profile's equation.
pub fn check_barriers(profile: &ProfileSolution) -> Result<Vec<CheckEntry>> {
    let n = profile.n;
    let all = (0.0, f64::INFINITY);
    let mut out = Vec::new();
    match profile.speed.kind() {
        SpeedKind::SigmaKRoot { k } => {
            let k = *k;
            out.push(
                Ordering {
                    name: "v1 <= du".into(),
                    barrier: Barrier::new(BarrierName::V1, n, Some(k), None)?,
                    lower: true,
                    window: all,
                    samples: profile,
                }
                .run(),
            );
            match Barrier::new(BarrierName::V2, n, Some(k), None) {
                Ok(v2) => out.push(
                    Ordering { name: "du <= v2".into(), barrier: v2, lower: false, window: all, samples: profile }
                        .run(),
                ),
                Err(_) => out.push(CheckEntry::skipped(
                    "du <= v2",
                    BARRIER_TOL,
                    format!("not applicable: v2 is a super-solution only for k <= n - 1 (k = {k}, n = {n})"),
                )),
            }
        }
        SpeedKind::HarmonicPairs => {
            let rb = blowup_reference(profile);
            let checks = [
                ("w1 <= du", BarrierName::W1, true, all),
                ("du <= w2", BarrierName::W2, false, all),
                ("du <= w3", BarrierName::W3, false, all),
                ("w5 <= du near blow-up", BarrierName::W5, true, (0.9 * rb, rb)),
                ("du <= w3 near blow-up", BarrierName::W3, false, (0.9 * rb, rb)),
            ];
            for (name, b, lower, window) in checks {
                let barrier = Barrier::new(b, n, None, None)?;
                out.push(Ordering { name: name.into(), barrier, lower, window, samples: profile }.run());
            }
        }
        _ => return Err(Error::Parameter(format!("no barriers for speed {}", profile.speed.label()))),
    }
    Ok(out)
}

/// The surface-of-revolution translator with `a = 0`: `H < 0`, `K > 0` and
/// `|sqrt(lambda_1 lambda_2) - |<nu, e_3>|| <= 1e-9` at each height.
///
/// `gamma` is evaluated at `-lambda`: with the normal making both curvatures negative
/// the vector lies outside the positive cone, and flipping the normal is the orientation
/// in which `gamma > 0`.
pub fn check_sigma2_cylinder(z_samples: &[f64]) -> Result<CheckEntry> {
    const NAME: &str = "cylinder";
    let spec = SpeedSpec::sigma_k_root(2, 2)?;
    let mut worst: f64 = 0.0;
    let mut witness = None;
    let mut skipped = Vec::new();
    let mut checked = 0usize;
    let mut max_h = f64::NEG_INFINITY;
    let mut min_k = f64::INFINITY;
    for &z in z_samples {
        let jet = match cyl_jet(0.0, z) {
            Ok(j) => j,
            Err(_) => {
                skipped.push(z);
                continue;
            }
        };
        checked += 1;
        let lambda = cylinder_curvatures(&jet)?;
        let (l1, l2) = (lambda.as_slice()[0], lambda.as_slice()[1]);
        let (h, k) = (l1 + l2, l1 * l2);
        max_h = max_h.max(h);
        min_k = min_k.min(k);
        let normal = cylinder_normal_component(jet.dr);
        let at = json!({ "z": z, "r": jet.r, "lambda": [l1, l2], "H": h, "K": k });
        if !(h < 0.0 && k > 0.0) {
            return Ok(CheckEntry::failed(
                NAME,
                CYLINDER_TOL,
                at,
                json!({ "error": "sign condition H < 0, K > 0 fails" }),
            ));
        }
        let res = soliton_residual(&spec, &lambda.scaled(-1.0), normal)?.abs();
        if res > worst || witness.is_none() {
            worst = worst.max(res);
            witness = Some(at);
        }
    }
    if checked == 0 {
        return Ok(CheckEntry::skipped(NAME, CYLINDER_TOL, "no height lies in the solvable range"));
    }
    let details = json!({
        "samples": checked,
        "skipped_z": skipped,
        "max_H": max_h,
        "min_K": min_k,
        "orientation": "gamma evaluated at -lambda; residual compares with |<nu, e_3>|",
    });
    Ok(CheckEntry::judged(NAME, CYLINDER_TOL, worst, witness, details))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchingEstimate {
    /// Sampled `max_a gamma^a / min_a gamma^a`.
    pub gradient_ratio: f64,
    /// Sampled sup of `D^2 gamma(T, T) H / |T|^2` over random symmetric `T`.
    pub hessian_sup: f64,
    /// Sampled sup of `d/ds gamma(diag(lambda) + s B)` at `s = 0` over `tr B`, for
    /// 2-nonnegative `B` whose eigenvalues lie in the speed's cone.
    pub trace_constant: f64,
    pub accepted: usize,
    pub rejected: usize,
}

/// Samples unit curvature vectors in `cone` and records the gradient pinching ratio,
/// the normalized second-derivative supremum and a spot estimate of the trace constant.
pub fn estimate_pinching_constants(
    spec: &SpeedSpec,
    cone: &ConeSpec,
    samples: usize,
    seed: u64,
) -> Result<PinchingEstimate> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let n = spec.n();
    if cone.n() != n {
        return Err(Error::Parameter(format!("cone has n = {}, speed has n = {n}", cone.n())));
    }
    let mut rng = sampling::rng(seed);
    let mut est = PinchingEstimate {
        gradient_ratio: 1.0,
        hessian_sup: f64::NEG_INFINITY,
        trace_constant: f64::NEG_INFINITY,
        accepted: 0,
        rejected: 0,
    };
    for _ in 0..samples {
        let lambda = CurvatureVector::new(sampling::unit_vector(&mut rng, n));
        let t = sampling::symmetric_matrix(&mut rng, n);
        if !spec.in_domain(&lambda) || cone.contains(&lambda)? != Membership::Inside {
            est.rejected += 1;
            continue;
        }
        let d = eval_derivatives(spec, &lambda)?;
        let g: &DVector<f64> = &d.gradient;
        let form = match hessian_quadratic_form(spec, &lambda, &t) {
            Ok(v) => v,
            Err(Error::DegenerateEigenvalues { .. }) => {
                est.rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        est.accepted += 1;
        est.gradient_ratio = est.gradient_ratio.max(g.max() / g.min());
        est.hessian_sup = est.hessian_sup.max(form * lambda.mean_curvature() / t.norm_squared());
        let b = two_nonnegative(&t);
        let eig = b.clone().symmetric_eigenvalues();
        if b.trace() > 0.0 && spec.in_domain(&CurvatureVector::new(eig.as_slice().to_vec())) {
            // first-order perturbation of the eigenvalues of diag(lambda) + s B
            let slope: f64 = (0..n).map(|a| g[a] * b[(a, a)]).sum();
            est.trace_constant = est.trace_constant.max(slope / b.trace());
        }
    }
    if est.accepted == 0 {
        return Err(Error::EmptyCone { samples, what: "pinching estimate".into() });
    }
    Ok(est)
}

/// Shifts `t` by a multiple of the identity so that its two smallest eigenvalues sum to
/// at least zero. The shift is zero when `t` is already 2-nonnegative.
fn two_nonnegative(t: &DMatrix<f64>) -> DMatrix<f64> {
    let n = t.nrows();
    let mut eig: Vec<f64> = t.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let mu = if n >= 2 { (-(eig[0] + eig[1]) / 2.0).max(0.0) } else { (-eig[0]).max(0.0) };
    t + DMatrix::identity(n, n) * mu
}

/// Runs every applicable check on a profile.
pub fn verify_profile(profile: &ProfileSolution, soliton_tol: f64, delta: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(Some(profile));
    report.push(check_soliton(profile, soliton_tol));
    for entry in check_barriers(profile)? {
        report.push(entry);
    }
    let c = fit_convexity_constants(profile, delta)?;
    report.push(check_convexity_estimate(profile, c.alpha, c.delta, c.beta));
    Ok(report)
}
