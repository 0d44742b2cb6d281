//! Profile equations `u'' = F_{k,n}(r, u')` (sigma-k roots) and `u'' = G_n(r, u')`
//! (harmonic pairs), their barriers and closed forms, and the integrator.

mod barriers;
mod cylinder;
pub mod dopri;
mod rhs;

use serde::{Deserialize, Serialize};

pub use barriers::{Barrier, BarrierDomain, BarrierName, BarrierRole};
pub use cylinder::{adaptive_simpson, cyl_height, cyl_jet, cyl_min_height, solve_cyl_profile};
pub use rhs::{
    closed_form_cyl, closed_form_v, harmonic_asymptote, harmonic_axis_slope, harmonic_pole, leading_numerator, rhs_f,
    rhs_g, rhs_g_dw, sigma_axis_slope,
};

use crate::error::{Error, Result};
use crate::rotgeom::RadialJet;
use crate::speeds::{SpeedKind, SpeedSpec};
use dopri::{Flow, StepControl, Termination};

/// Slope beyond which the integration stops with `ProfileStatus::BlewUp` on step collapse.
const COLLAPSE_SLOPE: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
}

impl ProfileSample {
    pub fn jet(&self) -> RadialJet {
        RadialJet { r: self.r, u: self.u, du: self.du, ddu: self.ddu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileStatus {
    Completed,
    BlewUp,
    StepFailure,
}

impl ProfileStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileStatus::Completed => "completed",
            ProfileStatus::BlewUp => "blew_up",
            ProfileStatus::StepFailure => "step_failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub blowup_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub startup_radius: f64,
    pub r_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub blowup_threshold: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            startup_radius: 1e-4,
            r_max: 3.0,
            rtol: 1e-10,
            atol: 1e-14,
            blowup_threshold: 1e8,
            min_step: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

/// The profile equation selected by a speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileEquation {
    Sigma { k: usize, n: usize },
    Harmonic { n: usize },
}

impl ProfileEquation {
    pub fn for_speed(spec: &SpeedSpec) -> Result<Self> {
        let n = spec.n();
        match spec.kind() {
            SpeedKind::SigmaKRoot { k } if *k >= 2 => Ok(ProfileEquation::Sigma { k: *k, n }),
            SpeedKind::SigmaKRoot { k } => {
                Err(Error::Parameter(format!("profiles are integrated for k >= 2 only, got k = {k}")))
            }
            SpeedKind::HarmonicPairs if (3..=6).contains(&n) => Ok(ProfileEquation::Harmonic { n }),
            SpeedKind::HarmonicPairs => {
                Err(Error::Parameter(format!("harmonic-pairs profiles need n in 3..=6, got {n}")))
            }
            _ => Err(Error::Parameter(format!("no profile equation for speed {}", spec.label()))),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            ProfileEquation::Sigma { n, .. } | ProfileEquation::Harmonic { n } => n,
        }
    }

    /// The slope `c` of the unique `C^2` start `u' = c r` at the axis.
    pub fn startup_slope(&self) -> f64 {
        match *self {
            ProfileEquation::Sigma { k, n } => sigma_axis_slope(k, n),
            ProfileEquation::Harmonic { n } => harmonic_axis_slope(n),
        }
    }

    pub fn rhs(&self, r: f64, v: f64) -> Result<f64> {
        match *self {
            ProfileEquation::Sigma { k, n } => rhs_f(k, n, r, v),
            ProfileEquation::Harmonic { n } => rhs_g(n, r, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSolution {
    pub n: usize,
    pub speed: SpeedSpec,
    pub samples: Vec<ProfileSample>,
    pub startup_slope: f64,
    pub startup_radius: f64,
    pub blowup_radius: Option<f64>,
    /// Width of the interval known to contain the blow-up point.
    pub blowup_error: Option<f64>,
    pub status: ProfileStatus,
    pub tolerances: Tolerances,
    pub diagnostics: Option<String>,
}

impl ProfileSolution {
    /// Checks that radii are finite and strictly increasing.
    pub fn validate_samples(samples: &[ProfileSample]) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::Parameter("a profile needs at least one sample".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if ![s.r, s.u, s.du, s.ddu].iter().all(|v| v.is_finite()) {
                return Err(Error::Parameter(format!("sample {i} has a non-finite entry")));
            }
            if i > 0 && s.r <= samples[i - 1].r {
                return Err(Error::Parameter(format!("radii are not strictly increasing at sample {i}")));
            }
        }
        Ok(())
    }

    pub fn first_radius(&self) -> f64 {
        self.samples[0].r
    }

    pub fn last_radius(&self) -> f64 {
        self.samples[self.samples.len() - 1].r
    }

    /// `u'(r)` by cubic Hermite interpolation on `(u', u'')`; `None` outside the sampled range.
    pub fn slope_at(&self, r: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() || r < s[0].r || r > s[s.len() - 1].r {
            return None;
        }
        let i = s.partition_point(|p| p.r <= r).clamp(1, s.len().max(2) - 1);
        if s.len() == 1 {
            return Some(s[0].du);
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let h = b.r - a.r;
        let t = (r - a.r) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        Some(h00 * a.du + h10 * h * a.ddu + h01 * b.du + h11 * h * b.ddu)
    }

    /// The exact `n = k = 2` profile `u' = sqrt(e^{r^2} - 1)` sampled at `radii`,
    /// with `u` from quadrature.
    pub fn sigma2_closed_form(radii: &[f64]) -> Result<Self> {
        let speed = SpeedSpec::sigma_k_root(2, 2)?;
        let mut samples = Vec::with_capacity(radii.len());
        let mut u = 0.0;
        let mut prev = 0.0;
        for &r in radii {
            if !(r > 0.0) {
                return Err(Error::Domain(format!("closed-form radii must be positive, got {r}")));
            }
            u += adaptive_simpson(|s| closed_form_v(0.0, s, 1.0).unwrap_or(f64::NAN), prev, r, 1e-14);
            prev = r;
            let du = closed_form_v(0.0, r, 1.0)?;
            samples.push(ProfileSample { r, u, du, ddu: rhs_f(2, 2, r, du)? });
        }
        Self::validate_samples(&samples)?;
        Ok(ProfileSolution {
            n: 2,
            speed,
            startup_radius: samples[0].r,
            samples,
            startup_slope: 1.0,
            blowup_radius: None,
            blowup_error: None,
            status: ProfileStatus::Completed,
            tolerances: Tolerances { rtol: 0.0, atol: 0.0, blowup_threshold: f64::INFINITY },
            diagnostics: Some("closed form".into()),
        })
    }
}

/// Integrates the profile equation of `spec` from the axis.
///
/// The run starts at `r = eps` with `u' = c eps`, `u = c eps^2/2` where `c` is the
/// startup slope, and stops at `r_max`, when `u'` exceeds the blow-up threshold, or
/// when the step size collapses.
pub fn integrate_profile(spec: &SpeedSpec, opts: &ProfileOptions) -> Result<ProfileSolution> {
    let eq = ProfileEquation::for_speed(spec)?;
    let eps = opts.startup_radius;
    if !(eps > 0.0) || !(opts.r_max > eps) {
        return Err(Error::Parameter(format!("need 0 < startup radius < r_max, got {eps} and {}", opts.r_max)));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0 && opts.blowup_threshold > 0.0) {
        return Err(Error::Parameter("tolerances must be positive".into()));
    }
    let c = eq.startup_slope();
    let ctl = StepControl {
        rtol: opts.rtol,
        atol: opts.atol,
        min_step: opts.min_step,
        max_step: f64::INFINITY,
        max_steps: opts.max_steps,
    };
    let mut samples = Vec::new();
    let mut over_threshold = false;
    let outcome = dopri::integrate(
        |r, y: &[f64; 2]| Ok([y[1], eq.rhs(r, y[1])?]),
        eps,
        [0.5 * c * eps * eps, c * eps],
        opts.r_max,
        &ctl,
        |r, y, dy| {
            samples.push(ProfileSample { r, u: y[0], du: y[1], ddu: dy[1] });
            if y[1] > opts.blowup_threshold {
                over_threshold = true;
                Flow::Halt
            } else {
                Flow::Continue
            }
        },
    )?;
    let last = samples[samples.len() - 1];
    let (status, blowup_radius, blowup_error, diagnostics) = match outcome.termination {
        Termination::Reached => (ProfileStatus::Completed, None, None, None),
        Termination::Halted if over_threshold => (
            ProfileStatus::BlewUp,
            Some(last.r),
            Some(outcome.last_step),
            Some(format!("slope {:e} exceeded the threshold {:e}", last.du, opts.blowup_threshold)),
        ),
        Termination::Halted => (ProfileStatus::StepFailure, None, None, Some("halted".into())),
        Termination::StepUnderflow { t, h, reason } if last.du > COLLAPSE_SLOPE => (
            ProfileStatus::BlewUp,
            Some(last.r),
            Some(h),
            Some(format!("step collapsed at r = {t} with slope {:e}: {reason}", last.du)),
        ),
        Termination::StepUnderflow { t, h, reason } => (
            ProfileStatus::StepFailure,
            None,
            None,
            Some(format!("step size {h:e} underflowed at r = {t} (slope {:e}): {reason}", last.du)),
        ),
        Termination::TooManySteps => (
            ProfileStatus::StepFailure,
            None,
            None,
            Some(format!("step budget {} exhausted at r = {}", opts.max_steps, outcome.t)),
        ),
    };
    Ok(ProfileSolution {
        n: eq.n(),
        speed: spec.clone(),
        samples,
        startup_slope: c,
        startup_radius: eps,
        blowup_radius,
        blowup_error,
        status,
        tolerances: Tolerances { rtol: opts.rtol, atol: opts.atol, blowup_threshold: opts.blowup_threshold },
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(k: usize, n: usize) -> SpeedSpec {
        SpeedSpec::sigma_k_root(k, n).unwrap()
    }

    fn run(spec: &SpeedSpec, opts: ProfileOptions) -> ProfileSolution {
        integrate_profile(spec, &opts).unwrap()
    }

    #[test]
    fn sigma2_plane_matches_closed_form() {
        let p = run(&sigma(2, 2), ProfileOptions::default());
        assert_eq!(p.status, ProfileStatus::Completed);
        assert_eq!(p.first_radius(), 1e-4);
        assert_eq!(p.last_radius(), 3.0);
        let worst = p.samples.iter().map(|s| (s.du - closed_form_v(0.0, s.r, 1.0).unwrap()).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{worst}");
    }

    #[test]
    fn samples_are_increasing_and_convex() {
        for spec in [sigma(2, 3), sigma(3, 5), SpeedSpec::harmonic_pairs(4).unwrap()] {
            let p = run(&spec, ProfileOptions { r_max: 2.0, ..Default::default() });
            assert!(p.samples.windows(2).all(|w| w[1].r > w[0].r && w[1].du > w[0].du));
            assert!(p.samples.iter().all(|s| s.ddu >= 0.0));
            let s0 = p.samples[0];
            let expected = p.startup_slope * s0.r * s0.r / 2.0;
            assert!((s0.u - expected).abs() <= 1e-6 * expected);
        }
    }

    #[test]
    fn startup_radius_sensitivity() {
        for spec in [sigma(2, 3), sigma(2, 2), SpeedSpec::harmonic_pairs(3).unwrap()] {
            let at_one: Vec<f64> = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&eps| {
                    let p = run(&spec, ProfileOptions { startup_radius: eps, r_max: 1.0, ..Default::default() });
                    p.samples.last().unwrap().du
                })
                .collect();
            for w in at_one.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-7, "{}: {:?}", spec.label(), at_one);
            }
        }
    }

    #[test]
    fn halving_the_tolerance_barely_moves_the_end_slope() {
        for spec in [sigma(2, 2), sigma(2, 4), SpeedSpec::harmonic_pairs(5).unwrap()] {
            let a = run(&spec, ProfileOptions::default());
            let b = run(&spec, ProfileOptions { rtol: 0.5e-10, ..Default::default() });
            let (va, vb) = (a.samples.last().unwrap().du, b.samples.last().unwrap().du);
            assert!((va - vb).abs() <= 10.0 * 1e-10 * va.abs(), "{}: {va} vs {vb}", spec.label());
        }
    }

    #[test]
    fn negative_branch_is_the_mirror_image() {
        // v' = -F_{2,2}(r, -v) for v < 0, started on v_{-,a}
        let a = 0.3;
        let r0 = 0.5;
        let out = dopri::integrate(
            |r, y: &[f64; 1]| Ok([-rhs_f(2, 2, r, -y[0])?]),
            r0,
            [closed_form_v(a, r0, -1.0).unwrap()],
            2.5,
            &StepControl::default(),
            |r, y, _| {
                let exact = closed_form_v(a, r, -1.0).unwrap();
                assert!((y[0] - exact).abs() <= 1e-8 * exact.abs(), "r={r}");
                Flow::Continue
            },
        )
        .unwrap();
        assert_eq!(out.termination, Termination::Reached);
    }

    #[test]
    fn sigma_profiles_stay_between_linear_barriers() {
        for n in 3..=5 {
            for k in 2..n {
                let p = run(&sigma(k, n), ProfileOptions::default());
                let v1 = Barrier::new(BarrierName::V1, n, Some(k), None).unwrap();
                let v2 = Barrier::new(BarrierName::V2, n, Some(k), None).unwrap();
                for s in &p.samples {
                    assert!(v1.eval(s.r).unwrap() <= s.du * (1.0 + 1e-9));
                    assert!(s.du <= v2.eval(s.r).unwrap() * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn harmonic_ratio_stays_below_n() {
        for n in 3..=6 {
            let p = run(&SpeedSpec::harmonic_pairs(n).unwrap(), ProfileOptions::default());
            assert!(p.samples.iter().all(|s| s.du / s.r < n as f64), "n={n}");
        }
    }

    #[test]
    fn slope_interpolation() {
        let p = run(&sigma(2, 2), ProfileOptions::default());
        for &r in &[0.01, 0.5, 1.234, 2.9] {
            let v = p.slope_at(r).unwrap();
            let exact = closed_form_v(0.0, r, 1.0).unwrap();
            assert!((v - exact).abs() <= 1e-7 * exact.max(1.0), "r={r}: {v} vs {exact}");
        }
        assert!(p.slope_at(5.0).is_none());
    }

    #[test]
    fn closed_form_profile() {
        let p = ProfileSolution::sigma2_closed_form(&[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(p.samples.len(), 3);
        assert!((p.samples[1].du - 1.31083).abs() < 1e-5);
        assert!(ProfileSolution::sigma2_closed_form(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn rejected_speeds_and_options() {
        assert!(integrate_profile(&sigma(1, 3), &ProfileOptions::default()).is_err());
        assert!(integrate_profile(&SpeedSpec::harmonic_pairs(7).unwrap(), &ProfileOptions::default()).is_err());
        assert!(integrate_profile(&SpeedSpec::quotient(2, 1, 3).unwrap(), &ProfileOptions::default()).is_err());
        let bad = ProfileOptions { startup_radius: 0.0, ..Default::default() };
        assert!(integrate_profile(&sigma(2, 3), &bad).is_err());
    }
}
