//! Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step control.

use crate::error::Result;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-14, min_step: 1e-14, max_step: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// Returned by the step observer to continue or halt the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Halt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Reached,
    Halted,
    StepUnderflow { t: f64, h: f64, reason: String },
    TooManySteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    /// Width of the last step attempted when the run stopped early.
    pub last_step: f64,
    pub termination: Termination,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], ctl: &StepControl) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = ctl.atol + ctl.rtol * y0[i].abs().max(y1[i].abs());
        sum += (err[i] / sc).powi(2);
    }
    (sum / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `observe(t, y, dy)` is called on the initial point and after every accepted step;
/// returning [`Flow::Halt`] stops the run. A failing right-hand side inside a step is
/// treated as a rejected step with a strong reduction.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], &[f64; N]) -> Flow,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut out = Outcome { t, y, accepted: 0, rejected: 0, last_step: 0.0, termination: Termination::Reached };
    if observe(t, &y, &k1) == Flow::Halt {
        out.termination = Termination::Halted;
        return Ok(out);
    }

    let span = t_end - t0;
    let mut h = {
        let scale: Vec<f64> = y.iter().map(|v| ctl.atol + ctl.rtol * v.abs()).collect();
        let d0 = (y.iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let d1 = (k1.iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        guess.min(span).min(ctl.max_step)
    };

    while t < t_end {
        if out.accepted + out.rejected >= ctl.max_steps {
            out.termination = Termination::TooManySteps;
            break;
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h < ctl.min_step && !last {
            out.termination = Termination::StepUnderflow { t, h, reason: "step size fell below the minimum".into() };
            break;
        }

        let stages = (|| -> Result<_> {
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + h, &y1)?;
            let err = axpy(&[0.0; N], h, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
            Ok((y1, k7, err))
        })();

        let (y1, k7, err) = match stages {
            Ok(s) => s,
            Err(e) => {
                out.rejected += 1;
                out.last_step = h;
                if h * 0.25 < ctl.min_step {
                    out.termination = Termination::StepUnderflow { t, h, reason: e.to_string() };
                    break;
                }
                h *= 0.25;
                continue;
            }
        };
        let en = error_norm(&err, &y, &y1, ctl);
        if !en.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            out.rejected += 1;
            out.last_step = h;
            h *= 0.25;
            continue;
        }
        if en <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y1;
            k1 = k7;
            out.accepted += 1;
            out.last_step = h;
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(ctl.max_step);
            if observe(t, &y, &k1) == Flow::Halt {
                out.termination = Termination::Halted;
                break;
            }
        } else {
            out.rejected += 1;
            out.last_step = h;
            h *= (0.9 * en.powf(-0.2)).max(0.2);
        }
    }
    out.t = t;
    out.y = y;
    Ok(out)
}
