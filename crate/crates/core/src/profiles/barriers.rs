//! Closed-form sub- and super-solutions of the profile equations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rhs::{harmonic_axis_slope, sigma_axis_slope};
use crate::binomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierName {
    V1,
    V2,
    V3,
    W1,
    W2,
    W3,
    W4,
    W5,
}

impl BarrierName {
    pub const ALL: [BarrierName; 8] = [
        BarrierName::V1,
        BarrierName::V2,
        BarrierName::V3,
        BarrierName::W1,
        BarrierName::W2,
        BarrierName::W3,
        BarrierName::W4,
        BarrierName::W5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BarrierName::V1 => "v1",
            BarrierName::V2 => "v2",
            BarrierName::V3 => "v3",
            BarrierName::W1 => "w1",
            BarrierName::W2 => "w2",
            BarrierName::W3 => "w3",
            BarrierName::W4 => "w4",
            BarrierName::W5 => "w5",
        }
    }

    /// True for the barriers of the sigma-k equation.
    pub fn is_sigma(self) -> bool {
        matches!(self, BarrierName::V1 | BarrierName::V2 | BarrierName::V3)
    }
}

impl fmt::Display for BarrierName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BarrierName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BarrierName::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parameter(format!("unknown barrier '{s}' (expected v1..v3 or w1..w5)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierRole {
    Sub,
    Super,
    LowerBound,
}

/// Validity interval `[0, end]` (or `[0, end)` when `open_end`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierDomain {
    pub end: f64,
    pub open_end: bool,
}

impl BarrierDomain {
    pub fn contains(&self, r: f64) -> bool {
        r >= 0.0 && if self.open_end { r < self.end } else { r <= self.end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Barrier {
    name: BarrierName,
    n: usize,
    k: Option<usize>,
    a: Option<f64>,
}

impl Barrier {
    /// `k` is required for the `v` family; `a` only applies to `w5` and defaults
    /// to `sqrt((n^2+n+2)/8)`.
    pub fn new(name: BarrierName, n: usize, k: Option<usize>, a: Option<f64>) -> Result<Self> {
        if name.is_sigma() {
            let k = k.ok_or_else(|| Error::Parameter(format!("barrier {name} needs k")))?;
            if n < 2 || k == 0 || k > n {
                return Err(Error::Parameter(format!(
                    "barrier {name} needs 1 <= k <= n and n >= 2, got k = {k}, n = {n}"
                )));
            }
            if name == BarrierName::V2 && k == n {
                return Err(Error::Parameter(format!(
                    "barrier v2 is not applicable for k = n = {n} (super-solution only for k <= n - 1)"
                )));
            }
            Ok(Barrier { name, n, k: Some(k), a: None })
        } else {
            if n < 3 {
                return Err(Error::Parameter(format!("barrier {name} needs n >= 3, got {n}")));
            }
            let a = match name {
                BarrierName::W5 => {
                    let a = a.unwrap_or_else(|| harmonic_axis_slope(n).sqrt());
                    if !(a > 0.0 && a.is_finite()) {
                        return Err(Error::Parameter(format!("barrier w5 needs a > 0, got {a}")));
                    }
                    Some(a)
                }
                _ => None,
            };
            Ok(Barrier { name, n, k: None, a })
        }
    }

    pub fn name(&self) -> BarrierName {
        self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn a(&self) -> Option<f64> {
        self.a
    }

    pub fn role(&self) -> BarrierRole {
        match self.name {
            BarrierName::V1 | BarrierName::W1 | BarrierName::W4 => BarrierRole::Sub,
            BarrierName::V2 | BarrierName::V3 | BarrierName::W2 | BarrierName::W3 => BarrierRole::Super,
            BarrierName::W5 => BarrierRole::LowerBound,
        }
    }

    /// Linear slope for the linear barriers, or the slope at the origin of `v3`/`w3`.
    pub fn slope(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.name {
            BarrierName::V1 | BarrierName::V3 => Some(sigma_axis_slope(self.k?, self.n)),
            BarrierName::V2 => Some(binomial(self.n - 1, self.k?).powf(-1.0 / self.k? as f64)),
            BarrierName::W1 | BarrierName::W3 => Some(harmonic_axis_slope(self.n)),
            BarrierName::W2 => Some((n * n + 5.0 * n + 2.0) / 12.0),
            BarrierName::W4 => {
                Some((n.powi(4) - 4.0 * n.powi(3) + 7.0 * n * n - 8.0 * n + 4.0).sqrt() / (2.0 * 6f64.sqrt()))
            }
            BarrierName::W5 => None,
        }
    }

    pub fn domain(&self) -> BarrierDomain {
        match self.name {
            BarrierName::V1 | BarrierName::V2 | BarrierName::W1 | BarrierName::W4 => {
                BarrierDomain { end: f64::INFINITY, open_end: true }
            }
            BarrierName::W2 => BarrierDomain { end: 1.0 / self.slope().unwrap_or(1.0), open_end: false },
            BarrierName::V3 | BarrierName::W3 => {
                BarrierDomain { end: 1.0 / self.slope().unwrap_or(1.0), open_end: true }
            }
            BarrierName::W5 => {
                let a = self.a.unwrap_or(1.0);
                BarrierDomain { end: 1.0 / (a * a), open_end: true }
            }
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let dom = self.domain();
        if !dom.contains(r) {
            return Err(Error::Domain(format!(
                "barrier {} (n = {}) is defined on [0, {}{}; r = {r} is outside (asymptote or endpoint at {})",
                self.name,
                self.n,
                dom.end,
                if dom.open_end { ")" } else { "]" },
                dom.end
            )));
        }
        Ok(match self.name {
            BarrierName::V3 | BarrierName::W3 => {
                let c = self.slope().unwrap_or(1.0);
                c * r / (1.0 - (c * r).powi(2)).sqrt()
            }
            BarrierName::W5 => {
                let a = self.a.unwrap_or(1.0);
                a * r.sqrt() / (1.0 - a * a * r).sqrt()
            }
            _ => self.slope().unwrap_or(0.0) * r,
        })
    }
}

impl fmt::Display for Barrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}", self.name, self.n)?;
        if let Some(k) = self.k {
            write!(f, ", k={k}")?;
        }
        if let Some(a) = self.a {
            write!(f, ", a={a}")?;
        }
        f.write_str(")")
    }
}
