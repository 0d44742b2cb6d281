//! Rotationally symmetric translating solitons of concave, 1-homogeneous
//! curvature flows.
//!
//! The crate is organised bottom-up:
//!
//! - [`speeds`]: curvature speeds `gamma(lambda)`, their derivatives and a
//!   sampled property suite.
//! - [`cones`]: membership in the Garding cones, the 2-convex cone, the pinching
//!   cone `Gamma_{alpha,delta}` and uniform 2-convexity.
//! - [`rotgeom`]: principal curvatures of rotational graphs and cylinders and
//!   the translator residual `gamma(lambda) - <nu, e_{n+1}>`.
//! - [`profiles`]: profile ODE right-hand sides, closed forms, barriers and
//!   an adaptive Dormand-Prince integrator with a singular start at the axis.
//! - [`picard`]: the integral operator of the existence argument and a
//!   barrier-clamped Picard iteration on a uniform grid.
//! - [`verifier`]: residual sweeps, barrier orderings, the convexity estimate
//!   `lambda_1 >= H - alpha * gamma` and pinching constant estimates.
//! - [`io`]: the profile CSV schema and its JSON metadata sidecar.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cones;
pub mod error;
pub mod io;
pub mod picard;
pub mod profiles;
pub mod rotgeom;
pub mod sampling;
pub mod speeds;
pub mod verifier;

pub use cones::{ConeKind, ConeSpec, Membership, Violation};
pub use error::{Error, Result};
pub use picard::{GridFunction, PicardSolution};
pub use profiles::{Barrier, BarrierName, BarrierRole, ProfileSample, ProfileSolution, ProfileStatus};
pub use rotgeom::{CylJet, RadialJet};
pub use speeds::{CurvatureVector, SpeedDerivatives, SpeedKind, SpeedSpec};
pub use verifier::{CheckEntry, CheckStatus, VerificationReport};

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
