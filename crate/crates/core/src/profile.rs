//! Band profiles for the prescribed function `h` of condition (iv).
//!
//! Condition (iv) asks for `h` on a band with `h → +∞` at one end, `h → −∞` at
//! the other and `|h′| ≤ ε + c·h²`. The profile
//!
//! ```text
//! h(t) = √(ε/c) · tan(π/L · (L/2 − t)),   0 < t < L,
//! ```
//!
//! with `L = π/√(εc)` solves `h′ = −(ε + c·h²)` exactly, so the inequality
//! holds with equality and `L` is the shortest band that admits such an `h`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Fraction of the band excluded at each end when sampling, since `h` has
/// poles at both endpoints.
pub const DEFAULT_CLEARANCE: f64 = 1e-3;

/// Relative tolerance for the profile inequality.
pub const PROFILE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HProfile {
    eps: f64,
    c: f64,
    length: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} = {v} must be positive and finite")))
    }
}

/// Tangent profile saturating `|h′| = ε + c·h²` on the band `(0, π/√(εc))`.
pub fn synthesize(eps: f64, c: f64) -> Result<HProfile> {
    check_positive("eps", eps)?;
    check_positive("c", c)?;
    Ok(HProfile { eps, c, length: PI / (eps * c).sqrt() })
}

impl HProfile {
    /// Tangent profile squeezed onto a band of the given length. Only the
    /// band `π/√(εc)` satisfies the inequality; other lengths are useful to
    /// exercise the verifier.
    pub fn with_length(eps: f64, c: f64, length: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("c", c)?;
        check_positive("length", length)?;
        Ok(HProfile { eps, c, length })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    fn amplitude(&self) -> f64 {
        (self.eps / self.c).sqrt()
    }

    fn frequency(&self) -> f64 {
        PI / self.length
    }

    pub fn h(&self, t: f64) -> f64 {
        self.amplitude() * (self.frequency() * (self.length / 2.0 - t)).tan()
    }

    pub fn dh(&self, t: f64) -> f64 {
        let tan = (self.frequency() * (self.length / 2.0 - t)).tan();
        -self.amplitude() * self.frequency() * (1.0 + tan * tan)
    }

    /// Right side `ε + c·h²` of the profile inequality.
    pub fn bound(&self, t: f64) -> f64 {
        let h = self.h(t);
        self.eps + self.c * h * h
    }

    /// `samples` equally spaced points in `[δL, (1 − δ)L]` for clearance `δ`.
    pub fn sample_points(&self, samples: usize, clearance: f64) -> Result<Vec<f64>> {
        if samples < 2 {
            return Err(Error::InvalidInput(format!("samples = {samples} < 2")));
        }
        if !(0.0..0.5).contains(&clearance) {
            return Err(Error::InvalidInput(format!("clearance {clearance} outside [0, 1/2)")));
        }
        let lo = clearance * self.length;
        let hi = (1.0 - clearance) * self.length;
        let step = (hi - lo) / (samples - 1) as f64;
        Ok((0..samples).map(|k| lo + step * k as f64).collect())
    }

    pub fn sample(&self, samples: usize, clearance: f64) -> Result<Vec<ProfileSample>> {
        Ok(self
            .sample_points(samples, clearance)?
            .into_iter()
            .map(|t| {
                let h = self.h(t);
                let dh = self.dh(t);
                ProfileSample { t, h, dh, violation: dh.abs() - self.bound(t) }
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub h: f64,
    pub dh: f64,
    /// `|h′| − (ε + c·h²)`; nonpositive where the inequality holds.
    pub violation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCheck {
    pub samples: usize,
    pub clearance: f64,
    /// `max |h′| − (ε + c·h²)` over the samples.
    pub max_violation: f64,
    /// Same, divided pointwise by `ε + c·h²`.
    pub max_relative_violation: f64,
    /// Number of sign changes of `h` along the samples.
    pub sign_changes: usize,
}

impl ProfileCheck {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.max_relative_violation <= rel_tol
    }
}

pub fn verify(profile: &HProfile, samples: usize) -> Result<ProfileCheck> {
    verify_with_clearance(profile, samples, DEFAULT_CLEARANCE)
}

pub fn verify_with_clearance(profile: &HProfile, samples: usize, clearance: f64) -> Result<ProfileCheck> {
    let pts = profile.sample(samples, clearance)?;
    let max_violation = pts.iter().map(|s| s.violation).fold(f64::NEG_INFINITY, f64::max);
    let max_relative_violation = pts
        .iter()
        .map(|s| s.violation / profile.bound(s.t))
        .fold(f64::NEG_INFINITY, f64::max);
    let sign_changes = pts
        .windows(2)
        .filter(|w| w[0].h.signum() != w[1].h.signum() && w[0].h != 0.0 && w[1].h != 0.0)
        .count();
    Ok(ProfileCheck { samples, clearance, max_violation, max_relative_violation, sign_changes })
}

/// Result of rescaling `h̃ = λh`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rescaling {
    pub lambda: f64,
    pub eps_required: f64,
}

/// Given a profile `h̃` with `a·|∇h̃| ≤ A + B·h̃²`, the function `h = h̃/λ`
/// obeys `|∇h| ≤ A/(aλ) + (Bλ/a)·h²`. Choosing `λ = c·a/B` makes the `h²`
/// coefficient equal to `c` and leaves `ε = A/(aλ) = A·B/(c·a²)`.
pub fn rescale(a_const: f64, b_quad: f64, a: &Rational, c: f64) -> Result<Rescaling> {
    check_positive("A", a_const)?;
    check_positive("B", b_quad)?;
    check_positive("c", c)?;
    let a = rational::to_f64(a);
    if !(a >= 1.0) {
        return Err(Error::InvalidInput(format!("a = {a} < 1")));
    }
    let lambda = c * a / b_quad;
    Ok(Rescaling { lambda, eps_required: a_const / (a * lambda) })
}
