//! Exact-arithmetic certificates for the stability estimates used in
//! μ-bubble proofs of Bernstein-type theorems for stable minimal
//! hypersurfaces in Euclidean space.
//!
//! The crate is organised around five modules:
//!
//! * [`forms`] builds the quadratic forms `P(x, y, ω)` and `Q(H, z, h)` and the
//!   scalar constants attached to a parameter triple `(n, a, α)`.
//! * [`psd`] decides positive-semidefiniteness exactly, minimises
//!   quadratic-plus-linear expressions and extracts the best `h²` coefficient.
//! * [`certificate`] evaluates conditions (i)–(iv) plus the area condition,
//!   scans the `(a, α)` rectangle and reproduces the worked constants.
//! * [`profile`] synthesises the band profile `h` of condition (iv).
//! * [`geometry`] checks, numerically and independently, the curvature
//!   identities the forms are assembled from.
//!
//! All coefficients are exact rationals ([`Rational`]); floating point is
//! only used for eigenvalue corroboration, profiles and geometry.

pub mod certificate;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod profile;
pub mod psd;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
