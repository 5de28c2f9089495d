//! Canonical representations of the truncated moment problem on `[-1, 1]`
//! and the Chebyshev–Markov–Stieltjes extremal functions.
//!
//! For a weight `w` and a degree `n`, the crate computes the orthonormal
//! polynomials `φ` (degree `n`, weight `w`) and `ψ` (degree `n - 1`, weight
//! `(1 - t²) w`), every canonical quadrature of degree `2n - 1`, and from
//! those the extremal functions
//!
//! * `π(x)`: the largest mass a moment-matching measure can put on `[-1, x]`,
//! * `π̲(x)`: the smallest mass it can put on `[-1, x)`,
//! * `λ(x)`: the largest atom it can put at `x`,
//!
//! together with the derivative `π'(x)`. The [`verify`] module measures the
//! constants in the differential inequalities relating `π'` and `w`.
//!
//! ```
//! use cms_core::{canonical::CanonicalSystem, weightfn::presets};
//!
//! let system = CanonicalSystem::new(presets::constant(1.0), 3).unwrap();
//! let rep = system.rep_of_x(0.25).unwrap();
//! let (pi, pi_lower, lambda) = cms_core::extremal::pi_at(&system, &rep).unwrap();
//! assert!((pi - pi_lower - lambda).abs() < 1e-12);
//! assert!(pi_lower <= 1.25 && 1.25 <= pi);
//! ```

pub mod canonical;
mod error;
pub mod extremal;
pub mod fmt;
pub mod orthopoly;
pub mod verify;
pub mod weightfn;

pub use error::{Error, Result};

/// Degree cap applied to recurrence tables unless overridden by
/// [`DEGREE_CAP_ENV`].
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Environment variable overriding [`DEFAULT_DEGREE_CAP`].
pub const DEGREE_CAP_ENV: &str = "CMS_DEGREE_CAP";

pub fn degree_cap() -> usize {
    std::env::var(DEGREE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DEGREE_CAP)
}
