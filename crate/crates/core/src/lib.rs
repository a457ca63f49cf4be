//! Gaussian zonoids and their applications.
//!
//! The Vitale zonoid of an integrable random vector `X` is the convex body
//! with support function `u ↦ ½ E|⟨u, X⟩|`. For a non-degenerate Gaussian
//! `X = M(c + ξ)` it is `M(G(c))`, a body of revolution about `c`. This crate
//! evaluates those bodies exactly, certifies the two-sided ellipsoid
//! sandwich `b∞ T_c(B/√(2π)) ⊂ G(c) ⊂ T_c(B/√(2π))`, and uses it for
//!
//! * volume bounds and asymptotics of `G(c)` ([`zonoid`]),
//! * Monte Carlo expected absolute determinants against mixed volumes of
//!   ellipsoids ([`randet`]),
//! * expected zero counts of the shifted Gaussian field `φ + τ g` on a flat
//!   torus and their concentration around `{φ = 0}` as `τ → 0` ([`grf`]).
//!
//! Scalar kernels (`erf`, `λ`, `φ∞`, ...) live in [`special`].

pub mod error;
pub mod gaussian;
pub mod grf;
pub mod mc;
pub mod optimize;
pub mod quad;
pub mod randet;
pub mod special;
pub mod zonoid;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use gaussian::GaussianVectorSpec;
pub use mc::{EstimateWithCI, MCConfig};
pub use zonoid::{b_infinity, Direction, RevolutionBody};

/// Outcome of a certificate check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}
