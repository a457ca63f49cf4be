//! Gaussian zonoids `G(c)` in the (axial, radial) half-plane.
//!
//! `G(c)` is invariant under rotations fixing `c`, so every support
//! evaluation reduces to a [`Direction`]: the component `x` of `u` along
//! `c/‖c‖` and the norm `yr` of the rest. Only `s = ‖c‖` matters.
//!
//! Four bodies share that reduction:
//!
//! * `G(c)` itself,
//! * its outer ellipsoid `T_c(B_m/√(2π))`,
//! * the normalized zonoid `G̃(s) = √(2π) T_c⁻¹ G(c)`, squeezed between the
//!   unit ball and `G̃(∞)`,
//! * the limit body `G̃(∞)` with support `φ∞(x, yr)`, whose inradius is `b∞`.

mod body;
mod inclusion;

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::bracket_and_minimize;
use crate::special::{erf, erf_inv, kappa, lambda, phi_inf, SQRT_2PI};

pub use body::{gaussian_zonoid_volume, BodyKind, ProfilePoint, RevolutionBody};
pub use inclusion::{check_inclusion, InclusionReport};

/// A direction split along the mean axis: `x = ⟨u, c/‖c‖⟩`, `yr = ‖u - x c/‖c‖‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub x: f64,
    pub yr: f64,
}

impl Direction {
    pub fn new(x: f64, yr: f64) -> Result<Self> {
        if !x.is_finite() || !yr.is_finite() || yr < 0.0 {
            return Err(Error::domain("Direction", format!("need finite x and yr >= 0, got ({x}, {yr})")));
        }
        Ok(Self { x, yr })
    }

    pub(crate) fn new_unchecked(x: f64, yr: f64) -> Self {
        Self { x, yr }
    }

    /// `(cos θ, |sin θ|)`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            x: theta.cos(),
            yr: theta.sin().abs(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.yr)
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0.0 && self.yr == 0.0
    }
}

/// Support function of `G(c)` with `‖c‖ = s`. Returns 0 at `u = 0`.
pub fn support_g(s: f64, u: Direction) -> f64 {
    let r = u.norm();
    if r == 0.0 {
        return 0.0;
    }
    let w = u.x * s / (SQRT_2 * r);
    r / SQRT_2PI * (-w * w).exp() + 0.5 * u.x * s * erf(w)
}

/// Support function of the outer ellipsoid `T_c(B_m / √(2π))`.
pub fn support_tc_ellipsoid(s: f64, u: Direction) -> f64 {
    let l = lambda(s);
    (l * u.x).hypot(u.yr) / SQRT_2PI
}

/// Support function of `G̃(s)`, written as `α λ(β)` with
/// `α = √(x² + λ² yr²)/λ` and `β = x s/√(x² + λ² yr²)`.
pub fn support_gtilde(s: f64, u: Direction) -> f64 {
    if u.is_zero() {
        return 0.0;
    }
    let l = lambda(s);
    let q = u.x.hypot(l * u.yr);
    let alpha = q / l;
    let beta = u.x * s / q;
    alpha * lambda(beta)
}

/// Support function of the limit body `G̃(∞)`: `φ∞(x, yr)`.
pub fn support_gtilde_infinity(u: Direction) -> f64 {
    phi_inf(u.x, u.yr)
}

/// The inradius of `G̃(∞)` and where on the quarter circle it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BInfinity {
    #[serde(rename = "b_infinity")]
    pub value: f64,
    pub t_star: f64,
    pub tol: f64,
}

/// Regression value of `b∞`, confirmed by a 10⁶-point grid scan.
pub const B_INFINITY_REF: f64 = 0.910_345_910_794_512_4;

const B_INFINITY_GRID: usize = 1000;

/// `b∞ = min_t φ∞(cos t, sin t)`.
///
/// `φ∞` is even in each argument, so `t ∈ [0, π/2]` suffices. A 1000-point
/// grid brackets the minimum and golden-section search refines the angle
/// to `tolerance`.
pub fn compute_b_infinity(tolerance: f64) -> Result<BInfinity> {
    if !(tolerance > 0.0) {
        return Err(Error::domain("compute_b_infinity", format!("tolerance must be > 0, got {tolerance}")));
    }
    let f = |t: f64| phi_inf(t.cos(), t.sin());
    let min = bracket_and_minimize(f, 0.0, FRAC_PI_2, B_INFINITY_GRID, tolerance);
    Ok(BInfinity {
        value: min.value,
        t_star: min.x,
        tol: tolerance,
    })
}

/// Brute-force `min φ∞(cos t, sin t)` over `n` equally spaced angles in `[0, π/2]`.
pub fn b_infinity_grid_scan(n: usize) -> BInfinity {
    let n = n.max(2);
    let h = FRAC_PI_2 / (n - 1) as f64;
    let (t, v) = (0..n)
        .map(|i| {
            let t = h * i as f64;
            (t, phi_inf(t.cos(), t.sin()))
        })
        .fold((0.0, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    BInfinity {
        value: v,
        t_star: t,
        tol: h,
    }
}

/// `b∞`, computed once at tolerance 1e-12.
pub fn b_infinity() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        compute_b_infinity(1e-12)
            .expect("positive tolerance")
            .value
    })
}

/// The radial profile `f(x) = exp(-(erf⁻¹ x)²)` of `∂G̃(∞)`.
pub fn gtilde_infinity_profile(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::domain("gtilde_infinity_profile", format!("need |x| <= 1, got {x}")));
    }
    if x.abs() == 1.0 {
        return Ok(0.0);
    }
    let v = erf_inv(x)?;
    Ok((-v * v).exp())
}

/// Closed-form bounds on `vol_m(G(c))` for `‖c‖ = s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeBounds {
    /// `b∞^m λ(s) κ_m / (2π)^{m/2}` from the inner ellipsoid.
    pub lower_ball: f64,
    /// `λ(s) 2κ_{m-1} / (√m (2π)^{m/2})` from `T_c G̃(∞)/√(2π)`.
    pub lower_cyl: f64,
    /// `λ(s) κ_m / (2π)^{m/2}`, the outer ellipsoid.
    pub upper: f64,
}

impl VolumeBounds {
    pub fn best_lower(&self) -> f64 {
        self.lower_ball.max(self.lower_cyl)
    }
}

pub fn volume_bounds(m: usize, s: f64) -> Result<VolumeBounds> {
    if m == 0 {
        return Err(Error::domain("volume_bounds", "dimension must be >= 1"));
    }
    let mf = m as f64;
    let scale = lambda(s) / (2.0 * std::f64::consts::PI).powf(0.5 * mf);
    Ok(VolumeBounds {
        lower_ball: b_infinity().powi(m as i32) * scale * kappa(m),
        lower_cyl: scale * 2.0 * kappa(m - 1) / mf.sqrt(),
        upper: scale * kappa(m),
    })
}

/// `lim_{s→∞} vol_m(G(s))/s = κ_{m-1} / (√m (2π)^{(m-1)/2})`.
pub fn volume_asymptote(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("volume_asymptote", "dimension must be >= 1"));
    }
    let mf = m as f64;
    Ok(kappa(m - 1) / (mf.sqrt() * (2.0 * std::f64::consts::PI).powf(0.5 * (mf - 1.0))))
}

#[cfg(test)]
mod tests;
