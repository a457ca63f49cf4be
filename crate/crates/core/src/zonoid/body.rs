use std::cell::Cell;
use std::f64::consts::{FRAC_2_SQRT_PI, FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{support_g, support_gtilde, support_gtilde_infinity, support_tc_ellipsoid, Direction};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::special::{erf, kappa, lambda, SQRT_2PI};

const VOLUME_REL_TOL: f64 = 1e-11;
/// Slack on the sign of the axial rate before a profile counts as folded.
const ORIENTATION_SLACK: f64 = 1e-14;
/// `e^{-40}` is negligible against the volume tolerance.
const NEGLIGIBLE_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BodyKind {
    /// `G(c)`
    #[serde(rename = "G_of_c")]
    GaussianZonoid,
    /// `G̃(s)`
    #[serde(rename = "Gtilde_s")]
    Normalized,
    /// `G̃(∞)`
    #[serde(rename = "Gtilde_infinity")]
    NormalizedLimit,
    /// `T_c(B_m/√(2π))`
    #[serde(rename = "Tc_ellipsoid")]
    OuterEllipsoid,
}

/// A convex body of revolution about the first axis of `R^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevolutionBody {
    pub kind: BodyKind,
    /// `‖c‖`; ignored for [`BodyKind::NormalizedLimit`].
    pub s: f64,
    pub dim: usize,
}

/// A boundary point with outer normal `(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub theta: f64,
    pub axial: f64,
    pub radial: f64,
}

impl RevolutionBody {
    pub fn new(kind: BodyKind, s: f64, dim: usize) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain("RevolutionBody", format!("need finite s >= 0, got {s}")));
        }
        if dim == 0 {
            return Err(Error::domain("RevolutionBody", "dimension must be >= 1"));
        }
        Ok(Self { kind, s, dim })
    }

    pub fn gaussian(s: f64, dim: usize) -> Result<Self> {
        Self::new(BodyKind::GaussianZonoid, s, dim)
    }

    pub fn support(&self, u: Direction) -> f64 {
        match self.kind {
            BodyKind::GaussianZonoid => support_g(self.s, u),
            BodyKind::Normalized => support_gtilde(self.s, u),
            BodyKind::NormalizedLimit => support_gtilde_infinity(u),
            BodyKind::OuterEllipsoid => support_tc_ellipsoid(self.s, u),
        }
    }

    /// `(∂h/∂x, ∂h/∂yr)` at `u ≠ 0`, the boundary point with normal `u/‖u‖`.
    pub fn gradient(&self, u: Direction) -> (f64, f64) {
        match self.kind {
            BodyKind::GaussianZonoid => gradient_g(self.s, u),
            BodyKind::Normalized => {
                let l = lambda(self.s);
                let (gx, gy) = gradient_g(self.s, Direction::new_unchecked(u.x / l, u.yr));
                (SQRT_2PI * gx / l, SQRT_2PI * gy)
            }
            BodyKind::NormalizedLimit => {
                if u.yr == 0.0 {
                    (u.x.signum(), 0.0)
                } else {
                    let v = u.x / (PI.sqrt() * u.yr);
                    (erf(v), (-v * v).exp())
                }
            }
            BodyKind::OuterEllipsoid => {
                let l = lambda(self.s);
                let q = (l * u.x).hypot(u.yr);
                (l * l * u.x / (SQRT_2PI * q), u.yr / (SQRT_2PI * q))
            }
        }
    }

    /// Boundary of the body in the (axial, radial) half-plane, traced by the
    /// gradient of the support function at `n_points` normals `θ ∈ [0, π]`.
    pub fn boundary_profile(&self, n_points: usize) -> Result<Vec<ProfilePoint>> {
        if n_points < 2 {
            return Err(Error::domain("boundary_profile", format!("need at least 2 points, got {n_points}")));
        }
        Ok((0..n_points)
            .map(|i| {
                let theta = PI * i as f64 / (n_points - 1) as f64;
                let u = Direction::new_unchecked(theta.cos(), theta.sin().max(0.0));
                let (axial, radial) = self.gradient(u);
                ProfilePoint { theta, axial, radial }
            })
            .collect())
    }

    /// `vol_m = κ_{m-1} ∫ radial^{m-1} d(axial)` along the boundary profile.
    pub fn volume(&self) -> Result<f64> {
        let m = self.dim;
        match self.kind {
            BodyKind::GaussianZonoid => gaussian_zonoid_volume_checked(m, self.s),
            BodyKind::Normalized => {
                let scale = (2.0 * PI).powf(0.5 * m as f64) / lambda(self.s);
                Ok(scale * gaussian_zonoid_volume_checked(m, self.s)?)
            }
            BodyKind::NormalizedLimit => {
                // axial = erf(u), radial = e^{-u²}: the boundary in the variable
                // u = erf⁻¹(axial) has a Gaussian integrand.
                let k = (m - 1) as f64;
                let f = |u: f64| FRAC_2_SQRT_PI * (-(k + 1.0) * u * u).exp();
                let reach = (40.0 / m as f64).sqrt();
                let half = adaptive_simpson(f, 0.0, reach, 16, VOLUME_REL_TOL, 0.0);
                Ok(kappa(m - 1) * 2.0 * half)
            }
            BodyKind::OuterEllipsoid => {
                let a = lambda(self.s) / SQRT_2PI;
                let b = 1.0 / SQRT_2PI;
                revolution_volume(m, |theta| {
                    let (c, sn) = (theta.cos(), theta.sin());
                    let q = (a * c).hypot(b * sn);
                    (b * b * sn / q, -a * a * b * b * sn / (q * q * q))
                })
            }
        }
    }
}

/// Profile of `∂G(s)` at normal angle `θ`: (radial, d axial/dθ).
fn g_profile(s: f64, theta: f64) -> (f64, f64) {
    let (c, sn) = (theta.cos(), theta.sin());
    let w = s * c / SQRT_2;
    let e = (-w * w).exp() / SQRT_2PI;
    (sn * e, -e * sn * (1.0 + s * s * sn * sn))
}

fn gradient_g(s: f64, u: Direction) -> (f64, f64) {
    let r = u.norm();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let w = u.x * s / (SQRT_2 * r);
    let e = (-w * w).exp() / SQRT_2PI;
    (0.5 * s * erf(w) + u.x / r * e, u.yr / r * e)
}

/// `κ_{m-1} ∫ radial(θ)^{m-1} (-d axial/dθ) dθ` over `[lo, hi] ⊂ [0, π]`, with
/// `profile(θ)` returning `(radial, d axial/dθ)`. A positive axial rate
/// means the boundary folds back and is reported as non-convex.
fn revolution_volume_on<P: Fn(f64) -> (f64, f64)>(m: usize, profile: P, lo: f64, hi: f64) -> Result<f64> {
    let flip = Cell::new(None::<f64>);
    let k = (m - 1) as i32;
    let integrand = |theta: f64| {
        let (radial, rate) = profile(theta);
        if rate > ORIENTATION_SLACK && flip.get().is_none() {
            flip.set(Some(theta));
        }
        radial.powi(k) * (-rate)
    };
    // split at π/2, where G(s) concentrates for large s
    let mid = FRAC_PI_2.clamp(lo, hi);
    let v = adaptive_simpson(integrand, lo, mid, 8, VOLUME_REL_TOL, 0.0)
        + adaptive_simpson(integrand, mid, hi, 8, VOLUME_REL_TOL, 0.0);
    if let Some(at) = flip.get() {
        return Err(Error::NonConvexProfile { at });
    }
    Ok(kappa(m - 1) * v)
}

fn revolution_volume<P: Fn(f64) -> (f64, f64)>(m: usize, profile: P) -> Result<f64> {
    revolution_volume_on(m, profile, 0.0, PI)
}

fn gaussian_zonoid_volume_checked(m: usize, s: f64) -> Result<f64> {
    if m == 1 {
        return Ok(2.0 * lambda(s) / SQRT_2PI);
    }
    // outside |cos θ| < √(2 E/m)/s the weight e^{-m s² cos²θ/2} is below e^{-E}
    let c = ((2.0 * NEGLIGIBLE_EXPONENT / m as f64).sqrt() / s).min(1.0);
    let lo = c.acos();
    revolution_volume_on(m, |theta| g_profile(s, theta), lo, PI - lo)
}

/// `vol_m(G(c))` for `‖c‖ = s`.
pub fn gaussian_zonoid_volume(m: usize, s: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("volume", "dimension must be >= 1"));
    }
    gaussian_zonoid_volume_checked(m, s)
}
