//! Expected volumes of Gaussian frames and their mixed-volume bounds.
//!
//! For independent columns `X_i = M_i(c_i + ξ_i)` of `Γ ∈ R^{m×k}`,
//!
//! ```text
//! b∞^k α_{m,k} MV(E_1, …, E_k, B_m[m-k]) ≤ E√det(ΓᵗΓ) ≤ α_{m,k} MV(E_1, …, E_k, B_m[m-k])
//! ```
//!
//! with ellipsoids `E_i = M_i T_{c_i}(B_m)`. Mixed volumes are normalized so
//! that `MV(K, …, K) = vol_m(K)`.
//!
//! Mixed volumes of ellipsoids are computed exactly in the plane
//! ([`mixed_area_2d`]) and by Monte Carlo otherwise: for centered columns
//! `A_i ξ_i` the identity `E√det(Γ̃ᵗΓ̃) = α_{m,k} MV(A_1 B, …, A_k B, B[m-k])`
//! holds, and appending `m - k` standard columns turns every `B` slot into
//! an ordinary column, so `MV = E|det(A_1ξ_1, …, A_kξ_k, ξ_{k+1}, …, ξ_m)| / α_{m,m}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{check_invertible, GaussianVectorSpec};
use crate::mc::{estimate_with, EstimateWithCI, MCConfig};
use crate::special::{factorial, kappa};
use crate::zonoid::{b_infinity, volume_asymptote, volume_bounds};
use crate::Verdict;

/// Width of the confidence band, in standard errors.
pub const CONFIDENCE_K: f64 = 4.0;
pub const MIN_MIXED_AREA_NODES: usize = 64;
const DEFAULT_MIXED_AREA_NODES: usize = 1024;
/// Seed offset for the independent mixed-volume run inside [`check_randet_bounds`].
const MV_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// `k` independent Gaussian columns in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    m: usize,
    columns: Vec<GaussianVectorSpec>,
}

impl FrameSpec {
    pub fn new(m: usize, columns: Vec<GaussianVectorSpec>) -> Result<Self> {
        let k = columns.len();
        if k == 0 || k > m {
            return Err(Error::domain("FrameSpec", format!("need 1 <= k <= m, got k = {k}, m = {m}")));
        }
        if let Some(c) = columns.iter().find(|c| c.dim() != m) {
            return Err(Error::Dimension(format!("column of dimension {} in R^{m}", c.dim())));
        }
        Ok(Self { m, columns })
    }

    /// `k` copies of one column law.
    pub fn iid(m: usize, k: usize, column: GaussianVectorSpec) -> Result<Self> {
        Self::new(m, vec![column; k])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[GaussianVectorSpec] {
        &self.columns
    }

    /// `E_i = M_i T_{c_i}(B_m)`.
    pub fn ellipsoids(&self) -> Vec<EllipsoidSpec> {
        self.columns
            .iter()
            .map(|c| EllipsoidSpec {
                shape: c.outer_ellipsoid_map(),
            })
            .collect()
    }
}

/// The ellipsoid `A(B_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    pub shape: DMatrix<f64>,
}

impl EllipsoidSpec {
    pub fn new(shape: DMatrix<f64>) -> Result<Self> {
        if shape.nrows() == 0 || shape.nrows() != shape.ncols() {
            return Err(Error::Dimension(format!(
                "ellipsoid shape must be square, got {}x{}",
                shape.nrows(),
                shape.ncols()
            )));
        }
        check_invertible(&shape)?;
        Ok(Self { shape })
    }

    pub fn ball(m: usize) -> Self {
        Self {
            shape: DMatrix::identity(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.nrows()
    }

    /// `‖Aᵗu‖`.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        (self.shape.transpose() * u).norm()
    }

    /// Support on the unit circle at angle `theta`; planar ellipsoids only.
    pub fn support_2d(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let a = &self.shape;
        (a[(0, 0)] * c + a[(1, 0)] * s).hypot(a[(0, 1)] * c + a[(1, 1)] * s)
    }
}

/// `α_{m,k} = m! / ((2π)^{k/2} (m-k)! κ_{m-k})`.
pub fn alpha_coeff(m: usize, k: usize) -> Result<f64> {
    if k == 0 || k > m {
        return Err(Error::domain("alpha_coeff", format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    Ok(factorial(m) / ((2.0 * PI).powf(0.5 * k as f64) * factorial(m - k) * kappa(m - k)))
}

/// `√det(ΓᵗΓ)` as the product of the diagonal of `R` in `Γ = QR`.
fn frame_volume(g: &DMatrix<f64>) -> f64 {
    let r = g.clone().qr().r();
    r.diagonal().iter().map(|d| d.abs()).product()
}

fn fill_standard(rng: &mut ChaCha8Rng, xi: &mut DVector<f64>) {
    xi.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
}

/// Monte Carlo estimate of `E√det(ΓᵗΓ)`.
pub fn mc_expected_absdet(spec: &FrameSpec, cfg: &MCConfig) -> Result<EstimateWithCI> {
    cfg.validate("mc_expected_absdet")?;
    let (m, k) = (spec.m, spec.k());
    Ok(estimate_with(
        cfg,
        || (DMatrix::<f64>::zeros(m, k), DVector::<f64>::zeros(m)),
        |(g, xi), rng| {
            for (j, col) in spec.columns.iter().enumerate() {
                fill_standard(rng, xi);
                *xi += col.mean_offset();
                g.set_column(j, &(col.map() * &*xi));
            }
            frame_volume(g)
        },
    ))
}

/// Monte Carlo estimate of `MV(E_1, …, E_k, B_m[m-k])`.
pub fn mv_ellipsoids_mc(ellipsoids: &[EllipsoidSpec], m: usize, cfg: &MCConfig) -> Result<EstimateWithCI> {
    cfg.validate("mv_ellipsoids_mc")?;
    let k = ellipsoids.len();
    if k == 0 || k > m {
        return Err(Error::domain("mv_ellipsoids_mc", format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    if let Some(e) = ellipsoids.iter().find(|e| e.dim() != m) {
        return Err(Error::Dimension(format!("ellipsoid of dimension {} in R^{m}", e.dim())));
    }
    let alpha = alpha_coeff(m, m)?;
    let est = estimate_with(
        cfg,
        || (DMatrix::<f64>::zeros(m, m), DVector::<f64>::zeros(m)),
        |(g, xi), rng| {
            for j in 0..m {
                fill_standard(rng, xi);
                match ellipsoids.get(j) {
                    Some(e) => g.set_column(j, &(&e.shape * &*xi)),
                    None => g.set_column(j, xi),
                }
            }
            frame_volume(g)
        },
    );
    Ok(est.scaled(1.0 / alpha))
}

/// Area enclosed by the planar convex body with support values `h` at
/// equally spaced angles, `½∫(h² - h'²)dθ`, with `h'` taken spectrally.
fn area_from_samples(planner: &mut FftPlanner<f64>, h: &[f64]) -> f64 {
    let n = h.len();
    let mut buf: Vec<Complex<f64>> = h.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, z) in buf.iter_mut().enumerate() {
        let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        *z = if 2 * j == n { Complex::new(0.0, 0.0) } else { *z * Complex::new(0.0, k) };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let dh = buf.iter().map(|z| z.re / n as f64);
    let sum: f64 = h.iter().zip(dh).map(|(a, b)| a * a - b * b).sum();
    0.5 * sum * 2.0 * PI / n as f64
}

/// Mixed area `MV(K, L)` of two planar convex bodies given by their support
/// functions on the circle, by polarization of the area functional.
pub fn mixed_area_2d<K, L>(h_k: K, h_l: L, n_nodes: usize) -> Result<f64>
where
    K: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
{
    if n_nodes < MIN_MIXED_AREA_NODES {
        return Err(Error::domain(
            "mixed_area_2d",
            format!("need at least {MIN_MIXED_AREA_NODES} nodes, got {n_nodes}"),
        ));
    }
    let angles = (0..n_nodes).map(|j| 2.0 * PI * j as f64 / n_nodes as f64);
    let hk: Vec<f64> = angles.clone().map(&h_k).collect();
    let hl: Vec<f64> = angles.map(&h_l).collect();
    let sum: Vec<f64> = hk.iter().zip(&hl).map(|(a, b)| a + b).collect();
    let mut planner = FftPlanner::new();
    let mut area = |h: &[f64]| -> Result<f64> {
        let a = area_from_samples(&mut planner, h);
        if a < 0.0 {
            return Err(Error::NegativeArea { area: a });
        }
        Ok(a)
    };
    let (ak, al, akl) = (area(&hk)?, area(&hl)?, area(&sum)?);
    Ok(0.5 * (akl - ak - al))
}

/// Lower and upper bound on `E√det(ΓᵗΓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// Outcome of [`check_randet_bounds`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandetReport {
    pub m: usize,
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub bounds: Bounds,
    pub alpha: f64,
    pub mixed_volume: f64,
    /// Zero when the mixed volume is exact.
    pub mixed_volume_std_error: f64,
    /// `mean / upper`.
    pub ratio: f64,
    pub verdict: Verdict,
}

impl RandetReport {
    /// Re-judges the estimate against other bounds, keeping the bound
    /// uncertainty of this report.
    pub fn judge(&self, bounds: Bounds) -> Verdict {
        let scale = |b: f64| if self.mixed_volume > 0.0 { b / self.mixed_volume } else { 0.0 };
        let se_l = self.std_error.hypot(scale(bounds.lower) * self.mixed_volume_std_error);
        let se_u = self.std_error.hypot(scale(bounds.upper) * self.mixed_volume_std_error);
        Verdict::from_bool(
            self.mean >= bounds.lower - CONFIDENCE_K * se_l && self.mean <= bounds.upper + CONFIDENCE_K * se_u,
        )
    }
}

/// `MV(E_1, …, E_k, B_m[m-k])`, exact for `m ≤ 2`.
fn frame_mixed_volume(ellipsoids: &[EllipsoidSpec], m: usize, cfg: &MCConfig) -> Result<EstimateWithCI> {
    let exact = |v: f64| EstimateWithCI {
        mean: v,
        std_error: 0.0,
        n_samples: 0,
    };
    match (m, ellipsoids) {
        (1, [e]) => Ok(exact(2.0 * e.shape[(0, 0)].abs())),
        (2, [e]) => {
            let ball = EllipsoidSpec::ball(2);
            mixed_area_2d(|t| e.support_2d(t), |t| ball.support_2d(t), DEFAULT_MIXED_AREA_NODES).map(exact)
        }
        (2, [e, f]) => mixed_area_2d(|t| e.support_2d(t), |t| f.support_2d(t), DEFAULT_MIXED_AREA_NODES).map(exact),
        _ => {
            let mv_cfg = MCConfig {
                seed: cfg.seed.wrapping_add(MV_SEED_OFFSET),
                ..*cfg
            };
            mv_ellipsoids_mc(ellipsoids, m, &mv_cfg)
        }
    }
}

/// The ellipsoid bounds of a frame and the mixed volume behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub bounds: Bounds,
    pub alpha: f64,
    pub mixed_volume: EstimateWithCI,
}

/// `b∞^k α_{m,k} MV` and `α_{m,k} MV`. The mixed volume is exact for
/// `m ≤ 2` and drawn from an independent stream otherwise.
pub fn frame_bounds(spec: &FrameSpec, cfg: &MCConfig) -> Result<FrameBounds> {
    let (m, k) = (spec.m, spec.k());
    let mv = frame_mixed_volume(&spec.ellipsoids(), m, cfg)?;
    let alpha = alpha_coeff(m, k)?;
    let upper = alpha * mv.mean;
    Ok(FrameBounds {
        bounds: Bounds {
            lower: b_infinity().powi(k as i32) * upper,
            upper,
        },
        alpha,
        mixed_volume: mv,
    })
}

/// Estimates `E√det(ΓᵗΓ)` and checks it against the ellipsoid bounds
/// within [`CONFIDENCE_K`] combined standard errors.
pub fn check_randet_bounds(spec: &FrameSpec, cfg: &MCConfig) -> Result<RandetReport> {
    let (m, k) = (spec.m, spec.k());
    let est = mc_expected_absdet(spec, cfg)?;
    let FrameBounds {
        bounds,
        alpha,
        mixed_volume: mv,
    } = frame_bounds(spec, cfg)?;
    let upper = bounds.upper;
    let mut report = RandetReport {
        m,
        k,
        mean: est.mean,
        std_error: est.std_error,
        n: est.n_samples,
        bounds,
        alpha,
        mixed_volume: mv.mean,
        mixed_volume_std_error: mv.std_error,
        ratio: est.mean / upper,
        verdict: Verdict::Fail,
    };
    report.verdict = report.judge(bounds);
    Ok(report)
}

/// Closed-form bounds and slope for `E|det Γ|` with `m` iid columns `M(c + ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareBounds {
    pub lower: f64,
    pub upper: f64,
    /// `lim E|det Γ| / ‖c‖`.
    pub asymptote: f64,
}

pub fn iid_square_bounds(m: usize, map: &DMatrix<f64>, s: f64) -> Result<SquareBounds> {
    if map.nrows() != m || map.ncols() != m {
        return Err(Error::Dimension(format!("expected a {m}x{m} map, got {}x{}", map.nrows(), map.ncols())));
    }
    if !(s >= 0.0) {
        return Err(Error::domain("iid_square_bounds", format!("need s >= 0, got {s}")));
    }
    check_invertible(map)?;
    let scale = map.determinant().abs() * factorial(m);
    let vb = volume_bounds(m, s)?;
    Ok(SquareBounds {
        lower: scale * vb.lower_cyl,
        upper: scale * vb.upper,
        asymptote: scale * volume_asymptote(m)?,
    })
}
