//! Zeros of the shifted field `X_τ = φ + τ g` on the flat torus `T^m = [0, 2π)^m`.
//!
//! `g` is a standard Gaussian field whose differential induces the flat
//! metric. The expected number of common zeros of `m` iid copies of `X_τ`
//! inside the tube `U_r = {|φ| < r}` is
//!
//! ```text
//! n_{r,τ} = m! ∫_{U_r} vol_m(ζ_τ(p)) dp,
//! vol_m(ζ_τ(p)) = (2π)^{-m/2} e^{-m φ(p)²/2τ²} vol_m(G(∇φ(p)/τ)).
//! ```
//!
//! With `r = ατ` and `τ → 0` this concentrates on `Z₀ = {φ = 0}`:
//! `n → (m-1)! κ_{m-1} (2π)^{1-m} erf(√(m/2) α) vol_{m-1}(Z₀)`.
//!
//! Three routes are provided: tensor-grid quadrature over the tube
//! ([`n_r_tau_integral`]), a level-set integral for fields depending on one
//! coordinate ([`n_r_tau_coarea`]) and, on the circle, direct counting of
//! zeros of sampled fields ([`mc_zero_count_circle`]).

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{estimate, EstimateWithCI, MCConfig};
use crate::quad::{adaptive_simpson, GaussLegendre};
use crate::special::{erf, factorial, kappa, lambda, SQRT_PI_OVER_2};
use crate::zonoid::{b_infinity, gaussian_zonoid_volume, support_g, volume_asymptote, Direction};
use crate::Verdict;

/// Minimum number of grid cells across the tube.
pub const CELLS_ACROSS_TUBE: f64 = 8.0;
pub const MIN_RESOLUTION: usize = 16;
/// Pointwise slack of the comparison-field sandwich.
pub const SANDWICH_SLACK: f64 = 1e-10;
const GL_ORDER: usize = 8;
const CELL_PROBES: usize = 4;
const ROOT_TOL: f64 = 1e-10;

/// A smooth function on the flat torus `[0, 2π)^m`.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, p: &[f64]) -> f64;
    fn gradient(&self, p: &[f64], grad: &mut [f64]);
    /// An upper bound on `|φ|`.
    fn sup_abs(&self) -> f64;
    /// An upper bound on `‖∇φ‖`.
    fn sup_gradient(&self) -> f64;

    /// The axis along which tube boundaries are clipped exactly.
    fn inner_axis(&self) -> usize {
        self.dim() - 1
    }

    /// `φ` as a single harmonic in one coordinate, when it is one.
    fn reduced(&self) -> Option<ReducedField> {
        None
    }
}

/// `a sin(k p_axis + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicTerm {
    pub axis: usize,
    pub amplitude: f64,
    pub frequency: u32,
    #[serde(default)]
    pub phase: f64,
}

/// `φ(p) = offset + Σ a_j sin(k_j p_{axis_j} + phase_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicField {
    pub dim: usize,
    #[serde(default)]
    pub offset: f64,
    pub terms: Vec<HarmonicTerm>,
}

/// `offset + a sin(k x + phase)` in one coordinate of `T^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedField {
    pub dim: usize,
    pub offset: f64,
    pub term: HarmonicTerm,
}

impl ReducedField {
    /// `vol_{m-1}({φ = 0})`, or `None` when 0 is a critical value.
    pub fn zero_set_volume(&self) -> Option<f64> {
        let (a, off) = (self.term.amplitude.abs(), self.offset.abs());
        if off == a {
            return None;
        }
        if off > a {
            return Some(0.0);
        }
        Some(2.0 * self.term.frequency as f64 * TAU.powi(self.dim as i32 - 1))
    }
}

impl HarmonicField {
    pub fn new(dim: usize, offset: f64, terms: Vec<HarmonicTerm>) -> Result<Self> {
        let f = Self { dim, offset, terms };
        f.validate()?;
        Ok(f)
    }

    /// `sin(2t)` on the circle.
    pub fn sin2t() -> Self {
        Self::single(1, 0, 1.0, 2, 0.0, 0.0)
    }

    /// `offset + a sin(k p_axis + phase)` on `T^dim`.
    pub fn single(dim: usize, axis: usize, amplitude: f64, frequency: u32, phase: f64, offset: f64) -> Self {
        Self {
            dim,
            offset,
            terms: vec![HarmonicTerm {
                axis,
                amplitude,
                frequency,
                phase,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::domain("HarmonicField", "dimension must be >= 1"));
        }
        if self.terms.is_empty() {
            return Err(Error::domain("HarmonicField", "need at least one term"));
        }
        if !self.offset.is_finite() {
            return Err(Error::domain("HarmonicField", "offset must be finite"));
        }
        for t in &self.terms {
            if t.axis >= self.dim {
                return Err(Error::Dimension(format!("term on axis {} of T^{}", t.axis, self.dim)));
            }
            if t.frequency == 0 || !t.amplitude.is_finite() || t.amplitude == 0.0 || !t.phase.is_finite() {
                return Err(Error::domain(
                    "HarmonicField",
                    format!("need finite nonzero amplitude and frequency >= 1, got {t:?}"),
                ));
            }
        }
        Ok(())
    }

    fn axis_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for t in &self.terms {
            w[t.axis] += t.amplitude.abs() * t.frequency as f64;
        }
        w
    }
}

impl ScalarField for HarmonicField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .fold(self.offset, |acc, t| acc + t.amplitude * (t.frequency as f64 * p[t.axis] + t.phase).sin())
    }

    fn gradient(&self, p: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for t in &self.terms {
            let k = t.frequency as f64;
            grad[t.axis] += t.amplitude * k * (k * p[t.axis] + t.phase).cos();
        }
    }

    fn sup_abs(&self) -> f64 {
        self.offset.abs() + self.terms.iter().map(|t| t.amplitude.abs()).sum::<f64>()
    }

    fn sup_gradient(&self) -> f64 {
        self.axis_weights().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    fn inner_axis(&self) -> usize {
        let w = self.axis_weights();
        (0..self.dim).rev().max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0)
    }

    fn reduced(&self) -> Option<ReducedField> {
        match self.terms.as_slice() {
            [t] => Some(ReducedField {
                dim: self.dim,
                offset: self.offset,
                term: *t,
            }),
            _ => None,
        }
    }
}

/// `τ` and the tube half-width `r`; `r = ∞` is the whole torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub tau: f64,
    pub r: f64,
}

impl TubeSpec {
    pub fn new(tau: f64, r: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain("TubeSpec", format!("need finite tau > 0, got {tau}")));
        }
        if !(r >= 0.0) {
            return Err(Error::domain("TubeSpec", format!("need r >= 0, got {r}")));
        }
        Ok(Self { tau, r })
    }

    /// `r = α τ`.
    pub fn scaled(tau: f64, alpha: f64) -> Result<Self> {
        Self::new(tau, alpha * tau)
    }

    pub fn alpha(&self) -> f64 {
        self.r / self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    /// Periodic trapezoid on every axis, tube as an indicator.
    Trapezoid,
    /// Periodic trapezoid on outer axes; on the inner axis the tube boundary
    /// is located by bisection and the pieces integrated by Gauss-Legendre.
    #[default]
    ClippedGauss,
}

/// Tensor grid with `resolution` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub resolution: usize,
    #[serde(default)]
    pub rule: QuadRule,
}

impl GridSpec {
    pub fn new(resolution: usize, rule: QuadRule) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::domain(
                "GridSpec",
                format!("resolution must be >= {MIN_RESOLUTION}, got {resolution}"),
            ));
        }
        Ok(Self { resolution, rule })
    }

    /// The coarsest grid with [`CELLS_ACROSS_TUBE`] cells across both the
    /// tube and the Gaussian weight `e^{-φ²/2τ²}`.
    pub fn auto(field: &dyn ScalarField, tube: &TubeSpec) -> Self {
        let width = 2.0 * tube.r.min(tube.tau) / field.sup_gradient().max(f64::MIN_POSITIVE);
        let n = (CELLS_ACROSS_TUBE * TAU / width).ceil();
        let resolution = if n.is_finite() { (n as usize).max(64) } else { 64 };
        Self {
            resolution,
            rule: QuadRule::ClippedGauss,
        }
    }
}

/// `vol_m(G(s))` tabulated as a fraction of the outer-ellipsoid volume
/// against `u = s/(1+s)`, linear interpolation.
struct VolumeCurve {
    m: usize,
    ratio: Vec<f64>,
}

const CURVE_INTERVALS: usize = 8192;

impl VolumeCurve {
    fn upper(m: usize, s: f64) -> f64 {
        lambda(s) * kappa(m) / TAU.powf(0.5 * m as f64)
    }

    fn build(m: usize) -> Self {
        let n = CURVE_INTERVALS;
        let limit = sandwich_ratio_limit(m);
        let ratio = (0..=n)
            .into_par_iter()
            .map(|i| {
                if i == n {
                    return limit;
                }
                let u = i as f64 / n as f64;
                let s = u / (1.0 - u);
                gaussian_zonoid_volume(m, s).expect("m >= 1") / Self::upper(m, s)
            })
            .collect();
        Self { m, ratio }
    }

    fn get(m: usize) -> &'static VolumeCurve {
        static CURVES: OnceLock<Mutex<HashMap<usize, &'static VolumeCurve>>> = OnceLock::new();
        let lock = CURVES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = lock.lock().expect("curve cache").get(&m) {
            return c;
        }
        let built: &'static VolumeCurve = Box::leak(Box::new(Self::build(m)));
        lock.lock().expect("curve cache").entry(m).or_insert(built)
    }

    fn volume(&self, s: f64) -> f64 {
        if self.m == 1 {
            return Self::upper(1, s);
        }
        let x = s / (1.0 + s) * CURVE_INTERVALS as f64;
        let i = (x.floor() as usize).min(CURVE_INTERVALS - 1);
        let w = x - i as f64;
        Self::upper(self.m, s) * ((1.0 - w) * self.ratio[i] + w * self.ratio[i + 1])
    }
}

/// `vol_m(G(s))`, interpolated from a cached table for `m ≥ 2`
/// (relative error below 1e-8).
pub fn gaussian_zonoid_volume_fast(m: usize, s: f64) -> f64 {
    VolumeCurve::get(m).volume(s)
}

fn check_tau(op: &'static str, tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(op, format!("need finite tau > 0, got {tau}")));
    }
    Ok(())
}

fn check_point(field: &dyn ScalarField, p: &[f64]) -> Result<()> {
    if p.len() != field.dim() {
        return Err(Error::Dimension(format!("point has length {}, field lives on T^{}", p.len(), field.dim())));
    }
    Ok(())
}

fn section_prefactor(m: usize, phi: f64, tau: f64) -> f64 {
    let z = phi / tau;
    (-0.5 * m as f64 * z * z).exp() / TAU.powf(0.5 * m as f64)
}

/// `vol_m(ζ_τ(p)) = (2π)^{-m/2} e^{-m φ(p)²/2τ²} vol_m(G(‖∇φ(p)‖/τ))`.
pub fn zonoid_section_volume(field: &dyn ScalarField, p: &[f64], tau: f64) -> Result<f64> {
    check_tau("zonoid_section_volume", tau)?;
    check_point(field, p)?;
    let m = field.dim();
    let mut grad = vec![0.0; m];
    field.gradient(p, &mut grad);
    let s = grad.iter().map(|g| g * g).sum::<f64>().sqrt() / tau;
    Ok(section_prefactor(m, field.value(p), tau) * gaussian_zonoid_volume(m, s)?)
}

/// Support of `ζ_τ(p) = e^{-φ²/2τ²}/√(2π) · G(∇φ/τ)` at `u`.
pub fn zonoid_section_support(field: &dyn ScalarField, p: &[f64], tau: f64, u: &[f64]) -> Result<f64> {
    check_tau("zonoid_section_support", tau)?;
    check_point(field, p)?;
    if u.len() != field.dim() {
        return Err(Error::Dimension(format!("direction has length {}, field lives on T^{}", u.len(), field.dim())));
    }
    let mut grad = vec![0.0; field.dim()];
    field.gradient(p, &mut grad);
    let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dir = if gn == 0.0 {
        Direction::new(0.0, un)?
    } else {
        let x = u.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() / gn;
        Direction::new(x, (un * un - x * x).max(0.0).sqrt())?
    };
    let z = field.value(p) / tau;
    Ok((-0.5 * z * z).exp() / crate::special::SQRT_2PI * support_g(gn / tau, dir))
}

/// Evaluates `φ` and `‖∇φ‖` along the line through `base` parallel to `axis`.
struct Line<'a> {
    field: &'a dyn ScalarField,
    axis: usize,
    scratch: RefCell<(Vec<f64>, Vec<f64>)>,
}

impl<'a> Line<'a> {
    fn new(field: &'a dyn ScalarField, axis: usize, base: Vec<f64>) -> Self {
        let m = base.len();
        Self {
            field,
            axis,
            scratch: RefCell::new((base, vec![0.0; m])),
        }
    }

    fn value(&self, t: f64) -> f64 {
        let mut s = self.scratch.borrow_mut();
        s.0[self.axis] = t;
        self.field.value(&s.0)
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let mut s = self.scratch.borrow_mut();
        let (p, g) = &mut *s;
        p[self.axis] = t;
        self.field.gradient(p, g);
        (self.field.value(p), g.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `∫_a^b 1{|φ| < r} f dt` on one cell of the inner axis.
fn clipped_cell<F: FnMut(f64) -> f64>(line: &Line, r: f64, gl: &GaussLegendre, mut f: F, a: f64, b: f64) -> f64 {
    let inside = |t: f64| r - line.value(t).abs();
    let h = (b - a) / CELL_PROBES as f64;
    let probes: Vec<f64> = (0..=CELL_PROBES).map(|j| inside(a + h * j as f64)).collect();
    if probes.iter().all(|&g| g > 0.0) {
        return gl.integrate(f, a, b);
    }
    let mut cuts = vec![a];
    for j in 0..CELL_PROBES {
        if (probes[j] > 0.0) != (probes[j + 1] > 0.0) {
            let lo = a + h * j as f64;
            cuts.push(bisect(inside, lo, lo + h, 1e-15 * (1.0 + lo.abs())));
        }
    }
    cuts.push(b);
    cuts.windows(2)
        .filter(|w| w[1] > w[0] && inside(0.5 * (w[0] + w[1])) > 0.0)
        .map(|w| gl.integrate(&mut f, w[0], w[1]))
        .sum()
}

/// `∫_{U_r} f(φ(p), ‖∇φ(p)‖) dp` on the torus grid.
fn tube_integral<F>(field: &dyn ScalarField, tube: &TubeSpec, grid: &GridSpec, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let m = field.dim();
    let n = grid.resolution;
    if n < MIN_RESOLUTION {
        return Err(Error::domain("tube_integral", format!("resolution must be >= {MIN_RESOLUTION}, got {n}")));
    }
    if tube.r == 0.0 {
        return Ok(0.0);
    }
    let h = TAU / n as f64;
    let whole = tube.r >= field.sup_abs();
    if !whole {
        let width = 2.0 * tube.r / field.sup_gradient();
        if width < CELLS_ACROSS_TUBE * h {
            let needed = (CELLS_ACROSS_TUBE * TAU / width).ceil();
            return Err(Error::Resolution {
                detail: format!("tube width {width:.3e} spans {:.2} cells of size {h:.3e}", width / h),
                hint: format!("increase grid resolution to at least {needed}"),
            });
        }
    }
    let inner = field.inner_axis();
    let outer: Vec<usize> = (0..m).filter(|&a| a != inner).collect();
    let n_outer = n.pow(outer.len() as u32);
    let gl = GaussLegendre::new(GL_ORDER);
    let lines: Vec<f64> = (0..n_outer)
        .into_par_iter()
        .map(|idx| {
            let mut base = vec![0.0; m];
            let mut rest = idx;
            for &a in &outer {
                base[a] = h * (rest % n) as f64;
                rest /= n;
            }
            let line = Line::new(field, inner, base);
            let g = |t: f64| {
                let (phi, gn) = line.eval(t);
                f(phi, gn)
            };
            let mut sum = 0.0;
            for i in 0..n {
                let a = h * i as f64;
                sum += match grid.rule {
                    QuadRule::Trapezoid => {
                        let (phi, gn) = line.eval(a);
                        if phi.abs() < tube.r {
                            h * f(phi, gn)
                        } else {
                            0.0
                        }
                    }
                    QuadRule::ClippedGauss if whole => gl.integrate(g, a, a + h),
                    QuadRule::ClippedGauss => clipped_cell(&line, tube.r, &gl, g, a, a + h),
                };
            }
            sum
        })
        .collect();
    Ok(h.powi(outer.len() as i32) * lines.iter().sum::<f64>())
}

/// `n_{r,τ} = m! ∫_{U_r} vol_m(ζ_τ(p)) dp` by quadrature on the torus grid.
pub fn n_r_tau_integral(field: &dyn ScalarField, tube: &TubeSpec, grid: &GridSpec) -> Result<f64> {
    let m = field.dim();
    let tau = tube.tau;
    let curve = VolumeCurve::get(m);
    let integral = tube_integral(field, tube, grid, |phi, gn| {
        section_prefactor(m, phi, tau) * curve.volume(gn / tau)
    })?;
    Ok(factorial(m) * integral)
}

/// `n_{r,τ}` through the level sets of a field that is a single harmonic in
/// one coordinate.
///
/// For `φ = off + a sin(k x + ph)` write `t = φ = off + a sin θ`. Each level
/// `S_t` has `2k` sheets of volume `(2π)^{m-1}` and `‖∇φ‖ = |a| k |cos θ|`, so
/// `dt / ‖∇φ‖` over a sheet is `dθ / k` and
///
/// ```text
/// n = m! (2π)^{-m/2} 2 (2π)^{m-1} ∫_{θ ∈ [-π/2, π/2], |t| < r} e^{-m t²/2τ²} vol_m(G(|a| k cos θ / τ)) dθ.
/// ```
///
/// `grid.resolution` sets the initial number of panels.
pub fn n_r_tau_coarea(field: &dyn ScalarField, tube: &TubeSpec, grid: &GridSpec) -> Result<f64> {
    let reduced = field
        .reduced()
        .ok_or_else(|| Error::UnsupportedField("level sets need a single harmonic in one coordinate".into()))?;
    if tube.r == 0.0 {
        return Ok(0.0);
    }
    let m = reduced.dim;
    let (tau, r) = (tube.tau, tube.r);
    let HarmonicTerm {
        amplitude: a,
        frequency: k,
        ..
    } = reduced.term;
    let off = reduced.offset;
    let angle = |t: f64| ((t - off) / a).clamp(-1.0, 1.0).asin();
    let (mut lo, mut hi) = (angle(-r), angle(r));
    if a < 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let curve = VolumeCurve::get(m);
    let mf = m as f64;
    let speed = a.abs() * k as f64 / tau;
    let integrand = |theta: f64| {
        let z = (off + a * theta.sin()) / tau;
        (-0.5 * mf * z * z).exp() * curve.volume(speed * theta.cos())
    };
    // split at the zero level, where the weight peaks
    let mid = angle(0.0).clamp(lo, hi);
    let panels = grid.resolution.max(MIN_RESOLUTION);
    let integral = adaptive_simpson(integrand, lo, mid, panels, 1e-10, 0.0)
        + adaptive_simpson(integrand, mid, hi, panels, 1e-10, 0.0);
    Ok(factorial(m) / TAU.powf(0.5 * mf) * 2.0 * TAU.powf(mf - 1.0) * integral)
}

/// `lim_{τ→0} n_{ατ,τ} = (m-1)! κ_{m-1} (2π)^{1-m} erf(√(m/2) α) vol_{m-1}(Z₀)`.
/// `alpha = ∞` is allowed.
pub fn concentration_limit(m: usize, alpha: f64, vol_z0: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("concentration_limit", "dimension must be >= 1"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::domain("concentration_limit", format!("need alpha >= 0, got {alpha}")));
    }
    if !(vol_z0 >= 0.0) || !vol_z0.is_finite() {
        return Err(Error::domain("concentration_limit", format!("need finite vol_z0 >= 0, got {vol_z0}")));
    }
    let mf = m as f64;
    let coeff = factorial(m - 1) * kappa(m - 1) / TAU.powf(mf - 1.0);
    Ok(coeff * erf((0.5 * mf).sqrt() * alpha) * vol_z0)
}

/// Largest grid spacing accepted by [`mc_zero_count_circle`].
pub fn max_root_spacing(field: &dyn ScalarField, tau: f64) -> f64 {
    tau / (10.0 * field.sup_gradient() + 10.0)
}

/// Default grid spacing for [`mc_zero_count_circle`].
pub fn default_root_spacing(field: &dyn ScalarField, tube: &TubeSpec) -> f64 {
    (tube.tau.min(tube.r) / 20.0)
        .min(max_root_spacing(field, tube.tau))
        .min(TAU / 4096.0)
}

/// Expected number of zeros of `φ + τ(ξ₁ cos t + ξ₂ sin t)` in `{|φ| < r}`
/// on the circle, by sign changes on a grid refined by bisection.
pub fn mc_zero_count_circle(
    field: &dyn ScalarField,
    tube: &TubeSpec,
    cfg: &MCConfig,
    spacing: Option<f64>,
) -> Result<EstimateWithCI> {
    if field.dim() != 1 {
        return Err(Error::Dimension(format!("zero counting needs a field on the circle, got T^{}", field.dim())));
    }
    cfg.validate("mc_zero_count_circle")?;
    let tau = tube.tau;
    let r = tube.r;
    let max = max_root_spacing(field, tau);
    let spacing = spacing.unwrap_or_else(|| default_root_spacing(field, tube));
    if !(spacing > 0.0) || spacing > max {
        return Err(Error::Resolution {
            detail: format!("grid spacing {spacing:.3e} exceeds {max:.3e}"),
            hint: format!("use a spacing of at most {max:.3e}"),
        });
    }
    let n = (TAU / spacing).ceil() as usize;
    let h = TAU / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| h * i as f64).collect();
    let phi: Vec<f64> = nodes.iter().map(|&t| field.value(&[t])).collect();
    let cos: Vec<f64> = nodes.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = nodes.iter().map(|t| t.sin()).collect();
    // pairs (i, i+1 mod n) with an endpoint inside the tube, or next to one
    let near = |i: usize| phi[i].abs() < r;
    let pairs: Vec<usize> = (0..n)
        .filter(|&i| near((i + n - 1) % n) || near(i) || near((i + 1) % n) || near((i + 2) % n))
        .collect();
    Ok(estimate(cfg, |rng| {
        let x1: f64 = rng.sample(StandardNormal);
        let x2: f64 = rng.sample(StandardNormal);
        let at_node = |i: usize| phi[i] + tau * (x1 * cos[i] + x2 * sin[i]);
        let at = |t: f64| field.value(&[t]) + tau * (x1 * t.cos() + x2 * t.sin());
        let mut count = 0usize;
        for &i in &pairs {
            let j = (i + 1) % n;
            let (a, b) = (at_node(i), at_node(j));
            if (a >= 0.0) == (b >= 0.0) {
                continue;
            }
            let lo = nodes[i];
            let root = bisect(at, lo, lo + h, ROOT_TOL);
            if field.value(&[root]).abs() < r {
                count += 1;
            }
        }
        count as f64
    }))
}

/// Pointwise and integrated comparison of `ζ_τ(p)` with the ellipsoid
/// section `(e^{-φ²/2τ²}/2π) T_c B` where `c = ∇φ/τ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub m: usize,
    pub tau: f64,
    pub r: f64,
    pub n_points: usize,
    pub b_infinity: f64,
    /// Extremes of `vol ζ / vol ellipsoid` over the grid.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: usize,
    pub witness: Option<Vec<f64>>,
    /// `m! ∫_{U_r} vol ζ`.
    pub n_count: f64,
    /// `m! ∫_{U_r} vol ellipsoid`.
    pub n_tilde: f64,
    pub verdict: Verdict,
}

fn ellipsoid_section_volume(m: usize, phi: f64, gn: f64, tau: f64) -> f64 {
    let z = phi / tau;
    ((-0.5 * z * z).exp() / TAU).powi(m as i32) * lambda(gn / tau) * kappa(m)
}

/// Checks `b∞^m vol(ellipsoid) ≤ vol ζ_τ ≤ vol(ellipsoid)` at every node of
/// the grid and integrates both over the tube, on a finer grid when `grid`
/// does not resolve it.
pub fn comparison_field_sandwich(field: &dyn ScalarField, tube: &TubeSpec, grid: &GridSpec) -> Result<SandwichReport> {
    let m = field.dim();
    let tau = tube.tau;
    let n = grid.resolution;
    if n < MIN_RESOLUTION {
        return Err(Error::domain("comparison_field_sandwich", format!("resolution must be >= {MIN_RESOLUTION}, got {n}")));
    }
    let h = TAU / n as f64;
    let bm = b_infinity().powi(m as i32);
    let n_points = n.pow(m as u32);
    let checks: Vec<(f64, Option<Vec<f64>>)> = (0..n_points)
        .into_par_iter()
        .map(|idx| -> Result<(f64, Option<Vec<f64>>)> {
            let mut p = vec![0.0; m];
            let mut rest = idx;
            for x in p.iter_mut() {
                *x = h * (rest % n) as f64;
                rest /= n;
            }
            let mut grad = vec![0.0; m];
            field.gradient(&p, &mut grad);
            let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            let phi = field.value(&p);
            let vz = section_prefactor(m, phi, tau) * gaussian_zonoid_volume(m, gn / tau)?;
            let ve = ellipsoid_section_volume(m, phi, gn, tau);
            let ok = vz <= ve + SANDWICH_SLACK && vz >= bm * ve - SANDWICH_SLACK;
            let ratio = if ve > 0.0 { vz / ve } else { 1.0 };
            Ok((ratio, (!ok).then_some(p)))
        })
        .collect::<Result<_>>()?;
    let min_ratio = checks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let max_ratio = checks.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let violations = checks.iter().filter(|c| c.1.is_some()).count();
    let witness = checks.into_iter().find_map(|c| c.1);

    let fm = factorial(m);
    let curve = VolumeCurve::get(m);
    let auto = GridSpec::auto(field, tube);
    let fine = if auto.resolution > n { &auto } else { grid };
    let n_count = fm * tube_integral(field, tube, fine, |phi, gn| section_prefactor(m, phi, tau) * curve.volume(gn / tau))?;
    let n_tilde = fm * tube_integral(field, tube, fine, |phi, gn| ellipsoid_section_volume(m, phi, gn, tau))?;
    let rel = 1e-9 * n_tilde;
    let integrated_ok = n_count <= n_tilde + rel && n_count >= bm * n_tilde - rel;
    Ok(SandwichReport {
        m,
        tau,
        r: tube.r,
        n_points,
        b_infinity: b_infinity(),
        min_ratio,
        max_ratio,
        violations,
        witness,
        n_count,
        n_tilde,
        verdict: Verdict::from_bool(violations == 0 && integrated_ok),
    })
}

/// `vol(G̃(∞))/κ_m`, the limit of `vol ζ / vol ellipsoid` as `‖∇φ‖/τ → ∞`
/// (`λ(s) ~ √(π/2) s`).
pub fn sandwich_ratio_limit(m: usize) -> f64 {
    volume_asymptote(m).expect("m >= 1") * TAU.powf(0.5 * m as f64) / (SQRT_PI_OVER_2 * kappa(m))
}
