//! Non-degenerate Gaussian laws written as `X = M(c + ξ)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::special::{lambda, SQRT_2PI};
use crate::zonoid::{support_g, Direction};

/// Relative determinant guard: `|det M|` must exceed this fraction of the
/// Hadamard bound (product of column norms).
pub const SINGULAR_GUARD: f64 = 1e-12;

/// The law of `M(c + ξ)` with `ξ` standard Gaussian in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianVectorSpec {
    map: DMatrix<f64>,
    mean_offset: DVector<f64>,
}

impl GaussianVectorSpec {
    pub fn new(map: DMatrix<f64>, mean_offset: DVector<f64>) -> Result<Self> {
        let m = map.nrows();
        if m == 0 || map.ncols() != m {
            return Err(Error::Dimension(format!(
                "map must be square and non-empty, got {}x{}",
                map.nrows(),
                map.ncols()
            )));
        }
        if mean_offset.len() != m {
            return Err(Error::Dimension(format!(
                "mean offset has length {}, map is {m}x{m}",
                mean_offset.len()
            )));
        }
        if map.iter().chain(mean_offset.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("GaussianVectorSpec", "non-finite entry"));
        }
        check_invertible(&map)?;
        Ok(Self { map, mean_offset })
    }

    /// `ξ` itself in dimension `m`.
    pub fn standard(m: usize) -> Self {
        Self {
            map: DMatrix::identity(m, m),
            mean_offset: DVector::zeros(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.nrows()
    }

    pub fn map(&self) -> &DMatrix<f64> {
        &self.map
    }

    pub fn mean_offset(&self) -> &DVector<f64> {
        &self.mean_offset
    }

    /// `h_{M(G(c))}(u) = h_{G(c)}(Mᵗu)`.
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::Dimension(format!("direction has length {}, expected {}", u.len(), self.dim())));
        }
        let v = self.map.transpose() * u;
        let s = self.mean_offset.norm();
        Ok(support_g(s, split_along(&v, &self.mean_offset)))
    }

    /// `M T_c`, the map sending `B_m` onto the outer ellipsoid of the zonoid
    /// scaled by `√(2π)`.
    pub fn outer_ellipsoid_map(&self) -> DMatrix<f64> {
        &self.map * tc_matrix(&self.mean_offset)
    }

    /// Support of the outer ellipsoid `M T_c (B_m / √(2π))`.
    pub fn outer_ellipsoid_support(&self, u: &DVector<f64>) -> f64 {
        (self.outer_ellipsoid_map().transpose() * u).norm() / SQRT_2PI
    }
}

/// Splits `v` into its component along `axis` and the norm of the rest.
/// A zero axis puts everything in the radial part.
pub fn split_along(v: &DVector<f64>, axis: &DVector<f64>) -> Direction {
    let n = axis.norm();
    if n == 0.0 {
        return Direction::new_unchecked(0.0, v.norm());
    }
    let x = v.dot(axis) / n;
    let yr2 = (v.norm_squared() - x * x).max(0.0);
    Direction::new_unchecked(x, yr2.sqrt())
}

/// `T_c`: stretch by `λ(‖c‖)` along `c`, identity on `c⊥`.
pub fn tc_matrix(c: &DVector<f64>) -> DMatrix<f64> {
    let m = c.len();
    let s = c.norm();
    let mut t = DMatrix::identity(m, m);
    if s > 0.0 {
        let e = c / s;
        t += (lambda(s) - 1.0) * &e * e.transpose();
    }
    t
}

pub(crate) fn check_invertible(map: &DMatrix<f64>) -> Result<()> {
    let det = map.determinant();
    let hadamard: f64 = map.column_iter().map(|c| c.norm()).product();
    let guard = SINGULAR_GUARD * hadamard;
    if !(det.abs() > guard) {
        return Err(Error::Singular { det, guard });
    }
    Ok(())
}
