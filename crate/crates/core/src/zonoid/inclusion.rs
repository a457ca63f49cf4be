use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{b_infinity, support_g, support_tc_ellipsoid, Direction};
use crate::error::{Error, Result};
use crate::mc::chunk_rng;
use crate::Verdict;

/// Absolute slack on unit directions for both sides of the sandwich.
pub const INCLUSION_SLACK: f64 = 1e-12;
const DIRECTION_CHUNK: usize = 4096;

/// Certificate for `b∞ T_c(B/√(2π)) ⊂ G(c) ⊂ T_c(B/√(2π))` on sampled directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InclusionReport {
    pub m: usize,
    pub s: f64,
    pub seed: u64,
    pub n_dirs: usize,
    pub b_infinity: f64,
    /// Smallest `h_G / h_ellipsoid` seen.
    pub min_ratio_lower: f64,
    /// Largest `h_G / h_ellipsoid` seen.
    pub max_ratio_upper: f64,
    /// Direction attaining `min_ratio_lower`.
    pub worst_direction: Direction,
    pub violations: usize,
    /// First violating direction in sampling order.
    pub witness: Option<Direction>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy)]
struct Partial {
    min: (f64, Direction),
    max: f64,
    violations: usize,
    witness: Option<Direction>,
}

impl Partial {
    fn merge(self, other: Self) -> Self {
        Self {
            min: if other.min.0 < self.min.0 { other.min } else { self.min },
            max: self.max.max(other.max),
            violations: self.violations + other.violations,
            witness: self.witness.or(other.witness),
        }
    }
}

/// Checks the ellipsoid sandwich for `G(c)`, `‖c‖ = s`, along `n_dirs`
/// uniformly random unit directions of `R^m`.
///
/// Directions are drawn in chunks, chunk `j` from stream `(seed, j)`, so the
/// report is deterministic for fixed `(m, s, n_dirs, seed)`.
pub fn check_inclusion(m: usize, s: f64, n_dirs: usize, seed: u64) -> Result<InclusionReport> {
    if m == 0 {
        return Err(Error::domain("check_inclusion", "dimension must be >= 1"));
    }
    if n_dirs == 0 {
        return Err(Error::domain("check_inclusion", "need at least one direction"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("check_inclusion", format!("need finite s >= 0, got {s}")));
    }
    let b = b_infinity();
    let n_chunks = n_dirs.div_ceil(DIRECTION_CHUNK);
    let partials: Vec<Partial> = (0..n_chunks)
        .into_par_iter()
        .map(|j| {
            let len = DIRECTION_CHUNK.min(n_dirs - j * DIRECTION_CHUNK);
            let mut rng = chunk_rng(seed, j as u64);
            let mut acc = Partial {
                min: (f64::INFINITY, Direction::new_unchecked(0.0, 0.0)),
                max: f64::NEG_INFINITY,
                violations: 0,
                witness: None,
            };
            let mut v = vec![0.0; m];
            for _ in 0..len {
                let u = loop {
                    v.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if n > 0.0 {
                        let yr = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                        break Direction::new_unchecked(v[0] / n, yr / n);
                    }
                };
                let hg = support_g(s, u);
                let he = support_tc_ellipsoid(s, u);
                let ratio = hg / he;
                if ratio < acc.min.0 {
                    acc.min = (ratio, u);
                }
                acc.max = acc.max.max(ratio);
                if hg > he + INCLUSION_SLACK || hg < b * he - INCLUSION_SLACK {
                    acc.violations += 1;
                    acc.witness.get_or_insert(u);
                }
            }
            acc
        })
        .collect();
    let total = partials
        .into_iter()
        .reduce(Partial::merge)
        .expect("at least one chunk");
    Ok(InclusionReport {
        m,
        s,
        seed,
        n_dirs,
        b_infinity: b,
        min_ratio_lower: total.min.0,
        max_ratio_upper: total.max,
        worst_direction: total.min.1,
        violations: total.violations,
        witness: total.witness,
        verdict: Verdict::from_bool(total.violations == 0),
    })
}
