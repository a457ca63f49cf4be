//! One-dimensional quadrature used by the volume and tube integrals.
//!
//! Two rules live here: a recursive adaptive Simpson scheme for smooth
//! integrands with localized features (boundary profiles of bodies of
//! revolution), and fixed-order Gauss-Legendre panels for integrands that
//! are sampled cell by cell on a grid.

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The interval is first cut into `panels` equal pieces so that narrow
/// features are seen by the initial sampling. `rel_tol` is relative to a
/// coarse estimate of the integral of `|f|`, with `abs_floor` as a lower
/// bound on the absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    rel_tol: f64,
    abs_floor: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let nodes: Vec<f64> = (0..=2 * panels).map(|i| a + 0.5 * h * i as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();

    let run = |eps: f64| -> f64 {
        (0..panels)
            .map(|p| {
                let (fa, fm, fb) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
                let whole = simpson(fa, fm, fb, h);
                recurse(&f, nodes[2 * p], nodes[2 * p + 2], fa, fm, fb, whole, eps / panels as f64, 0)
            })
            .sum()
    };

    // The coarse scale overestimates the integral when a narrow peak sits on a
    // node; tighten once against the refined value in that case.
    let coarse: f64 = (0..panels)
        .map(|p| simpson(values[2 * p].abs(), values[2 * p + 1].abs(), values[2 * p + 2].abs(), h))
        .sum();
    let eps = (rel_tol * coarse).max(abs_floor);
    let first = run(eps);
    let refined = (rel_tol * first.abs()).max(abs_floor);
    if refined < 0.5 * eps {
        run(refined)
    } else {
        first
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal pieces of `[a, b]`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(&mut f, lo, lo + h)
            })
            .sum()
    }
}

/// Value and derivative of the degree-`n` Legendre polynomial at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}
