//! Scalar minimization: grid bracketing followed by golden-section search.

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Minimum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 500 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Minimum { x, value, iterations }
}

/// Scans `n` equally spaced points of `[a, b]`, then refines around the best
/// grid point with golden-section search on its two neighbouring cells.
pub fn bracket_and_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, tol: f64) -> Minimum {
    let n = n.max(3);
    let h = (b - a) / (n - 1) as f64;
    let (best, _) = (0..n)
        .map(|i| (i, f(a + h * i as f64)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let lo = a + h * best.saturating_sub(1) as f64;
    let hi = a + h * (best + 1).min(n - 1) as f64;
    golden_section(f, lo, hi, tol)
}
