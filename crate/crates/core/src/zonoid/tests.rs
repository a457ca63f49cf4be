use super::*;
use crate::mc::{estimate, MCConfig};
use crate::quad::GaussLegendre;
use crate::special::{folded_abs_moment, FoldedMomentParams};
use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const KINDS: [BodyKind; 4] = [
    BodyKind::GaussianZonoid,
    BodyKind::Normalized,
    BodyKind::NormalizedLimit,
    BodyKind::OuterEllipsoid,
];

fn dir(x: f64, yr: f64) -> Direction {
    Direction::new(x, yr).unwrap()
}

/// `vol_m(G(s)) = κ_{m-1}/(2π)^{m/2} ∫_{-1}^{1} (1-c²)^{(m-1)/2} (1 + s²(1-c²)) e^{-m s² c²/2} dc`,
/// integrated in `c = sin ψ` to remove the endpoint singularity.
fn volume_oracle(m: usize, s: f64) -> f64 {
    let mf = m as f64;
    let gl = GaussLegendre::new(12);
    let f = |psi: f64| {
        let (c, q) = (psi.sin(), psi.cos());
        q.powi(m as i32) * (1.0 + s * s * q * q) * (-0.5 * mf * s * s * c * c).exp()
    };
    kappa(m - 1) / (2.0 * PI).powf(0.5 * mf) * gl.integrate_composite(f, -FRAC_PI_2, FRAC_PI_2, 400)
}

#[test]
fn support_g_examples() {
    for &s in &[0.0, 0.3, 2.0, 17.0] {
        assert_relative_eq!(support_g(s, dir(1.0, 0.0)), lambda(s) / SQRT_2PI, max_relative = 1e-14);
        assert_relative_eq!(support_g(s, dir(0.0, 1.0)), 1.0 / SQRT_2PI, max_relative = 1e-15);
    }
    for t in 0..12 {
        let u = Direction::from_angle(0.5 * t as f64);
        assert_relative_eq!(support_g(0.0, u), 1.0 / SQRT_2PI, max_relative = 1e-15);
    }
    assert_eq!(support_g(1.0, dir(0.0, 0.0)), 0.0);
}

#[test]
fn support_g_is_half_folded_moment() {
    // ½E|x(s + ξ₁) + yr ξ₂| = ½ folded(x s, ‖u‖)
    for &(s, x, yr) in &[(1.0, 0.6, 0.8), (3.0, -0.2, 0.5), (0.1, 2.0, 0.0)] {
        let u = dir(x, yr);
        let expected = 0.5 * folded_abs_moment(FoldedMomentParams::new(x * s, u.norm()).unwrap());
        assert_relative_eq!(support_g(s, u), expected, max_relative = 1e-14);
    }
}

#[test]
fn support_g_monte_carlo() {
    let s = 1.5;
    let u = dir(0.6, 0.8);
    let cfg = MCConfig::new(1_000_000, 3);
    let est = estimate(&cfg, |rng| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        0.5 * (u.x * (s + a) + u.yr * b).abs()
    });
    assert!(est.contains(support_g(s, u), 4.0), "{est:?} vs {}", support_g(s, u));
}

#[test]
fn ellipsoid_and_normalized_examples() {
    assert_relative_eq!(support_tc_ellipsoid(0.0, dir(0.3, 0.4)), 0.5 / SQRT_2PI, max_relative = 1e-15);
    assert_relative_eq!(support_tc_ellipsoid(2.0, dir(1.0, 0.0)), lambda(2.0) / SQRT_2PI, max_relative = 1e-15);
    assert_relative_eq!(support_tc_ellipsoid(2.0, dir(0.0, 1.0)), 1.0 / SQRT_2PI, max_relative = 1e-15);
    for &s in &[0.1, 1.0, 7.0, 40.0] {
        assert_relative_eq!(support_gtilde(s, dir(1.0, 0.0)), 1.0, max_relative = 1e-13);
        assert_relative_eq!(support_gtilde(s, dir(-1.0, 0.0)), 1.0, max_relative = 1e-13);
        assert_relative_eq!(support_gtilde(s, dir(0.0, 1.0)), 1.0, max_relative = 1e-13);
    }
    let u = dir(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    assert!((support_gtilde(50.0, u) - phi_inf(u.x, u.yr)).abs() < 1e-2);
    assert!((support_gtilde_infinity(u) - 0.921).abs() < 1e-3);
}

#[test]
fn gtilde_is_rescaled_g() {
    // h_{G̃(s)}(u) = √(2π) h_{G(s)}(T_c⁻¹ u)
    for &s in &[0.5, 2.0, 9.0] {
        for t in 0..9 {
            let u = Direction::from_angle(0.37 * t as f64);
            let direct = SQRT_2PI * support_g(s, dir(u.x / lambda(s), u.yr));
            assert_relative_eq!(support_gtilde(s, u), direct, max_relative = 1e-13);
        }
    }
}

#[test]
fn b_infinity_value() {
    let b = compute_b_infinity(1e-12).unwrap();
    assert!(b.value > 0.905 && b.value < 0.915);
    assert!((b.value - B_INFINITY_REF).abs() < 1e-13);
    assert!((b.t_star - 0.610_440_863_7).abs() < 1e-6);
    let scan = b_infinity_grid_scan(1_000_001);
    assert!((scan.value - b.value).abs() < 1e-10);
    assert!(scan.value >= b.value - 1e-15);
    for i in 0..=1000 {
        let t = FRAC_PI_2 * i as f64 / 1000.0;
        assert!(b.value <= phi_inf(t.cos(), t.sin()) + 1e-12);
    }
    assert!(compute_b_infinity(0.0).is_err());
}

#[test]
fn b_infinity_tolerances_agree() {
    let coarse = compute_b_infinity(1e-4).unwrap().value;
    assert!((coarse - b_infinity()).abs() < 1e-4);
}

#[test]
fn limit_profile() {
    assert_eq!(gtilde_infinity_profile(0.0).unwrap(), 1.0);
    assert_eq!(gtilde_infinity_profile(1.0).unwrap(), 0.0);
    assert_eq!(gtilde_infinity_profile(-1.0).unwrap(), 0.0);
    assert_relative_eq!(gtilde_infinity_profile(erf(1.0)).unwrap(), (-1.0f64).exp(), max_relative = 1e-10);
    assert_relative_eq!(
        gtilde_infinity_profile(0.4).unwrap(),
        gtilde_infinity_profile(-0.4).unwrap(),
        max_relative = 1e-15
    );
    assert!(gtilde_infinity_profile(1.01).is_err());
    assert!(gtilde_infinity_profile(f64::NAN).is_err());
}

#[test]
fn profile_of_centered_zonoid_is_circle() {
    let body = RevolutionBody::gaussian(0.0, 3).unwrap();
    for p in body.boundary_profile(181).unwrap() {
        assert_relative_eq!(p.axial.hypot(p.radial), 1.0 / SQRT_2PI, max_relative = 1e-14);
    }
    assert!(body.boundary_profile(1).is_err());
}

#[test]
fn limit_body_profile_follows_erf_curve() {
    let body = RevolutionBody::new(BodyKind::NormalizedLimit, 0.0, 2).unwrap();
    for p in body.boundary_profile(401).unwrap() {
        let f = gtilde_infinity_profile(p.axial).unwrap();
        assert!((p.radial - f).abs() < 1e-8, "θ={} {} vs {}", p.theta, p.radial, f);
    }
}

#[test]
fn gradients_match_finite_differences() {
    let h = 1e-6;
    for kind in KINDS {
        for &s in &[0.0, 0.7, 3.0, 25.0] {
            let body = RevolutionBody::new(kind, s, 2).unwrap();
            for i in 1..40 {
                let theta = PI * i as f64 / 40.0;
                let u = Direction::from_angle(theta);
                let (gx, gy) = body.gradient(u);
                let fx = (body.support(dir(u.x + h, u.yr)) - body.support(dir(u.x - h, u.yr))) / (2.0 * h);
                let fy = (body.support(dir(u.x, u.yr + h)) - body.support(dir(u.x, u.yr - h))) / (2.0 * h);
                let tol = 1e-6 * (1.0 + gx.abs().max(gy.abs()));
                assert!((gx - fx).abs() < tol, "{kind:?} s={s} θ={theta}: {gx} vs {fx}");
                assert!((gy - fy).abs() < tol, "{kind:?} s={s} θ={theta}: {gy} vs {fy}");
            }
        }
    }
}

#[test]
fn volume_examples() {
    let v = RevolutionBody::gaussian(0.0, 2).unwrap().volume().unwrap();
    assert_relative_eq!(v, 0.5, max_relative = 1e-10);
    let lim2 = RevolutionBody::new(BodyKind::NormalizedLimit, 0.0, 2).unwrap().volume().unwrap();
    assert_relative_eq!(lim2, 2.0 * 2f64.sqrt(), max_relative = 1e-10);
    let lim3 = RevolutionBody::new(BodyKind::NormalizedLimit, 0.0, 3).unwrap().volume().unwrap();
    assert_relative_eq!(lim3, 2.0 * PI / 3f64.sqrt(), max_relative = 1e-10);
    for m in 1..=6 {
        let lim = RevolutionBody::new(BodyKind::NormalizedLimit, 0.0, m).unwrap().volume().unwrap();
        assert_relative_eq!(lim, 2.0 * kappa(m - 1) / (m as f64).sqrt(), max_relative = 1e-10);
    }
}

#[test]
fn volume_matches_substitution_oracle() {
    for m in 1..=5 {
        for &s in &[0.0, 0.5, 1.0, 2.0, 5.0, 30.0] {
            let v = gaussian_zonoid_volume(m, s).unwrap();
            let o = volume_oracle(m, s);
            assert!((v / o - 1.0).abs() < 1e-9, "m={m} s={s}: {v} vs {o}");
        }
    }
    assert!(gaussian_zonoid_volume(0, 1.0).is_err());
}

#[test]
fn ellipsoid_volume_is_closed_form() {
    for m in 1..=4 {
        for &s in &[0.0, 1.0, 4.0] {
            let v = RevolutionBody::new(BodyKind::OuterEllipsoid, s, m).unwrap().volume().unwrap();
            let exact = lambda(s) * kappa(m) / (2.0 * PI).powf(0.5 * m as f64);
            assert_relative_eq!(v, exact, max_relative = 1e-9);
        }
    }
}

#[test]
fn normalized_volume_sits_between_ball_and_limit() {
    for m in 2..=4 {
        let lim = RevolutionBody::new(BodyKind::NormalizedLimit, 0.0, m).unwrap().volume().unwrap();
        let mut prev = f64::INFINITY;
        for &s in &[0.5, 1.0, 3.0, 10.0] {
            let v = RevolutionBody::new(BodyKind::Normalized, s, m).unwrap().volume().unwrap();
            assert!(v <= kappa(m) * (1.0 + 1e-9) && v >= lim * (1.0 - 1e-9));
            assert!(v < prev);
            prev = v;
        }
    }
}

#[test]
fn volume_bounds_hold() {
    let b = volume_bounds(2, 0.0).unwrap();
    assert_relative_eq!(b.upper, 0.5, max_relative = 1e-15);
    for m in 1..=4 {
        for &s in &[0.0, 0.5, 1.0, 2.0, 5.0, 100.0] {
            let b = volume_bounds(m, s).unwrap();
            assert!(b.lower_ball < b.upper);
            let v = gaussian_zonoid_volume(m, s).unwrap();
            assert!(v >= b.best_lower() * (1.0 - 1e-12) && v <= b.upper * (1.0 + 1e-8), "m={m} s={s}: {v} {b:?}");
        }
    }
}

#[test]
fn asymptote() {
    assert_relative_eq!(volume_asymptote(1).unwrap(), 1.0);
    assert_relative_eq!(volume_asymptote(2).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-14);
    for m in 2..=3 {
        let v = gaussian_zonoid_volume(m, 50.0).unwrap() / 50.0;
        assert!((v / volume_asymptote(m).unwrap() - 1.0).abs() < 0.01);
    }
}

#[test]
fn inclusion_examples() {
    let r = check_inclusion(4, 0.0, 2000, 1).unwrap();
    assert!(r.verdict.passed());
    assert!((r.min_ratio_lower - 1.0).abs() < 1e-14 && (r.max_ratio_upper - 1.0).abs() < 1e-14);
    let r = check_inclusion(3, 1.0, 10_000, 7).unwrap();
    assert!(r.verdict.passed() && r.violations == 0);
    assert!(r.min_ratio_lower >= r.b_infinity && r.max_ratio_upper <= 1.0);
    let r = check_inclusion(2, 100.0, 50_000, 2).unwrap();
    assert!((r.min_ratio_lower - b_infinity()).abs() < 1e-3);
    assert!(check_inclusion(2, 1.0, 0, 1).is_err());
}

#[test]
fn inclusion_is_deterministic() {
    let a = check_inclusion(5, 2.0, 9000, 42).unwrap();
    let b = check_inclusion(5, 2.0, 9000, 42).unwrap();
    assert_eq!(a.min_ratio_lower, b.min_ratio_lower);
    assert_eq!(a.worst_direction, b.worst_direction);
}

#[test]
fn monotone_in_mean() {
    for i in 0..24 {
        let u = Direction::from_angle(0.13 + 0.25 * i as f64);
        let mut prev = support_g(0.0, u);
        for k in 1..200 {
            let h = support_g(0.05 * k as f64, u);
            if u.x.abs() > 1e-3 {
                assert!(h > prev, "{u:?} k={k}");
            } else {
                assert!(h >= prev);
            }
            prev = h;
        }
    }
}

#[test]
fn normalized_shrinks() {
    for i in 1..12 {
        let u = Direction::from_angle(0.13 * i as f64);
        let mut prev = support_gtilde(0.05, u);
        for k in 2..100 {
            let h = support_gtilde(0.05 * k as f64, u);
            assert!(h < prev, "{u:?} k={k}");
            prev = h;
        }
    }
}

fn direction() -> impl Strategy<Value = Direction> {
    (-3.0..3.0f64, 0.0..3.0f64).prop_map(|(x, yr)| Direction::new_unchecked(x, yr))
}

proptest! {
    #[test]
    fn supports_are_sublinear(kind in 0usize..4, s in 0.0..20.0f64, u in direction(), v in direction(), a in 0.0..5.0f64) {
        let body = RevolutionBody::new(KINDS[kind], s, 3).unwrap();
        // yr is a norm, so u + v in R^m has radial part ≤ u.yr + v.yr; h is
        // increasing in yr, so the planar sum is the worst case
        let w = Direction::new_unchecked(u.x + v.x, u.yr + v.yr);
        let lhs = body.support(w);
        let rhs = body.support(u) + body.support(v);
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        let scaled = body.support(Direction::new_unchecked(a * u.x, a * u.yr));
        prop_assert!((scaled - a * body.support(u)).abs() <= 1e-12 * (1.0 + scaled));
    }

    #[test]
    fn supports_are_even_in_axial_sign(kind in 0usize..4, s in 0.0..20.0f64, u in direction()) {
        let body = RevolutionBody::new(KINDS[kind], s, 2).unwrap();
        let flipped = body.support(Direction::new_unchecked(-u.x, u.yr));
        prop_assert!((flipped - body.support(u)).abs() <= 1e-13 * (1.0 + flipped));
    }

    #[test]
    fn sandwich_pointwise(s in 0.0..200.0f64, theta in 0.0..PI) {
        let u = Direction::from_angle(theta);
        let hg = support_g(s, u);
        let he = support_tc_ellipsoid(s, u);
        prop_assert!(hg <= he + 1e-12);
        prop_assert!(hg >= b_infinity() * he - 1e-12);
    }
}
