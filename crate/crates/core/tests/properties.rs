//! Property tests for the geometric and topological invariants.

use std::f64::consts::{PI, TAU};

use elliptic_links::geometry::build_in_plane_rotation;
use elliptic_links::*;
use proptest::prelude::*;

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("not too short", |(x, y, z)| (x * x + y * y + z * z) > 0.01)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize())
}

fn spec_with(halfwidth: f64) -> impl Strategy<Value = EllipseSpec> {
    (
        0.5..2.0f64,
        1.0..3.0f64,
        0.0..PI,
        unit_vector(),
        (-halfwidth..=halfwidth, -halfwidth..=halfwidth, -halfwidth..=halfwidth),
    )
        .prop_map(|(rho, alpha, phi, n, (x, y, z))| {
            EllipseSpec::new(rho, alpha, phi, n, Vec3::new(x, y, z)).unwrap()
        })
}

fn ellipse_with(halfwidth: f64) -> impl Strategy<Value = Ellipse> {
    spec_with(halfwidth).prop_map(|s| make_ellipse(s).unwrap())
}

fn rotation() -> impl Strategy<Value = Mat3> {
    (unit_vector(), 0.0..TAU).prop_map(|(n, t)| build_normal_rotation(&n) * build_in_plane_rotation(t))
}

/// Distance from `p` to the ellipse, by dense sampling plus golden-section refinement.
fn distance_to_ellipse(e: &Ellipse, p: &Vec3) -> f64 {
    let samples = 720;
    let dist = |t: f64| (e.point_at(t) - p).norm();
    let step = TAU / samples as f64;
    let best = (0..samples)
        .map(|k| k as f64 * step)
        .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
        .unwrap();
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if dist(m1) < dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    dist(0.5 * (lo + hi))
}

/// Numerator and denominator of the printed closed-form tangent quotient for
/// the branch with upper signs (`+`) or lower signs (`-`).
fn closed_form_quotient(pc: &PlaneCrossing, upper: bool) -> (f64, f64) {
    let (l, m, n) = (pc.lambda, pc.mu, pc.nu);
    let r2 = l * l + m * m;
    let s = if upper { 1.0 } else { -1.0 };
    let num = (-l * n + s * (l * l * m * m + m.powi(4) - m * m * n * n).sqrt()) / r2;
    let den = (-n + l * l * n / r2 - s * l * (-m * m * (n * n - l * l - m * m)).sqrt() / r2) / m;
    (num, den)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normal_rotation_is_orthogonal_and_maps_z(n in unit_vector()) {
        let q = build_normal_rotation(&n);
        prop_assert!((q.transpose() * q - Mat3::identity()).abs().max() < 1e-10);
        prop_assert!((q * Vec3::z() - n).norm() < 1e-10);
        prop_assert!((q.determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normal_rotation_near_poles(dx in -1e-6..1e-6f64, dy in -1e-6..1e-6f64, south in any::<bool>()) {
        let z = if south { -1.0 } else { 1.0 };
        let n = Vec3::new(dx, dy, z).normalize();
        let q = build_normal_rotation(&n);
        prop_assert!((q.transpose() * q - Mat3::identity()).abs().max() < 1e-10);
        prop_assert!((q * Vec3::z() - n).norm() < 1e-10);
    }

    #[test]
    fn ellipse_invariants(spec in spec_with(2.0)) {
        let e = make_ellipse(spec).unwrap();
        prop_assert!((e.matrix().column(2) - spec.normal()).norm() < 1e-10);
        let rho2 = spec.rho() * spec.rho();
        prop_assert!((e.matrix().determinant().abs() - rho2).abs() < 1e-9 * rho2);
        prop_assert!((e.matrix() * e.inverse() - Mat3::identity()).abs().max() < 1e-10);
    }

    #[test]
    fn inverse_transform_round_trip(e in ellipse_with(2.0), t in 0.0..TAU) {
        let q = e.inverse_transform(&e.point_at(t));
        prop_assert!((q - Vec3::new(t.cos(), t.sin(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn discretized_points_lie_on_unit_circle(e in ellipse_with(2.0)) {
        for p in e.discretize(100).unwrap().points() {
            let q = e.inverse_transform(p);
            prop_assert!(q.z.abs() < 1e-9);
            prop_assert!((q.x.hypot(q.y) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_round_trip(spec in spec_with(2.0)) {
        let e = make_ellipse(spec).unwrap();
        let fit = fit_from_points(&e.discretize(360).unwrap()).unwrap();
        prop_assert!((fit.rho() - spec.rho()).abs() < 1e-6 * spec.rho());
        prop_assert!((fit.alpha() - spec.alpha()).abs() < 1e-6 * spec.alpha());
        prop_assert!(fit.normal().cross(&spec.normal()).norm() < 1e-6);
        let refit = make_ellipse(fit).unwrap();
        for p in e.discretize(36).unwrap().points() {
            prop_assert!(distance_to_ellipse(&refit, p) < 1e-8);
        }
    }

    #[test]
    fn crossing_roots_have_small_residual(e1 in ellipse_with(1.0), e2 in ellipse_with(1.0)) {
        let pc = plane_crossing_coeffs(&e1, &e2);
        if let Ok(true) = pc.crossing_exists() {
            for t in pc.crossing_angles().unwrap() {
                prop_assert!(pc.eval(t).abs() < 1e-9 * pc.scale());
                prop_assert!((0.0..TAU).contains(&t));
            }
        }
    }

    #[test]
    fn closed_form_quotient_matches_phase_roots(l in -3.0..3.0f64, m in -3.0..3.0f64, n in -3.0..3.0f64) {
        let pc = PlaneCrossing { lambda: l, mu: m, nu: n };
        prop_assume!(m.abs() > 1e-3);
        prop_assume!(matches!(pc.crossing_exists(), Ok(true)));
        let roots = pc.crossing_angles().unwrap();
        // The printed quotient's numerator tracks cos and its denominator sin,
        // so it is compared against cot(θ) by cross-multiplication.
        for upper in [true, false] {
            let (num, den) = closed_form_quotient(&pc, upper);
            if den.abs() <= 1e-12 {
                continue;
            }
            let matched = roots.iter().any(|t| {
                (num * t.sin() - den * t.cos()).abs() <= 1e-8 * num.abs().max(den.abs())
            });
            prop_assert!(matched, "branch {upper}: quotient {num}/{den} vs roots {roots:?}");
        }
    }

    #[test]
    fn pair_swap_consistency(e1 in ellipse_with(1.0), e2 in ellipse_with(1.0)) {
        let (Ok(ab), Ok(ba)) = (classify_pair(&e1, &e2), classify_pair(&e2, &e1)) else {
            return Ok(());
        };
        prop_assert_eq!(ab.tag, ba.tag.swapped());
    }

    #[test]
    fn pair_rigid_motion_and_scale(
        e1 in ellipse_with(1.0),
        e2 in ellipse_with(1.0),
        q in rotation(),
        t in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        s in 0.1..10.0f64,
    ) {
        let Ok(base) = classify_pair(&e1, &e2) else { return Ok(()) };
        prop_assume!(base.margin > 1e-6);
        let t = Vec3::new(t.0, t.1, t.2);
        let moved = classify_pair(&e1.transformed(&q, &t, s).unwrap(), &e2.transformed(&q, &t, s).unwrap()).unwrap();
        prop_assert_eq!(base.tag, moved.tag);
    }

    #[test]
    fn triple_permutation_invariance(a in ellipse_with(0.3), b in ellipse_with(0.3), c in ellipse_with(0.3)) {
        let es = [a, b, c];
        let Ok(base) = classify_triple(&a, &b, &c) else { return Ok(()) };
        prop_assume!(base.margin > 1e-6);
        for p in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let r = classify_triple(&es[p[0]], &es[p[1]], &es[p[2]]).unwrap();
            prop_assert_eq!(r.verdict, base.verdict);
        }
    }

    #[test]
    fn triple_report_invariants(a in ellipse_with(0.3), b in ellipse_with(0.3), c in ellipse_with(0.3)) {
        let Ok(r) = classify_triple(&a, &b, &c) else { return Ok(()) };
        let tags = r.tags();
        prop_assert_eq!(
            r.verdict == TripleVerdict::Borromean,
            r.cyclic_piercing.is_some() && r.triple_point_interior && !tags.contains(&PairTag::Hopf)
        );
        if tags.contains(&PairTag::Hopf) {
            prop_assert_eq!(r.verdict, TripleVerdict::ContainsHopf);
        }
        if r.verdict == TripleVerdict::Borromean {
            prop_assert!(tags.iter().all(|t| t.is_pierce()));
        }
        if let Some(p) = r.triple_point {
            for e in [&a, &b, &c] {
                let scale = 1f64.max(p.norm()).max(e.center().norm());
                prop_assert!(e.normal().dot(&(p - e.center())).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn round_circles_are_never_borromean(
        r in (0.5..1.5f64, 0.5..1.5f64, 0.5..1.5f64),
        n in (unit_vector(), unit_vector(), unit_vector()),
        c in (-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64),
    ) {
        let e = |radius, normal, center| make_ellipse(EllipseSpec::circle(radius, normal, center).unwrap()).unwrap();
        let a = e(r.0, n.0, Vec3::zeros());
        let b = e(r.1, n.1, Vec3::new(c.0, c.1, c.2));
        let d = e(r.2, n.2, Vec3::new(c.3, c.4, c.5));
        if let Ok(report) = classify_triple(&a, &b, &d) {
            prop_assert_ne!(report.verdict, TripleVerdict::Borromean);
        }
    }

    #[test]
    fn gln_is_integral_and_symmetric(e1 in ellipse_with(0.5), e2 in ellipse_with(0.5)) {
        let (p1, p2) = (e1.discretize(48).unwrap(), e2.discretize(48).unwrap());
        if let (Ok(ab), Ok(ba)) = (gln_discrete(&p1, &p2), gln_discrete(&p2, &p1)) {
            prop_assert!((ab.abs() - ab.abs().round()).abs() < 1e-6, "gln {ab}");
            prop_assert!(ab.abs().round() <= 1.0);
            prop_assert!((ab - ba).abs() < 1e-9);
        }
    }
}

#[test]
fn closed_form_quotient_is_cotangent_not_tangent() {
    let pc = PlaneCrossing { lambda: 0.0, mu: 2.0, nu: -1.0 };
    let roots = pc.crossing_angles().unwrap();
    let mut expected = [PI / 6.0, 5.0 * PI / 6.0];
    let mut got = roots;
    got.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-12);
    }
    for upper in [true, false] {
        let (num, den) = closed_form_quotient(&pc, upper);
        let q = num / den;
        assert!((q.abs() - 3f64.sqrt()).abs() < 1e-12, "quotient {q}");
        assert!(roots.iter().any(|t| (q - 1.0 / t.tan()).abs() < 1e-9));
        assert!(roots.iter().all(|t| (q - t.tan()).abs() > 0.1));
    }
}

#[test]
fn fit_tolerates_small_noise() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let spec = EllipseSpec::new(1.3, 1.7, 0.4, Vec3::new(0.2, -0.5, 0.8), Vec3::new(0.3, 0.1, -0.2)).unwrap();
    let e = make_ellipse(spec).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 1e-6).unwrap();
    let points: Vec<Vec3> = e
        .discretize(360)
        .unwrap()
        .points()
        .iter()
        .map(|p| p + Vec3::new(noise.sample(&mut rng), noise.sample(&mut rng), noise.sample(&mut rng)))
        .collect();
    let fit = fit_from_points(&Polyline3::closed(points).unwrap()).unwrap();
    assert!((fit.rho() - spec.rho()).abs() < 1e-4);
    assert!((fit.alpha() - spec.alpha()).abs() < 1e-4);
}

#[test]
fn collinear_points_are_rank_deficient() {
    let points: Vec<Vec3> = (0..10).map(|k| Vec3::new(k as f64, 2.0 * k as f64, 0.0)).collect();
    let err = fit_from_points(&Polyline3::closed(points).unwrap()).unwrap_err();
    assert_eq!(err.degeneracy(), Some(Degeneracy::RankDeficient));
}
