use affmax::families::{
    critical_dimension_bounds, instance, make_thm81, sample_interior, solve_alpha_full, solve_alpha_halfspace,
    symmetric_f, theta_of_alpha, ProductVariant, Theorem, ThetaRange, Variant,
};
use affmax::operator::{max_normalized, residual, residual_scan};
use affmax::surfaces::family::Convexity;
use affmax::Error;
use proptest::prelude::*;

fn interior_theta(range: &ThetaRange, f: f64) -> f64 {
    range.lo + (range.hi - range.lo) * f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halfspace_round_trip(dim in 3usize..=8, f in 0.01f64..0.99) {
        let theta = interior_theta(&ThetaRange::of(Theorem::Thm101, dim), f);
        let (alpha, _) = solve_alpha_halfspace(theta, dim).unwrap();
        let back = theta_of_alpha(&alpha, dim, ProductVariant::Halfspace).unwrap();
        prop_assert!((back - theta).abs() <= 1e-10, "{theta} -> {alpha:?} -> {back}");
    }

    #[test]
    fn full_round_trip(dim in 3usize..=8, f in 0.01f64..0.99) {
        let theta = interior_theta(&ThetaRange::of(Theorem::Thm102, dim), f);
        let (alpha, _) = solve_alpha_full(theta, dim).unwrap();
        let back = theta_of_alpha(&alpha, dim, ProductVariant::Full).unwrap();
        prop_assert!((back - theta).abs() <= 1e-10, "{theta} -> {alpha:?} -> {back}");
    }

    #[test]
    fn ranged_instances_solve_the_equation(which in 0usize..4, dim in 2usize..=5, f in 0.2f64..0.98, seed in 0u64..1000) {
        let theorem = [Theorem::Thm81, Theorem::Thm82, Theorem::Thm101, Theorem::Thm102][which];
        let dim = if which >= 2 { dim.max(3) } else { dim };
        let theta = interior_theta(&ThetaRange::of(theorem, dim), f);
        let inst = instance(theorem, dim, Some(theta), Variant::Default).unwrap();
        let pts = sample_interior(&inst.family, 20, seed).unwrap();
        let m = max_normalized(&residual_scan(&inst.family, theta, &pts).unwrap());
        prop_assert!(m <= 1e-7, "{} N={dim} θ={theta}: {m:e}", theorem.label());
        for p in &pts {
            prop_assert_eq!(inst.family.is_convex_at(p).unwrap().class, Convexity::StrictlyConvex);
        }
    }
}

#[test]
fn symmetric_f_decreases_for_large_s() {
    for dim in 3..=8 {
        let range = ThetaRange::of(Theorem::Thm102, dim);
        for f in [0.1, 0.5, 0.9] {
            let theta = interior_theta(&range, f);
            let values: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&s| symmetric_f(theta, dim, s).0).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "N={dim} θ={theta}: {values:?}");
        }
    }
}

#[test]
fn critical_bounds_are_ordered() {
    for k in 1..1000 {
        let theta = k as f64 * 1e-3;
        let (lo, hi) = critical_dimension_bounds(theta).unwrap();
        assert!(lo <= hi, "θ = {theta}: ({lo}, {hi})");
    }
}

#[test]
fn residual_is_sensitive_to_theta() {
    for dim in [2, 3] {
        for theta in [0.1, 0.3] {
            let u = make_thm81(dim, theta, 1.0, 1.0, 1.0, 1.0).unwrap();
            let pts = sample_interior(&u, 20, 5).unwrap();
            let off = pts.iter().map(|p| residual(&u, theta + 0.05, p).unwrap().normalized.abs()).fold(0.0, f64::max);
            assert!(off > 1e-3, "N={dim} θ={theta}: {off:e}");
        }
    }
}

#[test]
fn out_of_range_theta_names_the_precondition() {
    let err = instance(Theorem::Thm81, 2, Some(0.6), Variant::Default).unwrap_err();
    assert!(matches!(err, Error::ThetaOutOfRange(_)));
    assert!(err.to_string().contains("θ must lie in (0,1/2) per Theorem 8.1"), "{err}");
    let err = instance(Theorem::Thm101, 4, Some(0.8), Variant::Default).unwrap_err();
    assert!(err.to_string().contains("(1/2,3/4) per Theorem 10.1"), "{err}");
}

#[test]
fn exponent_eleven_twelfths_in_ten_dimensions() {
    let inst = instance(Theorem::Thm91, 10, None, Variant::TwPaper).unwrap();
    assert!((inst.theta - 11.0 / 12.0).abs() < 1e-15);
    let pts = sample_interior(&inst.family, 100, 9).unwrap();
    assert!(max_normalized(&residual_scan(&inst.family, inst.theta, &pts).unwrap()) <= 1e-7);
}
