use affmax::families::{instance, sample_interior, Theorem, Variant};
use affmax::operator::{
    max_normalized, product_full_predicted_residual, product_halfspace_predicted_residual, residual, residual_scan,
    tw_exponential_predicted_residual, warren_predicted_residual,
};
use affmax::surfaces::{CurveExpr, Interval};
use affmax::{ConvexFamily, ScalarCurve};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn radius(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn warren_reduction_matches_generic(
        n in 1usize..4,
        theta in 0.05f64..0.95,
        a in 0.2f64..2.0,
        k in 0.2f64..0.9,
        b in 0.1f64..2.0,
        seed in 0u64..1000,
    ) {
        // 1/η concave keeps the Hessian positive; θ is arbitrary so the residual is O(1)
        let eta = ScalarCurve::expr(CurveExpr::monomial(a, -k), Interval::POSITIVE);
        let phi = ScalarCurve::expr(
            CurveExpr::sum(vec![CurveExpr::exp(CurveExpr::monomial(b, 1.0)), CurveExpr::monomial(1.0, 4.0)]),
            Interval::POSITIVE,
        );
        let u = ConvexFamily::warren(n, eta.clone(), phi.clone()).unwrap();
        for x in sample_interior(&u, 10, seed).unwrap() {
            let r = residual(&u, theta, &x).unwrap();
            let pred = warren_predicted_residual(&eta, &phi, theta, n, radius(&x[..n]), x[n]).unwrap();
            prop_assert!((r.raw - pred).abs() <= 1e-8 * r.scale, "{} vs {pred}", r.raw);
        }
    }

    #[test]
    fn exponential_condition_matches_generic(
        n in 2usize..5,
        alpha in 2.0f64..6.0,
        theta in 0.05f64..0.95,
        seed in 0u64..1000,
    ) {
        let u = ConvexFamily::exp_power(n, alpha).unwrap();
        for x in sample_interior(&u, 10, seed).unwrap() {
            let r = residual(&u, theta, &x).unwrap();
            let pred = tw_exponential_predicted_residual(alpha, theta, n, radius(&x[..n]), x[n]).unwrap();
            prop_assert!((r.raw - pred).abs() <= 1e-8 * r.scale, "{} vs {pred}", r.raw);
        }
    }

    #[test]
    fn product_conditions_match_generic(
        alpha in prop::collection::vec(0.2f64..3.0, 2..4),
        theta in 0.05f64..0.95,
        seed in 0u64..1000,
    ) {
        let half = ConvexFamily::product_halfspace(alpha.clone()).unwrap();
        for x in sample_interior(&half, 10, seed).unwrap() {
            let r = residual(&half, theta, &x).unwrap();
            let pred = product_halfspace_predicted_residual(&alpha, theta, &x).unwrap();
            prop_assert!((r.raw - pred).abs() <= 1e-8 * r.scale, "{} vs {pred}", r.raw);
        }
        let full = ConvexFamily::product_full(alpha.clone()).unwrap();
        for x in sample_interior(&full, 10, seed).unwrap() {
            let r = residual(&full, theta, &x).unwrap();
            let pred = product_full_predicted_residual(&alpha, theta, &x).unwrap();
            prop_assert!((r.raw - pred).abs() <= 1e-8 * r.scale, "{} vs {pred}", r.raw);
        }
    }

    #[test]
    fn unimodular_images_stay_solutions(
        m in prop::collection::vec(-1.0f64..1.0, 4),
        shift in prop::collection::vec(-0.2f64..0.2, 2),
        linear in prop::collection::vec(-3.0f64..3.0, 2),
        seed in 0u64..1000,
    ) {
        let mut a = DMatrix::from_row_slice(2, 2, &m) + DMatrix::identity(2, 2) * 2.0;
        let d = a.determinant();
        prop_assume!(d.abs() > 0.1);
        a /= d.abs().sqrt();
        // a quadratic solves the equation for every θ
        let q = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let quad = ConvexFamily::quadratic(q, vec![0.0; 2], 0.0).unwrap();
        let img = ConvexFamily::affine_image(quad, a.clone(), shift.clone(), linear.clone(), 1.0).unwrap();
        let pts: Vec<Vec<f64>> = sample_interior(&img, 20, seed).unwrap();
        prop_assert!(max_normalized(&residual_scan(&img, 0.7, &pts).unwrap()) <= 1e-9);

        // product family in the plane orthant, pulled back by a map keeping the sample inside
        let inst = instance(Theorem::Thm101, 3, Some(0.6), Variant::Default).unwrap();
        let mut a3 = DMatrix::identity(3, 3);
        a3[(2, 0)] = m[0];
        a3[(2, 1)] = m[1];
        a3[(0, 0)] = 2.0;
        a3[(1, 1)] = 0.5;
        let img = ConvexFamily::affine_image(inst.family.clone(), a3, vec![0.0; 3], vec![linear[0], 0.0, linear[1]], 0.0).unwrap();
        let pts: Vec<Vec<f64>> = sample_interior(&inst.family, 20, seed)
            .unwrap()
            .into_iter()
            .map(|p| vec![p[0] / 2.0, p[1] * 2.0, p[2] - m[0] * p[0] / 2.0 - m[1] * p[1] * 2.0])
            .collect();
        prop_assert!(max_normalized(&residual_scan(&img, 0.6, &pts).unwrap()) <= 1e-7);
    }
}
