use affmax::families::{instance, sample_interior, Theorem, Variant};
use affmax::jets::{fd_crosscheck, DerivOrder, Jet, Layout};
use affmax::ConvexFamily;
use proptest::prelude::*;

fn poly_jet(dim: usize, coeffs: Vec<f64>) -> Jet {
    let len = Layout::get(dim, 4).len();
    Jet::from_coeffs(dim, 4, coeffs.into_iter().cycle().take(len).collect()).unwrap()
}

proptest! {
    #[test]
    fn product_rule_is_exact_on_gradients(
        a in prop::collection::vec(-3.0f64..3.0, 35),
        b in prop::collection::vec(-3.0f64..3.0, 35),
    ) {
        let (a, b) = (poly_jet(3, a), poly_jet(3, b));
        let ab = &a * &b;
        let g = ab.extract(DerivOrder::Gradient).data;
        let (ga, gb) = (a.gradient(), b.gradient());
        for i in 0..3 {
            prop_assert_eq!(g[i], ga[i] * b.value() + a.value() * gb[i]);
        }
    }

    #[test]
    fn square_then_root_is_identity(
        v in 0.1f64..5.0,
        rest in prop::collection::vec(-2.0f64..2.0, 14),
    ) {
        let mut c = vec![v];
        c.extend(rest);
        let j = Jet::from_coeffs(2, 4, c).unwrap();
        let back = j.powf(2.0).unwrap().powf(0.5).unwrap();
        // each order of the root recursion divides by the value
        let cond = (1.0 + 2.0 / v).powi(4);
        for (x, y) in back.coeffs().iter().zip(j.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-14 * cond * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn exp_log_round_trip(v in 0.2f64..4.0, rest in prop::collection::vec(-1.0f64..1.0, 9)) {
        let mut c = vec![v];
        c.extend(rest);
        let j = Jet::from_coeffs(3, 2, c).unwrap();
        let back = j.ln().unwrap().exp();
        for (x, y) in back.coeffs().iter().zip(j.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }
}

fn fd_check(u: &ConvexFamily, points: &[Vec<f64>]) {
    for x in points {
        let jet = u.eval_jet(x).unwrap();
        let scale = jet.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let d1 = fd_crosscheck(u, x, 1, 1e-5).unwrap();
        let d2 = fd_crosscheck(u, x, 2, 1e-4).unwrap();
        assert!(d1 <= 1e-6 * scale, "{}: gradient discrepancy {d1:e} at {x:?}", u.tag());
        assert!(d2 <= 1e-5 * scale, "{}: Hessian discrepancy {d2:e} at {x:?}", u.tag());
    }
}

#[test]
fn family_jets_agree_with_finite_differences() {
    let cases = [
        (Theorem::Thm81, 3, Some(0.3), Variant::Default),
        (Theorem::Thm82, 2, Some(0.2), Variant::Default),
        (Theorem::Thm91, 3, None, Variant::Default),
        (Theorem::Thm91, 4, None, Variant::High),
        (Theorem::Cor91, 3, None, Variant::Default),
        (Theorem::Thm101, 3, Some(0.6), Variant::Default),
        (Theorem::Thm102, 3, Some(0.55), Variant::Default),
    ];
    for (t, n, theta, v) in cases {
        let inst = instance(t, n, theta, v).unwrap();
        let pts = sample_interior(&inst.family, 10, 3).unwrap();
        fd_check(&inst.family, &pts);
    }
    let power = ConvexFamily::power_radial(2, 1.5).unwrap();
    fd_check(&power, &[vec![0.3, -0.4], vec![0.7, 0.1]]);
}
