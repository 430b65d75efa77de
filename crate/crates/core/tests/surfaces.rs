use affmax::families::{instance, sample_interior, Theorem, Variant};
use affmax::operator::residual;
use affmax::{ConvexFamily, FamilySpec};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

#[test]
fn jet_determinants_match_closed_forms() {
    let mut families: Vec<ConvexFamily> = [
        (Theorem::Thm81, 3, Some(0.3), Variant::Default),
        (Theorem::Thm82, 3, Some(0.2), Variant::Default),
        (Theorem::Thm91, 3, None, Variant::Default),
        (Theorem::Thm91, 10, None, Variant::TwPaper),
        (Theorem::Thm101, 4, Some(0.6), Variant::Default),
        (Theorem::Thm102, 3, Some(0.55), Variant::Default),
    ]
    .into_iter()
    .map(|(t, n, th, v)| instance(t, n, th, v).unwrap().family)
    .collect();
    families.push(ConvexFamily::power_radial(3, 1.4).unwrap());
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]);
    let q = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
    families.push(
        ConvexFamily::affine_image(
            ConvexFamily::quadratic(q, vec![0.0; 2], 0.0).unwrap(),
            a,
            vec![0.1, -0.2],
            vec![1.0, 0.0],
            2.0,
        )
        .unwrap(),
    );
    for u in &families {
        let pts = if matches!(u, ConvexFamily::PowerRadial { .. }) {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            (0..100).map(|_| (0..3).map(|_| rng.gen_range(0.1..0.5)).collect()).collect()
        } else {
            sample_interior(u, 100, 11).unwrap()
        };
        for x in &pts {
            let exact = u.closed_form_det(x).unwrap().expect("closed form available");
            let jet = u.hessian_det(x).unwrap();
            assert!((jet - exact).abs() <= 1e-9 * exact.abs(), "{}: {jet} vs {exact} at {x:?}", u.tag());
        }
    }
}

#[test]
fn rotational_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (t, n, th, v) in [
        (Theorem::Thm81, 4, Some(0.3), Variant::Default),
        (Theorem::Thm82, 3, Some(0.2), Variant::Default),
        (Theorem::Thm91, 10, None, Variant::TwPaper),
    ] {
        let inst = instance(t, n, th, v).unwrap();
        let dim = inst.family.dim();
        for x in sample_interior(&inst.family, 20, 2).unwrap() {
            let r = random_rotation(dim - 1, &mut rng);
            let y = DMatrix::from_column_slice(dim - 1, 1, &x[..dim - 1]);
            let mut rx: Vec<f64> = (&r * y).iter().copied().collect();
            rx.push(x[dim - 1]);
            let (a, b) = (inst.family.hessian_det(&x).unwrap(), inst.family.hessian_det(&rx).unwrap());
            assert!((a - b).abs() <= 1e-10 * a.abs(), "det {a} vs {b}");
            let (ra, rb) =
                (residual(&inst.family, inst.theta, &x).unwrap(), residual(&inst.family, inst.theta, &rx).unwrap());
            assert!((ra.normalized - rb.normalized).abs() <= 1e-10, "{ra:?} vs {rb:?}");
            // off the solution θ the residual is O(1) and must still be invariant
            let (oa, ob) = (residual(&inst.family, 0.2, &x).unwrap(), residual(&inst.family, 0.2, &rx).unwrap());
            assert!((oa.raw - ob.raw).abs() <= 1e-10 * oa.raw.abs().max(oa.scale), "{oa:?} vs {ob:?}");
        }
    }
}

fn spd(n: usize, entries: &[f64]) -> Vec<Vec<f64>> {
    let m = DMatrix::from_fn(n, n, |i, j| entries[(i * n + j) % entries.len()]);
    let s = &m * m.transpose() + DMatrix::identity(n, n);
    (0..n).map(|i| (0..n).map(|j| s[(i, j)]).collect()).collect()
}

proptest! {
    #[test]
    fn specs_round_trip_through_json(
        n in 2usize..5,
        entries in prop::collection::vec(-2.0f64..2.0, 4..16),
        alpha in prop::collection::vec(0.1f64..3.0, 2..5),
        c in -5.0f64..5.0,
    ) {
        let specs = vec![
            FamilySpec::Quadratic { q: spd(n, &entries), b: vec![c; n], c },
            FamilySpec::ProductFull { alpha: alpha.clone() },
            FamilySpec::ExpPower { n, alpha: 2.0 + alpha[0] },
            FamilySpec::PowerRadial { dim: n, beta: 1.0 + alpha[0] },
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let back: FamilySpec = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &spec);
            let u = back.build().unwrap();
            prop_assert_eq!(u.to_spec(), Some(spec));
        }
    }
}
