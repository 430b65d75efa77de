use affmax::families::{instance, sample_interior, Theorem, Variant};
use affmax::mameasure::{
    doubling_ratio, halving_ratio, john_normalize_points, ma_mass, normal_image_area, sublevel, PLConvex,
};
use affmax::{ConvexFamily, Domain};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn quadratic(n: usize) -> ConvexFamily {
    let q = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 + i as f64 } else { 0.5 });
    ConvexFamily::quadratic(q, vec![0.3; n], -1.0).unwrap()
}

#[test]
fn quadratic_doubling_is_a_power_of_sigma() {
    for n in [2, 3] {
        let u = quadratic(n);
        let x0 = vec![0.1; n];
        let s = sublevel(&u, &x0, 1.0).unwrap();
        for sigma in [0.3, 0.5, 0.7] {
            let r = doubling_ratio(&u, &s, sigma, 64).unwrap();
            let exact = sigma.powi(-(n as i32));
            assert!((r - exact).abs() <= 1e-6 * exact, "N={n} σ={sigma}: {r} vs {exact}");
        }
    }
}

#[test]
fn doubling_is_at_least_one() {
    for (t, n, th) in [(Theorem::Thm81, 2, Some(0.3)), (Theorem::Thm101, 3, Some(0.6))] {
        let inst = instance(t, n, th, Variant::Default).unwrap();
        let x0 = sample_interior(&inst.family, 1, 7).unwrap().remove(0);
        let s = sublevel(&inst.family, &x0, 0.05).unwrap();
        for sigma in [0.3, 0.5, 0.7] {
            let r = doubling_ratio(&inst.family, &s, sigma, 48).unwrap();
            assert!(r >= 1.0, "{} σ={sigma}: {r}", t.label());
        }
    }
}

#[test]
fn normal_image_tracks_mass() {
    let u = quadratic(2);
    let omega = Domain::boxed(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap();
    let mass = ma_mass(&u, &omega, 64).unwrap().value;
    let pl = PLConvex::from_family(&u, &omega, 33).unwrap();
    let area = normal_image_area(&pl, None).unwrap();
    assert!((area - mass).abs() <= 0.1 * mass, "{area} vs {mass}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn halving_is_at_most_a_half(which in 0usize..4, seed in 0u64..1000, dir in prop::collection::vec(-1.0f64..1.0, 3), len in 0.01f64..0.2) {
        let (t, n, th, v) = [
            (Theorem::Thm81, 3, Some(0.3), Variant::Default),
            (Theorem::Thm82, 3, Some(0.2), Variant::Default),
            (Theorem::Thm91, 3, None, Variant::Default),
            (Theorem::Thm102, 3, Some(0.55), Variant::Default),
        ][which];
        let inst = instance(t, n, th, v).unwrap();
        let x0 = sample_interior(&inst.family, 1, seed).unwrap().remove(0);
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let z: Vec<f64> = dir.iter().map(|d| d * len / norm).collect();
        let end: Vec<f64> = x0.iter().zip(&z).map(|(a, b)| a + b).collect();
        prop_assume!(inst.family.contains(&end));
        let r = halving_ratio(&inst.family, &x0, &z).unwrap();
        prop_assert!(r <= 0.5 + 1e-9, "{r}");
        prop_assert!(r > 0.0);
    }

    #[test]
    fn john_rho_is_affine_invariant(m in prop::collection::vec(-1.0f64..1.0, 4), shift in prop::collection::vec(-5.0f64..5.0, 2)) {
        let u = quadratic(2);
        let s = sublevel(&u, &[0.2, -0.1], 0.5).unwrap();
        let pts = s.boundary_points();
        let a = DMatrix::from_row_slice(2, 2, &m) + DMatrix::identity(2, 2) * 1.5;
        prop_assume!(a.determinant().abs() > 0.1);
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| (0..2).map(|i| a[(i, 0)] * p[0] + a[(i, 1)] * p[1] + shift[i]).collect())
            .collect();
        let (j0, j1) = (john_normalize_points(&pts).unwrap(), john_normalize_points(&moved).unwrap());
        prop_assert!((j0.rho - j1.rho).abs() <= 1e-6, "{} vs {}", j0.rho, j1.rho);
        prop_assert!(j0.rho >= 1.0);
    }
}

#[test]
fn pyramid_normal_image_is_the_dual_diamond() {
    // ∂u(0) for max(|x₁|,|x₂|) is the ℓ¹ unit ball, of area 2; every other node adds no area
    let omega = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let pl = PLConvex::from_fn(|x| Ok(x[0].abs().max(x[1].abs())), &omega, 21).unwrap();
    assert_eq!(pl.convexity_defect().violations, 0);
    let area = normal_image_area(&pl, Some(401)).unwrap();
    assert!((area - 2.0).abs() <= 0.02, "{area}");
    let c = pl.n / 2;
    let ring = pl.one_ring_area(c, c).unwrap();
    assert!((ring - 2.0).abs() <= 1e-12, "{ring}");
}
