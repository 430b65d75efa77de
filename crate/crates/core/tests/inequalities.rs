use affmax::inequalities::slab::{gamma_max, sigma0_bracket};
use affmax::inequalities::{
    check_c1n, check_cone_lemma, check_gradient, check_lemma42, lambda_roots, normalized_corpus, GradientMode,
    MassMethod, Sampler,
};
use affmax::{ConvexFamily, Domain};
use nalgebra::DMatrix;

fn paraboloid_on(rho: f64, k: f64) -> (ConvexFamily, Domain) {
    // k(|x|²/ρ² − 1) on B_ρ
    let u = ConvexFamily::quadratic(DMatrix::identity(2, 2) * (2.0 * k / (rho * rho)), vec![0.0; 2], -k).unwrap();
    (u, Domain::ball(vec![0.0; 2], rho).unwrap())
}

#[test]
fn ratios_are_scale_covariant() {
    let sampler = Sampler::uniform(32, 16);
    let q = MassMethod::Quadrature { resolution: 64 };
    let (u0, o0) = paraboloid_on(1.0, 1.0);
    let base = check_c1n(&u0, &o0, &sampler, q).unwrap().ratio;
    for (rho, k) in [(1.0, 3.0), (2.5, 1.0), (0.4, 7.0)] {
        let (u, o) = paraboloid_on(rho, k);
        let r = check_c1n(&u, &o, &sampler, q).unwrap().ratio;
        assert!((r - base).abs() <= 1e-9 * base, "c1n ρ={rho} k={k}: {r} vs {base}");
    }
}

#[test]
fn gradient_and_cone_on_paraboloid() {
    let (u, o) = paraboloid_on(1.0, 1.0);
    let (sampler, q) = (Sampler::uniform(64, 32), MassMethod::Quadrature { resolution: 64 });
    let mode = GradientMode::Sublevel { s: -0.75, t: 0.0 };
    let r = check_gradient(&u, &o, &mode, &sampler, q).unwrap();
    let exact = 1.0 / (8.0 / 3.0 * 4.0 * std::f64::consts::PI);
    assert!((r.ratio - exact).abs() <= 1e-6 * exact, "{} vs {exact}", r.ratio);
    let r = check_gradient(&u, &o, &GradientMode::Interior { x: vec![0.5, 0.0] }, &sampler, q).unwrap();
    let exact = 1.0 / (8.0 * std::f64::consts::PI);
    assert!((r.ratio - exact).abs() <= 1e-6 * exact, "{} vs {exact}", r.ratio);
    let r = check_cone_lemma(&u, &o, 0.0, -0.75, &sampler, q).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0, "{r:?}");
}

#[test]
fn lemma42_passes_on_normalized_corpus() {
    for e in normalized_corpus(64).unwrap() {
        let r = check_lemma42(&e.u, &e.omega, e.mass).unwrap();
        assert_eq!(r.pass, Some(true), "{}: {r:?}", e.name);
    }
}

#[test]
fn lambda_roots_are_ordered() {
    let gmax = gamma_max();
    for k in 1..10_000 {
        let gamma = k as f64 * 1e-4;
        if gamma >= gmax {
            assert!(lambda_roots(gamma).is_err());
            continue;
        }
        let (l1, l2) = lambda_roots(gamma).unwrap();
        assert!(0.0 < gamma && gamma < l1 && l1 < 0.5 && 0.5 < l2, "γ={gamma}: ({l1}, {l2})");
        assert!((l1 + l2 - 1.0).abs() <= 1e-14 && (l1 * l2 - gamma * (gamma + 1.0)).abs() <= 1e-14);
        let (lo, hi) = sigma0_bracket(gamma);
        assert!(lo < hi);
    }
}

#[test]
fn lambda_roots_example() {
    let (l1, l2) = lambda_roots(0.2).unwrap();
    assert!((l1 - 0.4).abs() <= 1e-14 && (l2 - 0.6).abs() <= 1e-14);
}
