use std::fs;
use std::io::Write;

use serde_json::json;

use affmax::families::{
    instance, sample_interior, solve_alpha_full, solve_alpha_halfspace, theta_of_alpha, ProductVariant, Theorem,
    ThetaRange, Variant,
};
use affmax::inequalities::sharpness::{last_change, power_trend, slab_trend, strictly_increasing};
use affmax::inequalities::{
    assemble_slab, check_c1n, check_cone_lemma, check_gradient, check_lemma42, check_lemma43, lambda_roots,
    normalized_corpus, standard_corpus, GradientMode, InequalityReport, Sampler,
};
use affmax::mameasure::{average_density, doubling_ratio, halving_ratio, john_normalize, sublevel};
use affmax::operator::{max_normalized, residual_scan, ResidualReport};
use affmax::ConvexFamily;

use crate::config::{Context, FamilySel};
use crate::{Check, Corpus, Failure, Measure, ProductKind};

fn emit(ctx: &Context, text: &str) -> Result<(), Failure> {
    match &ctx.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn gate(ok: bool, what: String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Gate(what))
    }
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

/// θ grid values print without accumulated stepping noise.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn default_dim(theorem: Theorem, variant: Variant) -> usize {
    match (theorem, variant) {
        (_, Variant::TwPaper) => 10,
        (Theorem::Cor91 | Theorem::Thm101 | Theorem::Thm102, _) => 3,
        _ => 2,
    }
}

struct Selected {
    family: ConvexFamily,
    theta: Option<f64>,
    label: String,
}

fn select(sel: &FamilySel, need_theta: bool) -> Result<Selected, Failure> {
    if let Some(e) = &sel.spec_error {
        return Err(Failure::Usage(e.clone()));
    }
    if let Some(spec) = &sel.spec {
        if sel.theorem.is_some() {
            return Err(Failure::Usage("give either --spec or --theorem, not both".into()));
        }
        let family = spec.build()?;
        if need_theta && sel.theta.is_none() {
            return Err(Failure::Usage("a family spec needs --theta".into()));
        }
        return Ok(Selected { label: family.tag().to_string(), family, theta: sel.theta });
    }
    let Some(name) = &sel.theorem else {
        return Err(Failure::Usage("give --theorem or --spec".into()));
    };
    let theorem = Theorem::parse(name)?;
    let variant = Variant::parse(sel.variant.as_deref().unwrap_or("default"))?;
    let dim = sel.n.unwrap_or_else(|| default_dim(theorem, variant));
    let inst = instance(theorem, dim, sel.theta, variant)?;
    Ok(Selected { family: inst.family, theta: Some(inst.theta), label: format!("{} N={dim}", theorem.label()) })
}

pub fn verify(ctx: &Context, sel: &FamilySel, samples: Option<usize>) -> Result<(), Failure> {
    let samples = samples.unwrap_or(100);
    let tol = ctx.tol.unwrap_or(1e-7);
    let s = select(sel, true)?;
    let theta = s.theta.expect("selected with θ");
    let pts = sample_interior(&s.family, samples, ctx.seed)?;
    let reports = residual_scan(&s.family, theta, &pts)?;
    let mut out = ResidualReport::csv_header(s.family.dim());
    out.push('\n');
    for r in &reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    emit(ctx, &out)?;
    let m = max_normalized(&reports);
    eprintln!("{}: θ = {theta}, max normalized residual {m:e} over {samples} points (tol {tol:e})", s.label);
    gate(m <= tol, format!("max normalized residual {m:e} exceeds {tol:e}"))
}

/// `lo:hi:step`, interior points only.
fn theta_grid(range: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("bad θ range '{range}': {e}")))?;
    let [lo, hi, step] = parts[..] else {
        return Err(Failure::Usage(format!("θ range must be lo:hi:step, got '{range}'")));
    };
    if !(step > 0.0 && hi > lo) {
        return Err(Failure::Usage(format!("θ range needs lo < hi and step > 0, got '{range}'")));
    }
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let t = tidy(lo + k as f64 * step);
        if t >= hi - 1e-9 * step {
            break;
        }
        out.push(t);
        k += 1;
    }
    Ok(out)
}

pub fn scan(ctx: &Context, sel: &FamilySel, range: Option<String>, samples: Option<usize>) -> Result<(), Failure> {
    let samples = samples.unwrap_or(100);
    let tol = ctx.tol.unwrap_or(1e-7);
    let Some(name) = &sel.theorem else {
        return Err(Failure::Usage("scan needs --theorem".into()));
    };
    let theorem = Theorem::parse(name)?;
    let dim = sel.n.unwrap_or_else(|| default_dim(theorem, Variant::Default));
    let mut jobs: Vec<(Option<f64>, Variant)> = Vec::new();
    match theorem {
        Theorem::Thm91 => {
            if range.is_some() {
                eprintln!("warning: θ is fixed to (N−1)/N for {}; the θ range is ignored", theorem.label());
            }
            jobs.push((None, Variant::Default));
            if dim >= 3 {
                jobs.push((None, Variant::High));
            } else {
                eprintln!("warning: the α = (N−1)(N−2) branch needs N >= 3");
            }
        }
        Theorem::Cor91 => jobs.push((None, Variant::Default)),
        _ => {
            let Some(range) = range else {
                return Err(Failure::Usage(format!("scanning {} needs --theta-range lo:hi:step", theorem.label())));
            };
            let admissible = ThetaRange::of(theorem, dim);
            for t in theta_grid(&range)? {
                if admissible.contains(t) {
                    jobs.push((Some(t), Variant::Default));
                } else {
                    eprintln!(
                        "warning: skipping θ = {t}: outside {} for {} (N = {dim})",
                        admissible.text,
                        theorem.label()
                    );
                }
            }
        }
    }
    let mut out = String::from("theorem,N,theta,variant,params,max_residual,pass\n");
    let mut failures = 0;
    for (theta, variant) in jobs {
        let inst = instance(theorem, dim, theta, variant)?;
        let pts = sample_interior(&inst.family, samples, ctx.seed)?;
        let m = max_normalized(&residual_scan(&inst.family, inst.theta, &pts)?);
        let pass = m <= tol;
        failures += usize::from(!pass);
        let variant = match variant {
            Variant::Default => "default",
            Variant::High => "high",
            Variant::TwPaper => "tw-paper",
        };
        out.push_str(&format!(
            "{},{dim},{},{variant},{},{m:e},{pass}\n",
            theorem.label(),
            inst.theta,
            floats(&inst.params)
        ));
    }
    emit(ctx, &out)?;
    gate(failures == 0, format!("{failures} row(s) exceed the residual tolerance {tol:e}"))
}

pub fn inequality(ctx: &Context, check: Check, corpus: Corpus, s: f64, t: f64, sigma: f64) -> Result<(), Failure> {
    let grids = ctx.grid.clone().unwrap_or_else(|| vec![64, 128]);
    let tol = ctx.tol.unwrap_or(0.02);
    let mut rows: Vec<(String, InequalityReport)> = Vec::new();
    for &g in &grids {
        let entries = match corpus {
            Corpus::Standard => standard_corpus(g)?,
            Corpus::Normalized => normalized_corpus(g)?,
        };
        let sampler = Sampler::uniform(g, (g / 2).max(2));
        for e in entries {
            let r = match check {
                Check::C1n => check_c1n(&e.u, &e.omega, &sampler, e.mass)?,
                Check::Gradient => check_gradient(&e.u, &e.omega, &GradientMode::Sublevel { s, t }, &sampler, e.mass)?,
                Check::Cone => check_cone_lemma(&e.u, &e.omega, t, s, &sampler, e.mass)?,
                Check::Lemma42 => check_lemma42(&e.u, &e.omega, e.mass)?,
                Check::Lemma43 => check_lemma43(&e.u, &e.omega, sigma, e.mass)?,
            };
            rows.push((e.name, r));
        }
    }
    let mut out = format!("entry,{}\n", InequalityReport::csv_header());
    for (name, r) in &rows {
        out.push_str(&format!("{name},{}\n", r.csv_row()));
    }
    emit(ctx, &out)?;

    let mut problems = Vec::new();
    let mut names: Vec<&str> = rows.iter().map(|(n, _)| n.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let mut corpus_max = 0.0f64;
    for name in names {
        let ratios: Vec<f64> = rows.iter().filter(|(n, _)| n == name).map(|(_, r)| r.ratio).collect();
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            problems.push(format!("{name}: non-finite ratio {ratios:?}"));
        }
        corpus_max = corpus_max.max(*ratios.last().unwrap_or(&0.0));
        if matches!(check, Check::C1n | Check::Gradient | Check::Cone) {
            for w in ratios.windows(2) {
                let change = (w[1] / w[0] - 1.0).abs();
                if change > tol {
                    problems.push(format!("{name}: ratio moved {:.2}% between grids", 100.0 * change));
                }
            }
        }
    }
    for (name, r) in &rows {
        if r.pass == Some(false) {
            problems.push(format!("{name}: lhs {:e} vs rhs {:e} fails at grid {}", r.lhs, r.rhs, r.grid));
        }
    }
    eprintln!("corpus max ratio {corpus_max:e} over grids {grids:?}");
    gate(problems.is_empty(), problems.join("; "))
}

pub fn power(ctx: &Context, dim: usize, beta: f64, alpha: f64, levels: usize) -> Result<(), Failure> {
    if !(beta < 1.0 + alpha) {
        eprintln!("warning: β >= 1 + α, the gradient is C^α and no growth is expected");
    }
    let trend = power_trend(dim, beta, alpha, levels)?;
    let mass_change = last_change(&trend.mass);
    let mass_stable = mass_change <= 0.01;
    let grows = strictly_increasing(&trend.holder, 1e-9);
    let bundle = json!({
        "family": "power_radial",
        "trend": trend,
        "mass_last_change": mass_change,
        "mass_stable": mass_stable,
        "gradient_quotient_increasing": grows,
        "pass": mass_stable && grows,
    });
    emit(ctx, &(serde_json::to_string_pretty(&bundle).expect("bundle serializes") + "\n"))?;
    gate(mass_stable && grows, format!("mass stable: {mass_stable}, gradient quotient increasing: {grows}"))
}

pub fn section3(
    ctx: &Context,
    dim: usize,
    gamma: f64,
    lambda: f64,
    alphas: &[f64],
    levels: usize,
    samples: Option<usize>,
) -> Result<(), Failure> {
    let tol = ctx.tol.unwrap_or(1e-8);
    let (l1, l2) = lambda_roots(gamma)?;
    let slab = assemble_slab(dim, gamma, lambda)?;
    let checks = slab.verify(samples.unwrap_or(10_000), ctx.seed)?;
    let det_error = slab.power_region_det_error(1000, ctx.seed)?;
    let trend = slab_trend(&slab, alphas, levels, ctx.seed)?;
    let mut curves = Vec::new();
    for k in 1..200 {
        let x = slab.omega * k as f64 / 200.0;
        curves.push(json!({
            "x1": x,
            "zeta": slab.zeta.value(x)?,
            "eta": slab.eta.value(x)?,
            "profile": slab.profile(x)?,
            "g2": slab.g2(x)?,
        }));
    }
    let mass_change = last_change(&trend.mass);
    let mut gates = vec![
        ("convexity", checks.min_eigenvalue >= -1e-10 && checks.min_convexity_margin >= -1e-10),
        ("ode_residual", checks.max_ode_residual <= tol),
        ("det_closed_form", det_error <= 1e-9),
        ("mass_stable", mass_change <= 0.01),
    ];
    let growth: Vec<(String, bool)> = trend
        .holder
        .iter()
        .map(|h| (format!("holder_growth_{}", h.alpha), strictly_increasing(&h.rows, 1e-9)))
        .collect();
    let mut gate_map = serde_json::Map::new();
    for (k, v) in &gates {
        gate_map.insert(k.to_string(), json!(v));
    }
    for (k, v) in &growth {
        gate_map.insert(k.clone(), json!(v));
    }
    let pass = gates.iter().all(|g| g.1) && growth.iter().all(|g| g.1);
    let bundle = json!({
        "dim": dim,
        "gamma": gamma,
        "lambda": lambda,
        "lambda_roots": [l1, l2],
        "sigma0": slab.sigma0,
        "omega": slab.omega,
        "checks": checks,
        "det_max_relative_error": det_error,
        "mass": trend.mass,
        "holder": trend.holder,
        "curves": curves,
        "gates": gate_map,
        "pass": pass,
    });
    emit(ctx, &(serde_json::to_string_pretty(&bundle).expect("bundle serializes") + "\n"))?;
    gates.retain(|g| !g.1);
    let failed: Vec<String> =
        gates.iter().map(|g| g.0.to_string()).chain(growth.into_iter().filter(|g| !g.1).map(|g| g.0)).collect();
    gate(pass, format!("failed gates: {}", failed.join(", ")))
}

pub fn solve_alpha(ctx: &Context, kind: ProductKind, theta: f64, dim: usize) -> Result<(), Failure> {
    let tol = ctx.tol.unwrap_or(1e-10);
    let (variant, (alpha, trace)) = match kind {
        ProductKind::Halfspace => (ProductVariant::Halfspace, solve_alpha_halfspace(theta, dim)?),
        ProductKind::Full => (ProductVariant::Full, solve_alpha_full(theta, dim)?),
    };
    let back = theta_of_alpha(&alpha, dim, variant)?;
    let name = match kind {
        ProductKind::Halfspace => "halfspace",
        ProductKind::Full => "full",
    };
    let out = format!(
        "variant,N,theta,alpha,method,iterations,residual,theta_of_alpha\n{name},{dim},{theta},{},{:?},{},{:e},{back}\n",
        floats(&alpha),
        trace.method,
        trace.iterations,
        trace.residual
    );
    emit(ctx, &out)?;
    gate((back - theta).abs() <= tol, format!("θ round trip off by {:e}", (back - theta).abs()))
}

pub fn measure(
    ctx: &Context,
    what: Measure,
    sel: &FamilySel,
    x0: Option<Vec<f64>>,
    height: f64,
    sigmas: &[f64],
    z: Option<Vec<f64>>,
) -> Result<(), Failure> {
    let s = select(sel, false)?;
    let u = &s.family;
    let dim = u.dim();
    let x0 = x0.unwrap_or_else(|| vec![0.0; dim]);
    if x0.len() != dim {
        return Err(Failure::Usage(format!("--x0 needs {dim} coordinates, got {}", x0.len())));
    }
    let resolution = ctx.grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(64);
    let out = match what {
        Measure::Doubling => {
            let sec = sublevel(u, &x0, height)?;
            let mut out = String::from("sigma,ratio,sigma_pow_minus_n\n");
            for &sg in sigmas {
                let r = doubling_ratio(u, &sec, sg, resolution)?;
                out.push_str(&format!("{sg},{r:e},{:e}\n", sg.powi(-(dim as i32))));
            }
            out
        }
        Measure::Average => {
            let sec = sublevel(u, &x0, height)?;
            let d = average_density(u, &sec, resolution)?;
            format!("height,volume,diameter,density\n{height},{:e},{:e},{d:e}\n", sec.volume, sec.diameter)
        }
        Measure::Halving => {
            let z = z.unwrap_or_else(|| {
                let mut e = vec![0.0; dim];
                e[0] = 0.5;
                e
            });
            if z.len() != dim {
                return Err(Failure::Usage(format!("--z needs {dim} coordinates, got {}", z.len())));
            }
            let r = halving_ratio(u, &x0, &z)?;
            format!("z,ratio\n{},{r:e}\n", floats(&z))
        }
        Measure::John => {
            let sec = sublevel(u, &x0, height)?;
            let j = john_normalize(&sec)?;
            let rows: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|k| j.matrix[(i, k)]).collect()).collect();
            let bundle = json!({
                "family": s.label,
                "x0": x0,
                "height": height,
                "center": j.center,
                "matrix": rows,
                "scale": j.scale,
                "outer": j.outer,
                "inner": j.inner,
                "rho": j.rho,
                "iterations": j.iterations,
            });
            serde_json::to_string_pretty(&bundle).expect("bundle serializes") + "\n"
        }
    };
    emit(ctx, &out)
}
