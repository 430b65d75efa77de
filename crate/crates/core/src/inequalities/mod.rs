//! Checkers for the Hölder, gradient and cone inequalities of convex functions with
//! vanishing boundary values, the explicit-constant normalization lemmas, and the
//! sharpness counterexamples.

pub mod sharpness;
pub mod slab;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mameasure::{ma_mass, normal_image_area, PLConvex};
use crate::quad::{ball_volume, SphereRule};
use crate::surfaces::domain::{dist, norm};
use crate::surfaces::{ConvexFamily, Domain};

pub use slab::{assemble_slab, build_eta, build_zeta, lambda_roots, SlabCounterexample};

/// Outcome of one inequality check. `ratio = lhs / rhs` with the universal constant omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub check: String,
    pub family: String,
    pub grid: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub witness: Vec<f64>,
    /// Pass/fail for checks with explicit constants.
    pub pass: Option<bool>,
}

impl InequalityReport {
    pub fn csv_header() -> &'static str {
        "check,family,grid,lhs,rhs,ratio,pass,witness"
    }

    pub fn csv_row(&self) -> String {
        let w: Vec<String> = self.witness.iter().map(|v| format!("{v:e}")).collect();
        let pass = self.pass.map_or(String::new(), |p| p.to_string());
        format!(
            "{},{},{},{:e},{:e},{:e},{},{}",
            self.check,
            self.family,
            self.grid,
            self.lhs,
            self.rhs,
            self.ratio,
            pass,
            w.join(";")
        )
    }
}

/// Supremum of a sampled Hölder quotient together with the pair attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// `sup |f(x) − f(y)| / |x − y|^α` over all pairs of a point cloud (vector-valued `f`).
pub fn holder_seminorm<F>(f: &F, points: &[Vec<f64>], alpha: f64) -> Result<HolderEstimate>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if points.len() < 2 {
        return Err(Error::EmptySample(format!("{} point(s) give no pairs", points.len())));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("Hölder exponent must lie in (0,1], got {alpha}")));
    }
    let values: Vec<Vec<f64>> = points.par_iter().map(|p| f(p)).collect::<Result<_>>()?;
    let best: Vec<(f64, usize)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut b = (0.0, i);
            for j in i + 1..points.len() {
                let d = dist(&points[i], &points[j]);
                if d == 0.0 {
                    continue;
                }
                let q = dist(&values[i], &values[j]) / d.powf(alpha);
                if q > b.0 {
                    b = (q, j);
                }
            }
            b
        })
        .collect();
    let (mut value, mut pair) = (0.0, (0, 0));
    for (i, &(q, j)) in best.iter().enumerate() {
        if q > value {
            value = q;
            pair = (i, j);
        }
    }
    Ok(HolderEstimate { value, x: points[pair.0].clone(), y: points[pair.1].clone() })
}

/// Point cloud for seminorm estimates: a ray lattice from the domain's reference point
/// (`rays` boundary directions × `radii` fractions, boundary included), plus `levels`
/// copies contracted toward `focus` by factors `4^{-1}, …, 4^{-levels}`.
///
/// Contraction keeps points inside convex domains whenever `focus` lies in the closure.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    pub rays: usize,
    pub radii: usize,
    pub focus: Option<Vec<f64>>,
    pub levels: usize,
    pub ratio: f64,
}

impl Sampler {
    pub fn uniform(rays: usize, radii: usize) -> Sampler {
        Sampler { rays, radii, focus: None, levels: 0, ratio: 0.25 }
    }

    pub fn focused(rays: usize, radii: usize, focus: Vec<f64>, levels: usize) -> Sampler {
        Sampler { rays, radii, focus: Some(focus), levels, ratio: 0.25 }
    }

    pub fn sample(&self, omega: &Domain) -> Result<Vec<Vec<f64>>> {
        let c = omega.center();
        let boundary = omega.boundary_points(self.rays)?;
        // a hair inside so evaluations never sit exactly on the boundary of a family domain
        let shrink = 1.0 - 1e-12;
        let mut pts = vec![c.clone()];
        for b in &boundary {
            for k in 1..=self.radii {
                let s = shrink * k as f64 / self.radii as f64;
                pts.push(c.iter().zip(b).map(|(ci, bi)| ci + s * (bi - ci)).collect());
            }
        }
        if let Some(f) = &self.focus {
            let base = pts.clone();
            let mut scale = 1.0;
            for _ in 0..self.levels {
                scale *= self.ratio;
                pts.extend(base.iter().map(|p| f.iter().zip(p).map(|(fi, pi)| fi + scale * (pi - fi)).collect()));
            }
        }
        Ok(pts)
    }
}

/// Where the Monge–Ampère mass comes from: quadrature of `det D²u`, or the discrete
/// normal image of the PL interpolant (needed for non-smooth functions such as cones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassMethod {
    Quadrature { resolution: usize },
    NormalImage { nodes: usize },
}

pub fn mass_of(u: &ConvexFamily, omega: &Domain, method: MassMethod) -> Result<f64> {
    match method {
        MassMethod::Quadrature { resolution } => Ok(ma_mass(u, omega, resolution)?.value),
        MassMethod::NormalImage { nodes } => normal_image_area(&PLConvex::from_family(u, omega, nodes)?, None),
    }
}

fn grid_of(method: MassMethod) -> usize {
    match method {
        MassMethod::Quadrature { resolution } => resolution,
        MassMethod::NormalImage { nodes } => nodes,
    }
}

/// Largest distance from the domain's reference point to its boundary sample.
pub fn circumradius(omega: &Domain) -> Result<f64> {
    if let Domain::Ball { radius, .. } = omega {
        return Ok(*radius);
    }
    let c = omega.center();
    Ok(omega.boundary_points(4096)?.iter().map(|p| dist(p, &c)).fold(0.0, f64::max))
}

/// Checks `|u| <= tol` on a boundary sample.
pub fn check_boundary_zero(u: &ConvexFamily, omega: &Domain, tol: f64) -> Result<()> {
    let pts = omega.boundary_points(256)?;
    let vals: Vec<f64> = pts.iter().map(|p| u.value(p)).collect::<Result<_>>()?;
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (p, v) in pts.iter().zip(&vals) {
        if v.abs() > tol * scale {
            return Err(Error::BoundaryCondition(format!("u = {v:e} at boundary point {p:?}")));
        }
    }
    Ok(())
}

/// `lhs = [u]_{C^{1/N}}^N`, `rhs = R^{N−1} ∫_Ω det D²u`.
pub fn check_c1n(u: &ConvexFamily, omega: &Domain, sampler: &Sampler, mass: MassMethod) -> Result<InequalityReport> {
    check_boundary_zero(u, omega, 1e-8)?;
    let n = u.dim();
    let pts = sampler.sample(omega)?;
    let h = holder_seminorm(&|x: &[f64]| Ok(vec![u.value(x)?]), &pts, 1.0 / n as f64)?;
    let lhs = h.value.powi(n as i32);
    let r = circumradius(omega)?;
    let rhs = r.powi(n as i32 - 1) * mass_of(u, omega, mass)?;
    let mut witness = h.x;
    witness.extend(h.y);
    Ok(InequalityReport {
        check: "c1n".into(),
        family: u.tag().into(),
        grid: pts.len(),
        lhs,
        rhs,
        ratio: lhs / rhs,
        witness,
        pass: None,
    })
}

/// `{u < t}` as a star domain about `center` (which must satisfy `u(center) < t`).
pub fn level_domain(u: &ConvexFamily, omega: &Domain, center: &[f64], t: f64, rays: usize) -> Result<Domain> {
    let dim = u.dim();
    if !(u.value(center)? < t) {
        return Err(Error::EmptySample(format!("u(center) >= {t}: the level set misses its reference point")));
    }
    let rule = SphereRule::new(dim, rays, 11);
    let radii: Vec<f64> = rule
        .directions
        .par_iter()
        .map(|d| {
            let at = |r: f64| -> Vec<f64> { center.iter().zip(d).map(|(c, v)| c + r * v).collect() };
            let below = |r: f64| -> Result<bool> {
                let x = at(r);
                Ok(omega.contains(&x) && u.contains(&x) && u.value(&x)? < t)
            };
            let mut hi = 1e-3;
            let mut lo = 0.0;
            let mut k = 0;
            while below(hi)? {
                lo = hi;
                hi *= 2.0;
                k += 1;
                if k > 80 {
                    return Err(Error::Unbounded(format!("level set {{u < {t}}} is unbounded along {d:?}")));
                }
            }
            while hi - lo > 1e-12 * hi {
                let mid = 0.5 * (lo + hi);
                if below(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(lo)
        })
        .collect::<Result<_>>()?;
    Ok(Domain::Star { center: center.to_vec(), directions: rule.directions, radii, weights: rule.weights })
}

/// Level domain `Ω_t`, exact for the canonical paraboloid-type ball cases.
fn level_set(u: &ConvexFamily, omega: &Domain, t: f64, rays: usize) -> Result<Domain> {
    if t >= 0.0 {
        return Ok(omega.clone());
    }
    level_domain(u, omega, &omega.center(), t, rays)
}

/// Mode of the gradient inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum GradientMode {
    /// `sup_{Ω_s} |Du| ≤ C (diam Ω_t / (t − s))^{N−1} ∫_{Ω_t} det D²u`.
    Sublevel { s: f64, t: f64 },
    /// `|Du(x)|^N ≤ C (R / dist(x, ∂Ω))^{N−1} ∫_Ω det D²u`.
    Interior { x: Vec<f64> },
}

pub fn check_gradient(
    u: &ConvexFamily,
    omega: &Domain,
    mode: &GradientMode,
    sampler: &Sampler,
    mass: MassMethod,
) -> Result<InequalityReport> {
    check_boundary_zero(u, omega, 1e-8)?;
    let n = u.dim() as i32;
    match mode {
        GradientMode::Sublevel { s, t } => {
            if !(s < t && *t <= 0.0) {
                return Err(Error::InvalidParameter(format!("need s < t <= 0, got s = {s}, t = {t}")));
            }
            let rays = sampler.rays.max(64);
            let omega_t = level_set(u, omega, *t, rays)?;
            let omega_s = level_set(u, omega, *s, rays)?;
            let pts = sampler.sample(&omega_s)?;
            if pts.is_empty() {
                return Err(Error::EmptySample("Ω_s has no sample points".into()));
            }
            // kinks (a cone vertex) carry no gradient and are skipped
            let grads: Vec<(f64, usize)> = pts
                .par_iter()
                .enumerate()
                .map(|(k, p)| match u.gradient(p) {
                    Ok(g) => Ok((norm(&g), k)),
                    Err(Error::OutsideDomain { .. }) => Ok((0.0, k)),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            let (lhs, k) = grads.iter().fold((0.0, 0), |a, &b| if b.0 > a.0 { b } else { a });
            let g = omega_t.geometry()?;
            let rhs = (g.diameter / (t - s)).powi(n - 1) * mass_of(u, &omega_t, mass)?;
            Ok(InequalityReport {
                check: "gradient-sublevel".into(),
                family: u.tag().into(),
                grid: pts.len(),
                lhs,
                rhs,
                ratio: lhs / rhs,
                witness: pts[k].clone(),
                pass: None,
            })
        }
        GradientMode::Interior { x } => {
            if !omega.contains(x) {
                return Err(Error::OutsideDomain { point: x.clone(), reason: "interior mode needs x ∈ Ω".into() });
            }
            let lhs = norm(&u.gradient(x)?).powi(n);
            let d = omega.distance_to_boundary(x)?;
            let rhs = (circumradius(omega)? / d).powi(n - 1) * mass_of(u, omega, mass)?;
            Ok(InequalityReport {
                check: "gradient-interior".into(),
                family: u.tag().into(),
                grid: grid_of(mass),
                lhs,
                rhs,
                ratio: lhs / rhs,
                witness: x.clone(),
                pass: None,
            })
        }
    }
}

/// `(h/d)(h/D)^{N−1}` at a single point of `Ω_s`, with `h = t − u(x)`, `d = dist(x, ∂Ω_t)`,
/// `D = diam Ω_t`.
pub fn cone_lemma_lhs(u: &ConvexFamily, omega_t: &Domain, t: f64, x: &[f64]) -> Result<f64> {
    let n = u.dim() as i32;
    let h = t - u.value(x)?;
    let d = omega_t.distance_to_boundary(x)?;
    let big_d = omega_t.geometry()?.diameter;
    Ok((h / d) * (h / big_d).powi(n - 1))
}

/// Maximum of the cone-lemma quotient over `Ω_s` samples against `∫_{Ω_t} det D²u`.
pub fn check_cone_lemma(
    u: &ConvexFamily,
    omega: &Domain,
    t: f64,
    s: f64,
    sampler: &Sampler,
    mass: MassMethod,
) -> Result<InequalityReport> {
    check_boundary_zero(u, omega, 1e-8)?;
    if !(s < t && t <= 0.0) {
        return Err(Error::InvalidParameter(format!("need s < t <= 0, got s = {s}, t = {t}")));
    }
    let n = u.dim() as i32;
    let rays = sampler.rays.max(64);
    let omega_t = level_set(u, omega, t, rays)?;
    let omega_s = level_set(u, omega, s, rays)?;
    let pts = sampler.sample(&omega_s)?;
    let big_d = omega_t.geometry()?.diameter;
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|x| {
            let h = t - u.value(x)?;
            let d = omega_t.distance_to_boundary(x)?;
            Ok((h / d) * (h / big_d).powi(n - 1))
        })
        .collect::<Result<_>>()?;
    let (k, lhs) = vals.iter().copied().enumerate().fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let rhs = mass_of(u, &omega_t, mass)?;
    Ok(InequalityReport {
        check: "cone".into(),
        family: u.tag().into(),
        grid: pts.len(),
        lhs,
        rhs,
        ratio: lhs / rhs,
        witness: pts[k].clone(),
        pass: None,
    })
}

/// Checks `u = 1` on ∂Ω, `u(0) = 0`, `Du(0) = 0`.
pub fn check_normalization(u: &ConvexFamily, omega: &Domain, tol: f64) -> Result<()> {
    let n = u.dim();
    let origin = vec![0.0; n];
    if !omega.contains(&origin) {
        return Err(Error::BoundaryCondition("normalized domain must contain the origin".into()));
    }
    let j = u.eval_jet_order(&origin, 1)?;
    if j.value().abs() > tol || norm(&j.gradient()) > tol {
        return Err(Error::BoundaryCondition(format!(
            "need u(0) = 0 and Du(0) = 0, got u(0) = {:e}, |Du(0)| = {:e}",
            j.value(),
            norm(&j.gradient())
        )));
    }
    for p in omega.boundary_points(256)? {
        let v = u.value(&p)?;
        if (v - 1.0).abs() > tol {
            return Err(Error::BoundaryCondition(format!("need u = 1 on ∂Ω, got {v} at {p:?}")));
        }
    }
    Ok(())
}

/// `R₂^{−N} ≤ ω_N^{−1} ∫_Ω det D²u` for `Ω ⊂ B_{R₂}`.
pub fn check_lemma42(u: &ConvexFamily, omega: &Domain, mass: MassMethod) -> Result<InequalityReport> {
    check_normalization(u, omega, 1e-8)?;
    let n = u.dim();
    let origin = vec![0.0; n];
    let r2 = omega.boundary_points(4096)?.iter().map(|p| dist(p, &origin)).fold(0.0, f64::max);
    let lhs = r2.powi(-(n as i32));
    let rhs = mass_of(u, omega, mass)? / ball_volume(n);
    Ok(InequalityReport {
        check: "lemma42".into(),
        family: u.tag().into(),
        grid: grid_of(mass),
        lhs,
        rhs,
        ratio: lhs / rhs,
        witness: vec![r2],
        pass: Some(lhs <= rhs),
    })
}

/// `R₁^{−N} ≥ (2^N ω_N)^{−1} (1−σ)^N ∫_{σΩ} det D²u` for `B_{R₁} ⊂ Ω`.
pub fn check_lemma43(u: &ConvexFamily, omega: &Domain, sigma: f64, mass: MassMethod) -> Result<InequalityReport> {
    check_normalization(u, omega, 1e-8)?;
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidParameter(format!("σ must lie in (0,1), got {sigma}")));
    }
    let n = u.dim();
    let origin = vec![0.0; n];
    let r1 = omega.distance_to_boundary(&origin)?;
    let lhs = r1.powi(-(n as i32));
    let inner = omega.dilate(&origin, sigma)?;
    let rhs = (1.0 - sigma).powi(n as i32) * mass_of(u, &inner, mass)? / (2f64.powi(n as i32) * ball_volume(n));
    Ok(InequalityReport {
        check: "lemma43".into(),
        family: u.tag().into(),
        grid: grid_of(mass),
        lhs,
        rhs,
        ratio: rhs / lhs,
        witness: vec![r1],
        pass: Some(lhs >= rhs),
    })
}

/// A corpus entry: a convex function together with the domain it is checked on.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub u: ConvexFamily,
    pub omega: Domain,
    pub mass: MassMethod,
}

/// Planar catalogue of convex functions vanishing on the boundary.
pub fn standard_corpus(resolution: usize) -> Result<Vec<CorpusEntry>> {
    let ball = Domain::unit_ball(2);
    let q = MassMethod::Quadrature { resolution };
    let mut out = vec![
        CorpusEntry { name: "paraboloid".into(), u: ConvexFamily::paraboloid(2, -1.0), omega: ball.clone(), mass: q },
        CorpusEntry {
            name: "scaled-paraboloid".into(),
            u: ConvexFamily::quadratic(nalgebra::DMatrix::identity(2, 2) * 6.0, vec![0.0; 2], -3.0)?,
            omega: ball.clone(),
            mass: q,
        },
        CorpusEntry { name: "power-1.5".into(), u: ConvexFamily::power_radial(2, 1.5)?, omega: ball.clone(), mass: q },
        CorpusEntry { name: "power-3".into(), u: ConvexFamily::power_radial(2, 3.0)?, omega: ball.clone(), mass: q },
        CorpusEntry {
            name: "cone".into(),
            u: ConvexFamily::Cone { dim: 2 },
            omega: ball.clone(),
            mass: MassMethod::NormalImage { nodes: resolution + 1 },
        },
    ];
    // |Ax|² − 1 on the ellipse A⁻¹B₁, for a unimodular A
    let a = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 0.5]);
    let u = ConvexFamily::affine_image(ConvexFamily::paraboloid(2, -1.0), a, vec![0.0; 2], vec![0.0; 2], 0.0)?;
    let omega = level_domain(&u, &Domain::boxed(vec![-10.0; 2], vec![10.0; 2])?, &[0.0, 0.0], 0.0, 512)?;
    out.push(CorpusEntry { name: "affine-paraboloid".into(), u, omega, mass: q });
    Ok(out)
}

/// Planar catalogue normalized to `u = 1` on ∂Ω, `u(0) = Du(0) = 0`.
pub fn normalized_corpus(resolution: usize) -> Result<Vec<CorpusEntry>> {
    let ball = Domain::unit_ball(2);
    let q = MassMethod::Quadrature { resolution };
    let quartic = ConvexFamily::affine_image(
        ConvexFamily::power_radial(2, 4.0)?,
        nalgebra::DMatrix::identity(2, 2),
        vec![0.0; 2],
        vec![0.0; 2],
        1.0,
    )?;
    let a = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 0.5]);
    let ell = ConvexFamily::affine_image(ConvexFamily::paraboloid(2, 0.0), a, vec![0.0; 2], vec![0.0; 2], 0.0)?;
    let omega = level_domain(&ell, &Domain::boxed(vec![-10.0; 2], vec![10.0; 2])?, &[0.0, 0.0], 1.0, 512)?;
    // |x|² + x₁⁴ on its unit sub-level set
    let bump = ConvexFamily::Sum {
        parts: vec![
            ConvexFamily::paraboloid(2, 0.0),
            ConvexFamily::AxisPower { dim: 2, axis: 0, coef: 1.0, power: 4.0 },
        ],
    };
    let bump_omega = level_domain(&bump, &Domain::boxed(vec![-10.0; 2], vec![10.0; 2])?, &[0.0, 0.0], 1.0, 512)?;
    Ok(vec![
        CorpusEntry { name: "paraboloid".into(), u: ConvexFamily::paraboloid(2, 0.0), omega: ball.clone(), mass: q },
        CorpusEntry { name: "quartic".into(), u: quartic, omega: ball, mass: q },
        CorpusEntry { name: "quartic-perturbed".into(), u: bump, omega: bump_omega, mass: q },
        CorpusEntry { name: "affine-paraboloid".into(), u: ell, omega, mass: q },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn holder_of_paraboloid() {
        let u = ConvexFamily::paraboloid(2, -1.0);
        let pts = Sampler::uniform(64, 48).sample(&Domain::unit_ball(2)).unwrap();
        let h = holder_seminorm(&|x: &[f64]| Ok(vec![u.value(x)?]), &pts, 0.5).unwrap();
        assert_relative_eq!(h.value, 4.0 * 6f64.sqrt() / 9.0, max_relative = 1e-2);
    }

    #[test]
    fn cone_lemma_point() {
        let u = ConvexFamily::paraboloid(2, -1.0);
        let v = cone_lemma_lhs(&u, &Domain::unit_ball(2), 0.0, &[0.5, 0.0]).unwrap();
        assert_relative_eq!(v, 9.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn lemma42_paraboloid() {
        let u = ConvexFamily::paraboloid(2, 0.0);
        let r = check_lemma42(&u, &Domain::unit_ball(2), MassMethod::Quadrature { resolution: 64 }).unwrap();
        assert_eq!(r.pass, Some(true));
        assert_relative_eq!(r.rhs / r.lhs, 4.0, max_relative = 1e-9);
        let r = check_lemma43(&u, &Domain::unit_ball(2), 0.5, MassMethod::Quadrature { resolution: 64 }).unwrap();
        assert_eq!(r.pass, Some(true));
        assert_relative_eq!(r.rhs, 1.0 / 16.0, max_relative = 1e-9);
    }
}
