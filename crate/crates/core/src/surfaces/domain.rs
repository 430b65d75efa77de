//! Bounded convex integration domains.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{ball_volume, gauss_legendre, integrate, sphere_area, SphereRule};

/// Radius of the rotationally symmetric cross-section of a solid of revolution.
pub type Profile = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Domain {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Star-shaped region about `center` given by boundary radii along unit directions.
    Star {
        center: Vec<f64>,
        directions: Vec<Vec<f64>>,
        radii: Vec<f64>,
        weights: Vec<f64>,
    },
    /// `{0 < x₁ < length, |x'| < profile(x₁)}` in `R^dim`.
    Revolution {
        dim: usize,
        length: f64,
        profile: Profile,
    },
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Ball { center, radius } => write!(f, "Ball(center={center:?}, radius={radius})"),
            Domain::Box { lo, hi } => write!(f, "Box(lo={lo:?}, hi={hi:?})"),
            Domain::Star { center, radii, .. } => write!(f, "Star(center={center:?}, rays={})", radii.len()),
            Domain::Revolution { dim, length, .. } => write!(f, "Revolution(dim={dim}, length={length})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub diameter: f64,
    pub inradius: f64,
    pub volume: f64,
}

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const RADIAL_REL_TOL: f64 = 1e-11;
const RADIAL_MAX_INTERVALS: usize = 400;

/// `∫_0^R g(r) dr` after the substitution `r = R·exp(−s/(1−s))`, which spreads
/// integrable power singularities at `r = 0` over an unbounded, smoothly decaying tail.
pub fn radial_integral<G>(g: G, radius: f64) -> Result<Integral>
where
    G: Fn(f64) -> Result<f64>,
{
    let q = integrate(
        |s: f64| {
            let v = s / (1.0 - s);
            let r = radius * (-v).exp();
            if r == 0.0 || !v.is_finite() {
                return Ok(0.0);
            }
            let jac = r / ((1.0 - s) * (1.0 - s));
            // an isolated singular center carries no mass for an integrable density
            let val = match g(r) {
                Ok(v) => v * jac,
                Err(Error::OutsideDomain { .. }) if r < 1e-100 * radius => return Ok(0.0),
                Err(e) => return Err(e),
            };
            if !val.is_finite() && r < 1e-100 * radius {
                return Ok(0.0);
            }
            Ok(val)
        },
        0.0,
        1.0,
        RADIAL_REL_TOL,
        1e-300,
        RADIAL_MAX_INTERVALS,
    )?;
    Ok(Integral { value: q.value, error: q.error })
}

impl Domain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Domain> {
        if !(radius > 0.0) || !radius.is_finite() || center.is_empty() {
            return Err(Error::InvalidParameter(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Domain {
        Domain::Ball { center: vec![0.0; dim], radius: 1.0 }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Domain> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Unbounded("box bounds must be finite with lo < hi".into()));
        }
        Ok(Domain::Box { lo, hi })
    }

    /// A box inside the open positive orthant.
    pub fn orthant_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Domain> {
        if lo.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidParameter("orthant box needs strictly positive lower corner".into()));
        }
        Domain::boxed(lo, hi)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } | Domain::Star { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
            Domain::Revolution { dim, .. } => *dim,
        }
    }

    /// Reference point: ball/star center, box midpoint, axis midpoint of a solid of revolution.
    pub fn center(&self) -> Vec<f64> {
        match self {
            Domain::Ball { center, .. } | Domain::Star { center, .. } => center.clone(),
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            Domain::Revolution { dim, length, .. } => {
                let mut c = vec![0.0; *dim];
                c[0] = length / 2.0;
                c
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Ball { center, radius } => dist(x, center) < *radius,
            Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v > a && v < b),
            Domain::Star { center, .. } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let r = norm(&d);
                r == 0.0 || r < self.star_radius(&d.iter().map(|v| v / r).collect::<Vec<_>>())
            }
            Domain::Revolution { length, profile, .. } => {
                if !(x[0] > 0.0 && x[0] < *length) {
                    return false;
                }
                profile(x[0]).is_ok_and(|rho| norm(&x[1..]) < rho)
            }
        }
    }

    /// Boundary radius along a unit direction, interpolated between sampled rays (N = 2)
    /// or taken from the nearest sampled ray otherwise.
    fn star_radius(&self, dir: &[f64]) -> f64 {
        let Domain::Star { directions, radii, .. } = self else { unreachable!() };
        if dir.len() == 2 {
            let m = directions.len();
            let a = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
            let a0 = directions[0][1].atan2(directions[0][0]);
            let pos = ((a - a0).rem_euclid(2.0 * PI)) / (2.0 * PI) * m as f64;
            let k = pos.floor() as usize % m;
            let frac = pos - pos.floor();
            return radii[k] * (1.0 - frac) + radii[(k + 1) % m] * frac;
        }
        let best = directions
            .iter()
            .enumerate()
            .map(|(k, d)| (k, d.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>()))
            .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        radii[best.0]
    }

    /// Sampled boundary points (exact for balls and boxes).
    pub fn boundary_points(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        Ok(match self {
            Domain::Ball { center, radius } => SphereRule::new(center.len(), count, 0)
                .directions
                .into_iter()
                .map(|d| center.iter().zip(&d).map(|(c, v)| c + radius * v).collect())
                .collect(),
            Domain::Star { center, directions, radii, .. } => directions
                .iter()
                .zip(radii)
                .map(|(d, r)| center.iter().zip(d).map(|(c, v)| c + r * v).collect())
                .collect(),
            Domain::Box { lo, hi } => {
                let dim = lo.len();
                let per_face = (count / (2 * dim)).max(1);
                let side = (per_face as f64).powf(1.0 / (dim.max(2) - 1) as f64).ceil().max(1.0) as usize;
                let mut pts = Vec::new();
                for axis in 0..dim {
                    for &end in &[lo[axis], hi[axis]] {
                        let others: Vec<usize> = (0..dim).filter(|&i| i != axis).collect();
                        let total = side.pow(others.len() as u32);
                        for idx in 0..total {
                            let mut p = vec![0.0; dim];
                            p[axis] = end;
                            let mut rem = idx;
                            for &o in &others {
                                let k = rem % side;
                                rem /= side;
                                p[o] = lo[o] + (hi[o] - lo[o]) * (k as f64 + 0.5) / side as f64;
                            }
                            pts.push(p);
                        }
                    }
                }
                pts
            }
            Domain::Revolution { dim, length, profile } => {
                let rule = SphereRule::new(dim - 1, 16, 0);
                let mut pts = Vec::new();
                let m = (count / rule.directions.len()).max(2);
                for k in 0..m {
                    let x1 = length * (k as f64 + 0.5) / m as f64;
                    let rho = profile(x1)?;
                    for d in &rule.directions {
                        let mut p = vec![x1];
                        p.extend(d.iter().map(|v| rho * v));
                        pts.push(p);
                    }
                }
                pts
            }
        })
    }

    /// Distance from `x` to the boundary (exact for balls and boxes, sampled otherwise).
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Domain::Ball { center, radius } => (radius - dist(x, center)).max(0.0),
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (a, b))| (v - a).min(b - v))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            _ => {
                let pts = self.boundary_points(4096)?;
                pts.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min)
            }
        })
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let dim = self.dim();
        Ok(match self {
            Domain::Ball { radius, .. } => Geometry {
                diameter: 2.0 * radius,
                inradius: *radius,
                volume: ball_volume(dim) * radius.powi(dim as i32),
            },
            Domain::Box { lo, hi } => {
                let widths: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                Geometry {
                    diameter: norm(&widths),
                    inradius: widths.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0,
                    volume: widths.iter().product(),
                }
            }
            Domain::Star { center, directions, radii, weights } => {
                let pts: Vec<Vec<f64>> = directions
                    .iter()
                    .zip(radii)
                    .map(|(d, r)| center.iter().zip(d).map(|(c, v)| c + r * v).collect())
                    .collect();
                let diameter = pts
                    .par_iter()
                    .enumerate()
                    .map(|(i, p)| pts[i + 1..].iter().map(|q| dist(p, q)).fold(0.0, f64::max))
                    .collect::<Vec<f64>>()
                    .into_iter()
                    .fold(0.0, f64::max);
                let volume = weights.iter().zip(radii).map(|(w, r)| w * r.powi(dim as i32)).sum::<f64>() / dim as f64;
                let inradius = radii.iter().cloned().fold(f64::INFINITY, f64::min);
                Geometry { diameter, inradius, volume }
            }
            Domain::Revolution { dim, length, profile } => {
                let m = 2000;
                let xs: Vec<f64> = (0..=m).map(|k| length * k as f64 / m as f64).collect();
                let rhos: Vec<f64> = xs
                    .iter()
                    .map(|&x| if x <= 0.0 || x >= *length { Ok(0.0) } else { profile(x) })
                    .collect::<Result<_>>()?;
                let mut diameter = *length;
                for i in 0..=m {
                    for j in i..=m {
                        let d = ((xs[i] - xs[j]).powi(2) + (rhos[i] + rhos[j]).powi(2)).sqrt();
                        diameter = diameter.max(d);
                    }
                }
                let n = dim - 1;
                let vol =
                    integrate(|x| Ok(ball_volume(n) * profile(x)?.powi(n as i32)), 0.0, *length, 1e-10, 1e-300, 2000)?;
                let inradius = rhos.iter().cloned().fold(0.0, f64::max).min(length / 2.0);
                Geometry { diameter, inradius, volume: vol.value }
            }
        })
    }

    /// Integrates `f` over the domain. `resolution` sets the angular/tensor grid size;
    /// radial (and axial) integrals are adaptive.
    ///
    /// For `Revolution` domains `f` must depend on `x'` only through `|x'|`.
    pub fn integrate<F>(&self, f: &F, resolution: usize) -> Result<Integral>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let resolution = resolution.max(4);
        match self {
            Domain::Ball { center, radius } => {
                let (dirs, weights, coarse) = ball_directions(center.len(), resolution);
                star_integral(f, center, &dirs, &vec![*radius; dirs.len()], &weights, coarse.as_deref())
            }
            Domain::Star { center, directions, radii, weights } => {
                let coarse = if center.len() == 2 && directions.len() % 2 == 0 {
                    Some(
                        weights
                            .iter()
                            .enumerate()
                            .map(|(k, w)| if k % 2 == 0 { 2.0 * w } else { 0.0 })
                            .collect::<Vec<f64>>(),
                    )
                } else {
                    None
                };
                star_integral(f, center, directions, radii, weights, coarse.as_deref())
            }
            Domain::Box { lo, hi } => {
                let fine = box_integral(f, lo, hi, resolution)?;
                let coarse = box_integral(f, lo, hi, resolution / 2)?;
                Ok(Integral { value: fine, error: (fine - coarse).abs() })
            }
            Domain::Revolution { dim, length, profile } => {
                revolution_integral(f, *dim, 0.0, *length, profile, resolution)
            }
        }
    }

    /// Integral over `{x₁ > cutoff}` of a revolution domain (used to probe convergence at `x₁ → 0`).
    pub fn integrate_from<F>(&self, f: &F, cutoff: f64, resolution: usize) -> Result<Integral>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        match self {
            Domain::Revolution { dim, length, profile } => {
                revolution_integral(f, *dim, cutoff, *length, profile, resolution)
            }
            _ => self.integrate(f, resolution),
        }
    }

    /// `σΩ` dilated about `base`.
    pub fn dilate(&self, base: &[f64], sigma: f64) -> Result<Domain> {
        let map = |p: &[f64]| -> Vec<f64> { p.iter().zip(base).map(|(v, b)| b + sigma * (v - b)).collect() };
        Ok(match self {
            Domain::Ball { center, radius } => Domain::Ball { center: map(center), radius: sigma * radius },
            Domain::Box { lo, hi } => Domain::Box { lo: map(lo), hi: map(hi) },
            Domain::Star { center, directions, radii, weights } => {
                if dist(center, base) > 1e-14 * (1.0 + norm(base)) {
                    return Err(Error::InvalidParameter("star domains dilate about their own center".into()));
                }
                Domain::Star {
                    center: center.clone(),
                    directions: directions.clone(),
                    radii: radii.iter().map(|r| sigma * r).collect(),
                    weights: weights.clone(),
                }
            }
            Domain::Revolution { .. } => {
                return Err(Error::InvalidParameter("dilation of revolution domains is not supported".into()))
            }
        })
    }
}

/// Directions and weights for a ball; the optional second weight vector is a
/// coarser rule on the same directions used for the error estimate.
fn ball_directions(dim: usize, resolution: usize) -> (Vec<Vec<f64>>, Vec<f64>, Option<Vec<f64>>) {
    match dim {
        1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0], None),
        2 => {
            let m = resolution + resolution % 2;
            let rule = SphereRule::new(2, m, 0);
            let coarse = rule.weights.iter().enumerate().map(|(k, w)| if k % 2 == 0 { 2.0 * w } else { 0.0 }).collect();
            (rule.directions, rule.weights, Some(coarse))
        }
        3 => {
            let nz = (resolution / 2).max(4);
            let na = resolution.max(8);
            let (zs, wz) = gauss_legendre(nz);
            let mut dirs = Vec::with_capacity(nz * na);
            let mut weights = Vec::with_capacity(nz * na);
            for (z, w) in zs.iter().zip(&wz) {
                let s = (1.0 - z * z).sqrt();
                for k in 0..na {
                    let a = 2.0 * PI * (k as f64 + 0.5) / na as f64;
                    dirs.push(vec![s * a.cos(), s * a.sin(), *z]);
                    weights.push(w * 2.0 * PI / na as f64);
                }
            }
            (dirs, weights, None)
        }
        _ => {
            let rule = SphereRule::new(dim, resolution * resolution, 0);
            (rule.directions, rule.weights, None)
        }
    }
}

fn star_integral<F>(
    f: &F,
    center: &[f64],
    dirs: &[Vec<f64>],
    radii: &[f64],
    weights: &[f64],
    coarse: Option<&[f64]>,
) -> Result<Integral>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let dim = center.len();
    let rays: Vec<Integral> = dirs
        .par_iter()
        .zip(radii.par_iter())
        .map(|(d, &radius)| {
            radial_integral(
                |r| {
                    let x: Vec<f64> = (0..dim).map(|i| center[i] + r * d[i]).collect();
                    Ok(f(&x)? * r.powi(dim as i32 - 1))
                },
                radius,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let value: f64 = rays.iter().zip(weights).map(|(i, w)| w * i.value).sum();
    let mut error: f64 = rays.iter().zip(weights).map(|(i, w)| w * i.error).sum();
    if let Some(c) = coarse {
        let coarse_value: f64 = rays.iter().zip(c).map(|(i, w)| w * i.value).sum();
        error += (value - coarse_value).abs();
    }
    Ok(Integral { value, error })
}

fn box_integral<F>(f: &F, lo: &[f64], hi: &[f64], n: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = n.max(2);
    let dim = lo.len();
    let (xs, ws) = gauss_legendre(n);
    let total = n.pow(dim as u32);
    let vals: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let mut x = vec![0.0; dim];
            let mut w = 1.0;
            for i in 0..dim {
                let k = rem % n;
                rem /= n;
                let h = 0.5 * (hi[i] - lo[i]);
                x[i] = lo[i] + h * (xs[k] + 1.0);
                w *= ws[k] * h;
            }
            Ok(w * f(&x)?)
        })
        .collect::<Result<_>>()?;
    Ok(vals.iter().sum())
}

fn revolution_integral<F>(
    f: &F,
    dim: usize,
    from: f64,
    length: f64,
    profile: &Profile,
    resolution: usize,
) -> Result<Integral>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = dim - 1;
    let area = sphere_area(n);
    let (rs, ws) = gauss_legendre(resolution.clamp(4, 64));
    let slice = |x1: f64| -> Result<f64> {
        let rho = profile(x1)?;
        let mut acc = 0.0;
        let mut x = vec![0.0; dim];
        x[0] = x1;
        for (s, w) in rs.iter().zip(&ws) {
            let r = 0.5 * rho * (s + 1.0);
            x[1] = r;
            acc += w * 0.5 * rho * f(&x)? * r.powi(n as i32 - 1);
        }
        Ok(area * acc)
    };
    // the log-type substitution near x₁ = 0 absorbs power singularities of the density
    let q = if from <= 0.0 {
        let split = 0.5 * length;
        let near = radial_integral(slice, split)?;
        let far = integrate(slice, split, length, 1e-10, 1e-300, 4000)?;
        Integral { value: near.value + far.value, error: near.error + far.error }
    } else {
        let q = integrate(slice, from, length, 1e-10, 1e-300, 4000)?;
        Integral { value: q.value, error: q.error }
    };
    Ok(q)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
