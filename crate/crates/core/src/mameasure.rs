//! Monge–Ampère measure: mass quadrature, the discrete normal-image oracle,
//! sub-level sections and the doubling / density / halving probes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::SphereRule;
use crate::surfaces::domain::{dist, norm};
use crate::surfaces::{ConvexFamily, Domain, Integral};

/// Default angular / tensor resolution for mass quadrature.
pub const MASS_RESOLUTION: usize = 128;

/// One row of a mass report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub family: String,
    pub domain: String,
    pub grid: usize,
    pub value: f64,
    pub error_estimate: f64,
}

impl MassReport {
    pub fn csv_header() -> &'static str {
        "family,domain,grid,value,error_estimate"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{:e},{:e}", self.family, self.domain, self.grid, self.value, self.error_estimate)
    }
}

fn det_integrand(u: &ConvexFamily) -> impl Fn(&[f64]) -> Result<f64> + Sync + '_ {
    move |x: &[f64]| u.hessian_det(x)
}

fn as_mass_error(e: Error) -> Error {
    match e {
        Error::Quadrature(msg) => Error::NonIntegrable(msg),
        other => other,
    }
}

/// `∫_Ω det D²u`.
pub fn ma_mass(u: &ConvexFamily, omega: &Domain, resolution: usize) -> Result<Integral> {
    if u.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: omega.dim() });
    }
    let m = omega.integrate(&det_integrand(u), resolution).map_err(as_mass_error)?;
    if !m.value.is_finite() {
        return Err(Error::NonIntegrable(format!("mass estimate {} on {omega:?}", m.value)));
    }
    Ok(m)
}

/// Masses over `{x₁ > cutoff}` for a decreasing sequence of cutoffs (revolution domains).
pub fn mass_refinement(u: &ConvexFamily, omega: &Domain, cutoffs: &[f64], resolution: usize) -> Result<Vec<Integral>> {
    cutoffs.iter().map(|&c| omega.integrate_from(&det_integrand(u), c, resolution).map_err(as_mass_error)).collect()
}

/// Nodal values on a uniform planar grid. The interpolant is the lower convex envelope of
/// the data; for the local one-ring oracle each cell is split along the diagonal with the
/// smaller endpoint sum.
///
/// `weights[k]` is the fraction of node `k`'s dual cell (the `h × h` square around it) lying in Ω.
#[derive(Debug, Clone)]
pub struct PLConvex {
    pub lo: [f64; 2],
    pub h: f64,
    pub n: usize,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Report of the discrete convexity check across interior edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityDefect {
    pub violations: usize,
    pub worst: f64,
}

const PAD_CELLS: usize = 2;
const FRACTION_SUBSAMPLES: usize = 64;

impl PLConvex {
    /// Samples `u` on a grid with `nodes` points across the bounding box of Ω (plus two padding layers).
    pub fn from_family(u: &ConvexFamily, omega: &Domain, nodes: usize) -> Result<PLConvex> {
        let pl = PLConvex::from_fn(|x| u.value(x), omega, nodes)?;
        let defect = pl.convexity_defect();
        if defect.violations > 0 {
            return Err(Error::ConvexityViolation(format!(
                "{} grid second difference(s) of the nodal data are negative (worst {:e})",
                defect.violations, defect.worst
            )));
        }
        Ok(pl)
    }

    /// Same as [`PLConvex::from_family`] for an arbitrary function; no convexity check.
    pub fn from_fn<F>(f: F, omega: &Domain, nodes: usize) -> Result<PLConvex>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        if omega.dim() != 2 {
            return Err(Error::UnsupportedDimension { dim: omega.dim(), reason: "PL oracle is planar".into() });
        }
        if nodes < 3 {
            return Err(Error::InvalidParameter("PL grid needs at least 3 nodes per side".into()));
        }
        let (blo, bhi) = bounding_box(omega)?;
        let span = (bhi[0] - blo[0]).max(bhi[1] - blo[1]);
        let h = span / (nodes - 1) as f64;
        let lo = [blo[0] - PAD_CELLS as f64 * h, blo[1] - PAD_CELLS as f64 * h];
        let n = nodes + 2 * PAD_CELLS;
        let coords: Vec<[f64; 2]> =
            (0..n * n).map(|k| [lo[0] + (k / n) as f64 * h, lo[1] + (k % n) as f64 * h]).collect();
        let values: Vec<f64> = coords.par_iter().map(|c| f(c)).collect::<Result<_>>()?;
        let weights: Vec<f64> = coords.par_iter().map(|c| cell_fraction(omega, c, h)).collect();
        Ok(PLConvex { lo, h, n, values, weights })
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.lo[0] + i as f64 * self.h, self.lo[1] + j as f64 * self.h]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    /// The two triangles of cell `(i, j)`, split along the diagonal with the smaller
    /// endpoint sum so the in-cell fold is convex.
    fn cell_triangles(&self, i: usize, j: usize) -> [[(usize, usize); 3]; 2] {
        let main = self.value(i, j) + self.value(i + 1, j + 1) <= self.value(i + 1, j) + self.value(i, j + 1);
        if main {
            [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]]
        } else {
            [[(i, j), (i + 1, j), (i, j + 1)], [(i + 1, j), (i + 1, j + 1), (i, j + 1)]]
        }
    }

    fn triangles(&self) -> Vec<[(usize, usize); 3]> {
        let mut t = Vec::with_capacity(2 * (self.n - 1) * (self.n - 1));
        for i in 0..self.n - 1 {
            for j in 0..self.n - 1 {
                t.extend(self.cell_triangles(i, j));
            }
        }
        t
    }

    fn gradient_of(&self, tri: &[(usize, usize); 3]) -> [f64; 2] {
        let p: Vec<[f64; 2]> = tri.iter().map(|&(i, j)| self.node(i, j)).collect();
        let v: Vec<f64> = tri.iter().map(|&(i, j)| self.value(i, j)).collect();
        let (a, b) = ([p[1][0] - p[0][0], p[1][1] - p[0][1]], [p[2][0] - p[0][0], p[2][1] - p[0][1]]);
        let (da, db) = (v[1] - v[0], v[2] - v[0]);
        let det = a[0] * b[1] - a[1] * b[0];
        [(da * b[1] - db * a[1]) / det, (a[0] * db - b[0] * da) / det]
    }

    /// Discrete convexity along grid lines: `v(x − d) + v(x + d) >= 2v(x)` for the axis and
    /// diagonal steps `d`. Data sampled from a convex function always pass.
    pub fn convexity_defect(&self) -> ConvexityDefect {
        let vmax = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-10 * (1.0 + vmax);
        let steps: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
        let n = self.n as isize;
        let mut violations = 0;
        let mut worst = 0.0f64;
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let c = self.value(i as usize, j as usize);
                for (di, dj) in steps {
                    let a = self.value((i - di) as usize, (j - dj) as usize);
                    let b = self.value((i + di) as usize, (j + dj) as usize);
                    let gap = a + b - 2.0 * c;
                    if gap < -tol {
                        violations += 1;
                        worst = worst.min(gap);
                    }
                }
            }
        }
        ConvexityDefect { violations, worst }
    }

    /// Area of the subdifferential at an interior node: the convex hull of the gradients
    /// of its incident triangles.
    pub fn one_ring_area(&self, i: usize, j: usize) -> Result<f64> {
        if i == 0 || j == 0 || i + 1 >= self.n || j + 1 >= self.n {
            return Err(Error::InvalidParameter(format!("node ({i},{j}) is on the grid boundary")));
        }
        let incident: Vec<[(usize, usize); 3]> = self.triangles_around(i, j).into_iter().collect();
        let grads: Vec<[f64; 2]> = incident.iter().map(|t| self.gradient_of(t)).collect();
        Ok(convex_hull_area(&grads))
    }

    fn triangles_around(&self, i: usize, j: usize) -> Vec<[(usize, usize); 3]> {
        let c = (i, j);
        let mut out = Vec::with_capacity(6);
        for (ci, cj) in [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)] {
            out.extend(self.cell_triangles(ci, cj).into_iter().filter(|t| t.contains(&c)));
        }
        out
    }
}

fn bounding_box(omega: &Domain) -> Result<([f64; 2], [f64; 2])> {
    match omega {
        Domain::Ball { center, radius } => {
            Ok(([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius]))
        }
        Domain::Box { lo, hi } => Ok(([lo[0], lo[1]], [hi[0], hi[1]])),
        _ => {
            let pts = omega.boundary_points(4096)?;
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for p in &pts {
                for a in 0..2 {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
            Ok((lo, hi))
        }
    }
}

/// Fraction of the square of side `h` centered at `c` inside Ω.
fn cell_fraction(omega: &Domain, c: &[f64; 2], h: f64) -> f64 {
    let corners = [[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]];
    let inside = corners.iter().filter(|o| omega.contains(&[c[0] + o[0] * h, c[1] + o[1] * h])).count();
    if inside == 4 && omega.contains(c) {
        return 1.0;
    }
    let m = FRACTION_SUBSAMPLES;
    let mut hits = 0usize;
    for a in 0..m {
        for b in 0..m {
            let x = [c[0] + ((a as f64 + 0.5) / m as f64 - 0.5) * h, c[1] + ((b as f64 + 0.5) / m as f64 - 0.5) * h];
            if omega.contains(&x) {
                hits += 1;
            }
        }
    }
    hits as f64 / (m * m) as f64
}

fn convex_hull_area(pts: &[[f64; 2]]) -> f64 {
    let mut p: Vec<[f64; 2]> = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    if p.len() < 3 {
        return 0.0;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let m = hull.len();
    (0..m)
        .map(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Area of `∂u(Ω)` for the PL interpolant by a discrete Legendre transform.
///
/// Every point of a uniform gradient grid is assigned to the node maximizing `p·x − u(x)`;
/// the grid cell area is credited with that node's dual-cell fraction in Ω. `gradient_nodes`
/// is the gradient grid size per axis (`None`: eight times the spatial grid).
pub fn normal_image_area(p: &PLConvex, gradient_nodes: Option<usize>) -> Result<f64> {
    let defect = p.convexity_defect();
    if defect.violations > 0 {
        return Err(Error::ConvexityViolation(format!(
            "{} grid second difference(s) of the nodal data are negative (worst {:e})",
            defect.violations, defect.worst
        )));
    }
    let n = p.n;
    let m = gradient_nodes.unwrap_or(8 * n).max(2);
    let mut glo = [f64::INFINITY; 2];
    let mut ghi = [f64::NEG_INFINITY; 2];
    for t in p.triangles() {
        if t.iter().all(|&(i, j)| p.weights[p.idx(i, j)] == 0.0) {
            continue;
        }
        let g = p.gradient_of(&t);
        for a in 0..2 {
            glo[a] = glo[a].min(g[a]);
            ghi[a] = ghi[a].max(g[a]);
        }
    }
    if !glo[0].is_finite() {
        return Err(Error::EmptySample("no grid node meets Ω".into()));
    }
    for a in 0..2 {
        let pad = 0.1 * (ghi[a] - glo[a]).max(1e-12);
        glo[a] -= pad;
        ghi[a] += pad;
    }
    let dp = [(ghi[0] - glo[0]) / m as f64, (ghi[1] - glo[1]) / m as f64];
    let p1: Vec<f64> = (0..m).map(|a| glo[0] + (a as f64 + 0.5) * dp[0]).collect();
    let p2: Vec<f64> = (0..m).map(|b| glo[1] + (b as f64 + 0.5) * dp[1]).collect();
    let xs: Vec<f64> = (0..n).map(|k| p.lo[0] + k as f64 * p.h).collect();
    let ys: Vec<f64> = (0..n).map(|k| p.lo[1] + k as f64 * p.h).collect();

    // inner transform along x₂ for every row i and slope p₂
    let inner: Vec<Vec<(f64, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            p2.iter()
                .map(|&q| {
                    let mut best = (f64::NEG_INFINITY, 0);
                    for j in 0..n {
                        let v = q * ys[j] - p.values[i * n + j];
                        if v > best.0 {
                            best = (v, j);
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();
    let per_column: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|b| {
            let mut acc = 0.0;
            for &q in &p1 {
                let mut best = (f64::NEG_INFINITY, 0usize);
                for i in 0..n {
                    let v = q * xs[i] + inner[i][b].0;
                    if v > best.0 {
                        best = (v, i);
                    }
                }
                let i = best.1;
                acc += p.weights[i * n + inner[i][b].1];
            }
            acc
        })
        .collect();
    Ok(per_column.iter().sum::<f64>() * dp[0] * dp[1])
}

/// Section `S(x₀, t) = {u(x) − u(x₀) − Du(x₀)(x − x₀) < t}` sampled by ray shooting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubLevelSet {
    pub x0: Vec<f64>,
    pub t: f64,
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub diameter: f64,
    pub volume: f64,
    #[serde(skip)]
    pub weights: Vec<f64>,
}

impl SubLevelSet {
    pub fn domain(&self) -> Domain {
        Domain::Star {
            center: self.x0.clone(),
            directions: self.directions.clone(),
            radii: self.radii.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn boundary_points(&self) -> Vec<Vec<f64>> {
        self.directions
            .iter()
            .zip(&self.radii)
            .map(|(d, r)| self.x0.iter().zip(d).map(|(c, v)| c + r * v).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sub-level set serializes")
    }
}

/// Ray count used by [`sublevel`]: 256 in the plane, 2048 in space, 4096 beyond.
pub fn default_rays(dim: usize) -> usize {
    match dim {
        2 => 256,
        3 => 2048,
        _ => 4096,
    }
}

pub fn sublevel(u: &ConvexFamily, x0: &[f64], t: f64) -> Result<SubLevelSet> {
    sublevel_with(u, x0, t, default_rays(u.dim()))
}

/// Ray-shooting section with `rays` directions, bisected to 1e-10 relative.
pub fn sublevel_with(u: &ConvexFamily, x0: &[f64], t: f64, rays: usize) -> Result<SubLevelSet> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("section height must be positive, got {t}")));
    }
    let dim = u.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x0.len() });
    }
    let jet = u.eval_jet_order(x0, 1)?;
    let (u0, g0) = (jet.value(), jet.gradient());
    let v = |x: &[f64]| -> Result<f64> {
        let lin: f64 = g0.iter().zip(x.iter().zip(x0)).map(|(g, (a, b))| g * (a - b)).sum();
        Ok(u.value(x)? - u0 - lin)
    };
    let rule = SphereRule::new(dim, rays, 7);
    let radii: Vec<f64> = rule
        .directions
        .par_iter()
        .map(|d| {
            let at = |r: f64| -> Vec<f64> { x0.iter().zip(d).map(|(c, v)| c + r * v).collect() };
            let mut lo = 0.0;
            let mut hi = 1e-3 * (1.0 + norm(x0));
            let mut doublings = 0;
            loop {
                let x = at(hi);
                if !u.contains(&x) {
                    return Err(Error::Unbounded(format!(
                        "section at height {t} leaves the family domain along {d:?} (at {x:?})"
                    )));
                }
                if v(&x)? >= t {
                    break;
                }
                lo = hi;
                hi *= 2.0;
                doublings += 1;
                if doublings > 80 {
                    return Err(Error::Unbounded(format!("ray along {d:?} never reaches height {t}")));
                }
            }
            while hi - lo > 1e-10 * hi {
                let mid = 0.5 * (lo + hi);
                if v(&at(mid))? < t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect::<Result<_>>()?;
    let mut s = SubLevelSet {
        x0: x0.to_vec(),
        t,
        directions: rule.directions,
        radii,
        diameter: 0.0,
        volume: 0.0,
        weights: rule.weights,
    };
    let g = s.domain().geometry()?;
    s.diameter = g.diameter;
    s.volume = g.volume;
    Ok(s)
}

/// `∫_S det D²u / ∫_{σS} det D²u`, with σS dilated about the base point.
pub fn doubling_ratio(u: &ConvexFamily, s: &SubLevelSet, sigma: f64, resolution: usize) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidParameter(format!("σ must lie in (0,1), got {sigma}")));
    }
    let outer = ma_mass(u, &s.domain(), resolution)?;
    let inner = ma_mass(u, &s.domain().dilate(&s.x0, sigma)?, resolution)?;
    if !(inner.value > 0.0) {
        return Err(Error::DegenerateGeometry(format!("zero Monge–Ampère mass in σS for σ = {sigma}")));
    }
    Ok(outer.value / inner.value)
}

/// Mean of `det D²u` over the section.
pub fn average_density(u: &ConvexFamily, s: &SubLevelSet, resolution: usize) -> Result<f64> {
    if !(s.volume > 0.0) {
        return Err(Error::DegenerateGeometry("section has zero volume".into()));
    }
    Ok(ma_mass(u, &s.domain(), resolution)?.value / s.volume)
}

/// Affine normalization `x ↦ scale · matrix · (x − center)` with `det matrix = 1`,
/// and the sandwich `B₁/ρ ⊂ T(S) ⊂ ρB₁` it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct JohnNormalization {
    pub center: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub scale: f64,
    pub outer: f64,
    pub inner: f64,
    pub rho: f64,
    pub iterations: usize,
}

impl JohnNormalization {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = DVector::from_iterator(x.len(), x.iter().zip(&self.center).map(|(a, c)| a - c));
        (&self.matrix * d * self.scale).iter().copied().collect()
    }
}

/// Stopping tolerance of the minimum-volume ellipsoid iteration.
pub const JOHN_TOL: f64 = 1e-4;

pub fn john_normalize(s: &SubLevelSet) -> Result<JohnNormalization> {
    john_normalize_points(&s.boundary_points())
}

/// Approximate minimum-volume enclosing ellipsoid (Khachiyan) of a boundary sample.
pub fn john_normalize_points(points: &[Vec<f64>]) -> Result<JohnNormalization> {
    let m = points.len();
    let d = points.first().map_or(0, |p| p.len());
    if m <= d || d == 0 {
        return Err(Error::DegenerateGeometry(format!("{m} points cannot span a body in R^{d}")));
    }
    let q = DMatrix::from_fn(d + 1, m, |r, c| if r < d { points[c][r] } else { 1.0 });
    let mut w = vec![1.0 / m as f64; m];
    let target = (d + 1) as f64 * (1.0 + JOHN_TOL);
    let mut iterations = 0;
    loop {
        let x = DMatrix::from_fn(d + 1, d + 1, |a, b| (0..m).map(|k| w[k] * q[(a, k)] * q[(b, k)]).sum());
        let xinv = x.try_inverse().ok_or_else(|| Error::DegenerateGeometry("flat point set".into()))?;
        let scores: Vec<f64> = (0..m)
            .map(|k| {
                let col = q.column(k);
                (col.transpose() * &xinv * col)[(0, 0)]
            })
            .collect();
        let (jmax, smax) =
            scores.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        if smax <= target || iterations >= 200_000 {
            break;
        }
        let step = (smax - (d + 1) as f64) / ((d + 1) as f64 * (smax - 1.0));
        w.iter_mut().for_each(|v| *v *= 1.0 - step);
        w[jmax] += step;
        iterations += 1;
    }
    let p = DMatrix::from_fn(d, m, |r, c| points[c][r]);
    let center: Vec<f64> = (0..d).map(|r| (0..m).map(|k| w[k] * p[(r, k)]).sum()).collect();
    let cov = DMatrix::from_fn(d, d, |a, b| {
        (0..m).map(|k| w[k] * (p[(a, k)] - center[a]) * (p[(b, k)] - center[b])).sum::<f64>()
    }) * d as f64;
    let eig = SymmetricEigen::new(cov);
    if eig.eigenvalues.min() <= 1e-300 {
        return Err(Error::DegenerateGeometry("flat point set".into()));
    }
    // A^{1/2} = cov^{-1/2}
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let scale = inv_sqrt.determinant().powf(1.0 / d as f64);
    let matrix = inv_sqrt / scale;
    let mut out = JohnNormalization { center, matrix, scale, outer: 0.0, inner: 0.0, rho: 0.0, iterations };
    let ys: Vec<Vec<f64>> = points.iter().map(|p| out.apply(p)).collect();
    let outer = ys.iter().map(|y| norm(y)).fold(0.0, f64::max);
    // support function of the normalized body along its own vertex directions
    let inner = ys
        .par_iter()
        .map(|y| {
            let r = norm(y);
            ys.iter().map(|z| z.iter().zip(y).map(|(a, b)| a * b / r).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(inner > 0.0) {
        return Err(Error::DegenerateGeometry("ellipsoid center outside the sampled body".into()));
    }
    out.outer = outer;
    out.inner = inner;
    out.rho = outer.max(1.0 / inner);
    Ok(out)
}

/// `v(z/2)/v(z)` for `v(x) = u(x₀ + x) − u(x₀) − Du(x₀)·x`.
pub fn halving_ratio(u: &ConvexFamily, x0: &[f64], z: &[f64]) -> Result<f64> {
    let jet = u.eval_jet_order(x0, 1)?;
    let (u0, g0) = (jet.value(), jet.gradient());
    let v = |s: f64| -> Result<f64> {
        let x: Vec<f64> = x0.iter().zip(z).map(|(a, b)| a + s * b).collect();
        let lin: f64 = g0.iter().zip(z).map(|(g, b)| g * s * b).sum();
        Ok(u.value(&x)? - u0 - lin)
    };
    let full = v(1.0)?;
    let half = v(0.5)?;
    let scale = u0.abs() + g0.iter().zip(z).map(|(g, b)| (g * b).abs()).sum::<f64>();
    if !(full > 1e-13 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateGeometry(format!("v(z) = {full:e}: u is flat along z = {z:?}")));
    }
    Ok(half / full)
}

/// Largest distance between sampled boundary points.
pub fn sample_diameter(points: &[Vec<f64>]) -> f64 {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| points[i + 1..].iter().map(|q| dist(p, q)).fold(0.0, f64::max))
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn paraboloid_mass() {
        let u = ConvexFamily::paraboloid(2, -1.0);
        let m = ma_mass(&u, &Domain::unit_ball(2), 64).unwrap();
        assert_relative_eq!(m.value, 4.0 * PI, max_relative = 1e-10);
    }

    #[test]
    fn quadratic_normal_image() {
        let u = ConvexFamily::paraboloid(2, 0.0);
        let pl = PLConvex::from_family(&u, &Domain::unit_ball(2), 65).unwrap();
        let a = normal_image_area(&pl, None).unwrap();
        assert!((a / (4.0 * PI) - 1.0).abs() < 0.02, "{a}");
    }

    #[test]
    fn hull_area() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        assert_relative_eq!(convex_hull_area(&sq), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ball_section() {
        let u = ConvexFamily::paraboloid(2, 0.0);
        let s = sublevel(&u, &[0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(s.diameter, 2.0, epsilon = 1e-6);
        assert!((s.volume - PI).abs() < 1e-3);
        assert!(s.to_json().contains("\"radii\""));
    }

    #[test]
    fn halving_examples() {
        let u = ConvexFamily::paraboloid(2, 0.0);
        assert_relative_eq!(halving_ratio(&u, &[0.3, -1.0], &[0.2, 0.5]).unwrap(), 0.25, epsilon = 1e-12);
        let q = ConvexFamily::power_radial(2, 4.0).unwrap();
        assert_relative_eq!(halving_ratio(&q, &[0.0, 0.0], &[0.3, 0.1]).unwrap(), 1.0 / 16.0, epsilon = 1e-12);
        let lin = ConvexFamily::affine_image(
            ConvexFamily::paraboloid(2, 0.0),
            DMatrix::zeros(2, 2),
            vec![0.0; 2],
            vec![1.0, 0.0],
            0.0,
        );
        assert!(lin.is_err() || halving_ratio(&lin.unwrap(), &[0.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
