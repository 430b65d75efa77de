//! Closed-form convex function families, each expandable to a jet.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::curve::{CurveExpr, Interval, ScalarCurve};
use crate::error::{Error, Result};
use crate::jets::{Jet, ScalarField, MAX_DIM, MAX_ORDER};

/// Distance kept from singular boundaries (`y_i = 0`, `t = 0`, `y = 0`).
pub const DOMAIN_MARGIN: f64 = 1e-8;

/// One of the catalogued families.
///
/// Points are `x = (y, t)` with `y ∈ R^n`, `N = n + 1` for the families that
/// single out a last coordinate `t`.
#[derive(Debug, Clone)]
pub enum ConvexFamily {
    /// `u = ½ xᵀQx + b·x + c`, so `D²u = Q`.
    Quadratic { q: DMatrix<f64>, b: Vec<f64>, c: f64 },
    /// `u = |y|² η(t) + φ(t)`.
    WarrenSeparable { n: usize, eta: ScalarCurve, phi: ScalarCurve },
    /// `u = φ(|y|) η(t)`.
    TWSeparable { n: usize, phi: ScalarCurve, eta: ScalarCurve },
    /// `u = exp(|y|^α + t)`.
    ExpPower { n: usize, alpha: f64 },
    /// `u = exp(y₁² + t) + Σ_{i,j≥2} A_ij y_i y_j + Σ_{i≥2} B_i y_i + C`.
    HalfExp { a: DMatrix<f64>, b: Vec<f64>, c: f64 },
    /// `u = Π y_i^{-α_i} e^t` on `y_i > 0`.
    ProductHalfSpace { alpha: Vec<f64> },
    /// `u = Π y_i^{-α_i}` on the positive orthant.
    ProductFull { alpha: Vec<f64> },
    /// `u = |x|^β − 1`.
    PowerRadial { dim: usize, beta: f64 },
    /// `u = ζ(x₁)|x'|² − η(x₁)`.
    SlabSeparable { dim: usize, zeta: ScalarCurve, eta: ScalarCurve },
    /// `u = |x| − 1`.
    Cone { dim: usize },
    /// `u = c · x_axis^p`.
    AxisPower { dim: usize, axis: usize, coef: f64, power: f64 },
    /// Pointwise sum of families on a common space.
    Sum { parts: Vec<ConvexFamily> },
    /// `u(x) = base(Ax + s) + ℓ·x + c`.
    AffineImage { base: Box<ConvexFamily>, matrix: DMatrix<f64>, shift: Vec<f64>, linear: Vec<f64>, constant: f64 },
}

/// Outcome of a Hessian eigenvalue test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    StrictlyConvex,
    Degenerate,
    NotConvex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub class: Convexity,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Relative eigenvalue threshold separating strict from degenerate convexity.
pub const CONVEXITY_REL_TOL: f64 = 1e-10;

fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.is_square() && m.clone().cholesky().is_some() && (m - m.transpose()).amax() <= 1e-12 * m.amax().max(1.0)
}

fn is_psd(m: &DMatrix<f64>) -> bool {
    if !m.is_square() || (m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
        return false;
    }
    let eig = SymmetricEigen::new(m.clone());
    let scale = eig.eigenvalues.amax().max(1e-300);
    eig.eigenvalues.iter().all(|&l| l >= -1e-12 * scale)
}

fn outside(x: &[f64], reason: impl Into<String>) -> Error {
    Error::OutsideDomain { point: x.to_vec(), reason: reason.into() }
}

impl ConvexFamily {
    pub fn quadratic(q: DMatrix<f64>, b: Vec<f64>, c: f64) -> Result<ConvexFamily> {
        if !q.is_square() || q.nrows() != b.len() || q.nrows() == 0 || q.nrows() > MAX_DIM {
            return Err(Error::InvalidParameter("quadratic needs a square Q matching b".into()));
        }
        if !is_psd(&q) {
            return Err(Error::InvalidParameter("quadratic Q must be symmetric positive semidefinite".into()));
        }
        Ok(ConvexFamily::Quadratic { q, b, c })
    }

    /// `|x|² + c` on `R^dim`.
    pub fn paraboloid(dim: usize, c: f64) -> ConvexFamily {
        ConvexFamily::Quadratic { q: DMatrix::identity(dim, dim) * 2.0, b: vec![0.0; dim], c }
    }

    pub fn warren(n: usize, eta: ScalarCurve, phi: ScalarCurve) -> Result<ConvexFamily> {
        if n == 0 || n + 1 > MAX_DIM {
            return Err(Error::InvalidParameter(format!("Warren family needs 1 <= n <= {}", MAX_DIM - 1)));
        }
        Ok(ConvexFamily::WarrenSeparable { n, eta, phi })
    }

    pub fn trudinger_wang(n: usize, phi: ScalarCurve, eta: ScalarCurve) -> Result<ConvexFamily> {
        if n == 0 || n + 1 > MAX_DIM {
            return Err(Error::InvalidParameter(format!("TW family needs 1 <= n <= {}", MAX_DIM - 1)));
        }
        Ok(ConvexFamily::TWSeparable { n, phi, eta })
    }

    pub fn exp_power(n: usize, alpha: f64) -> Result<ConvexFamily> {
        if n == 0 || n + 1 > MAX_DIM || !(alpha > 0.0) {
            return Err(Error::InvalidParameter("exp-power family needs n >= 1 and α > 0".into()));
        }
        Ok(ConvexFamily::ExpPower { n, alpha })
    }

    pub fn half_exp(a: DMatrix<f64>, b: Vec<f64>, c: f64) -> Result<ConvexFamily> {
        if a.nrows() != b.len() || a.nrows() + 2 > MAX_DIM {
            return Err(Error::InvalidParameter("HalfExp needs A of size (n-1)x(n-1) and B of length n-1".into()));
        }
        if a.nrows() > 0 && !is_positive_definite(&a) {
            return Err(Error::InvalidParameter("HalfExp matrix A must be symmetric positive definite".into()));
        }
        Ok(ConvexFamily::HalfExp { a, b, c })
    }

    pub fn product_halfspace(alpha: Vec<f64>) -> Result<ConvexFamily> {
        if alpha.is_empty() || alpha.len() + 1 > MAX_DIM || alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidParameter("product exponents α_i must be positive".into()));
        }
        Ok(ConvexFamily::ProductHalfSpace { alpha })
    }

    pub fn product_full(alpha: Vec<f64>) -> Result<ConvexFamily> {
        if alpha.is_empty() || alpha.len() > MAX_DIM || alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidParameter("product exponents α_i must be positive".into()));
        }
        Ok(ConvexFamily::ProductFull { alpha })
    }

    pub fn power_radial(dim: usize, beta: f64) -> Result<ConvexFamily> {
        if dim == 0 || dim > MAX_DIM || !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!("power radial family needs β > 1, got {beta}")));
        }
        Ok(ConvexFamily::PowerRadial { dim, beta })
    }

    pub fn affine_image(
        base: ConvexFamily,
        matrix: DMatrix<f64>,
        shift: Vec<f64>,
        linear: Vec<f64>,
        constant: f64,
    ) -> Result<ConvexFamily> {
        let d = base.dim();
        if matrix.nrows() != d || matrix.ncols() != d || shift.len() != d || linear.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        Ok(ConvexFamily::AffineImage { base: Box::new(base), matrix, shift, linear, constant })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexFamily::Quadratic { q, .. } => q.nrows(),
            ConvexFamily::WarrenSeparable { n, .. }
            | ConvexFamily::TWSeparable { n, .. }
            | ConvexFamily::ExpPower { n, .. } => n + 1,
            ConvexFamily::HalfExp { a, .. } => a.nrows() + 2,
            ConvexFamily::ProductHalfSpace { alpha } => alpha.len() + 1,
            ConvexFamily::ProductFull { alpha } => alpha.len(),
            ConvexFamily::PowerRadial { dim, .. }
            | ConvexFamily::SlabSeparable { dim, .. }
            | ConvexFamily::Cone { dim }
            | ConvexFamily::AxisPower { dim, .. } => *dim,
            ConvexFamily::Sum { parts } => parts.first().map_or(0, |p| p.dim()),
            ConvexFamily::AffineImage { base, .. } => base.dim(),
        }
    }

    /// Short tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            ConvexFamily::Quadratic { .. } => "quadratic",
            ConvexFamily::WarrenSeparable { .. } => "warren",
            ConvexFamily::TWSeparable { .. } => "trudinger-wang",
            ConvexFamily::ExpPower { .. } => "exp-power",
            ConvexFamily::HalfExp { .. } => "half-exp",
            ConvexFamily::ProductHalfSpace { .. } => "product-halfspace",
            ConvexFamily::ProductFull { .. } => "product-full",
            ConvexFamily::PowerRadial { .. } => "power-radial",
            ConvexFamily::SlabSeparable { .. } => "slab",
            ConvexFamily::Cone { .. } => "cone",
            ConvexFamily::AxisPower { .. } => "axis-power",
            ConvexFamily::Sum { .. } => "sum",
            ConvexFamily::AffineImage { .. } => "affine-image",
        }
    }

    /// Strict-interior membership of the open admissible domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.check_domain(x).is_ok()
    }

    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(outside(x, "non-finite coordinate"));
        }
        let r2 = |ys: &[f64]| ys.iter().map(|v| v * v).sum::<f64>();
        match self {
            ConvexFamily::WarrenSeparable { n, eta, phi } => {
                let t = x[*n];
                let dom = eta.domain().intersect(&phi.domain());
                if !inside_margin(dom, t) {
                    return Err(outside(x, "t outside the curve domain"));
                }
            }
            ConvexFamily::TWSeparable { n, phi, eta } => {
                let r = r2(&x[..*n]).sqrt();
                if !inside_margin(phi.domain().intersect(&Interval::POSITIVE), r) {
                    return Err(outside(x, "requires y != 0 inside the φ domain"));
                }
                if !inside_margin(eta.domain(), x[*n]) {
                    return Err(outside(x, "t outside the η domain"));
                }
            }
            ConvexFamily::ExpPower { n, alpha } => {
                let even = (alpha / 2.0).fract() == 0.0;
                if !even && r2(&x[..*n]).sqrt() <= DOMAIN_MARGIN {
                    return Err(outside(x, "|y|^α is not smooth at y = 0 for this α"));
                }
            }
            ConvexFamily::ProductHalfSpace { alpha } | ConvexFamily::ProductFull { alpha } => {
                if x[..alpha.len()].iter().any(|&v| v <= DOMAIN_MARGIN) {
                    return Err(outside(x, "requires y_i > 0"));
                }
            }
            ConvexFamily::PowerRadial { beta, .. } => {
                let even = (beta / 2.0).fract() == 0.0;
                // |x|^β stays finite to underflow; the mass near the center is not negligible
                if !even && !(r2(x) > 1e-290) {
                    return Err(outside(x, "|x|^β is singular at the origin"));
                }
            }
            ConvexFamily::SlabSeparable { zeta, eta, .. } => {
                if !inside_margin(zeta.domain().intersect(&eta.domain()), x[0]) {
                    return Err(outside(x, "x₁ outside (0, ω)"));
                }
            }
            ConvexFamily::Cone { .. } => {
                if super::domain::norm(x) <= DOMAIN_MARGIN {
                    return Err(outside(x, "cone vertex"));
                }
            }
            ConvexFamily::AxisPower { axis, power, .. } => {
                let integer = power.fract() == 0.0 && *power >= 0.0;
                if !integer && x[*axis] <= DOMAIN_MARGIN {
                    return Err(outside(x, "non-integer power needs a positive coordinate"));
                }
            }
            ConvexFamily::Sum { parts } => {
                for p in parts {
                    p.check_domain(x)?;
                }
            }
            ConvexFamily::AffineImage { base, matrix, shift, .. } => {
                let z = apply_affine(matrix, shift, x);
                base.check_domain(&z).map_err(|_| outside(x, "affine preimage outside the base domain"))?;
            }
            ConvexFamily::Quadratic { .. } | ConvexFamily::HalfExp { .. } => {}
        }
        Ok(())
    }

    /// Full jet of `u` at `x`, truncated at `order`.
    pub fn eval_jet_order(&self, x: &[f64], order: usize) -> Result<Jet> {
        self.check_domain(x)?;
        let xs = Jet::seed_point(x, order.min(MAX_ORDER))?;
        self.eval_on(&xs)
    }

    /// Order-4 jet of `u` at `x`.
    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet> {
        self.eval_jet_order(x, MAX_ORDER)
    }

    /// Evaluates the family on argument jets (the building block for affine images).
    pub fn eval_on(&self, xs: &[Jet]) -> Result<Jet> {
        let dim = xs.len();
        let order = xs[0].order();
        let zero = || Jet::constant(0.0, dim, order);
        let sumsq = |v: &[Jet]| Jet::sum_of_squares(v).unwrap_or_else(zero);
        match self {
            ConvexFamily::Quadratic { q, b, c } => {
                let mut acc = Jet::constant(*c, dim, order);
                for i in 0..dim {
                    let mut row = zero();
                    for j in 0..dim {
                        if q[(i, j)] != 0.0 {
                            row = &row + &xs[j].scale(q[(i, j)]);
                        }
                    }
                    acc = &acc + &(&xs[i] * &row).scale(0.5);
                    if b[i] != 0.0 {
                        acc = &acc + &xs[i].scale(b[i]);
                    }
                }
                Ok(acc)
            }
            ConvexFamily::WarrenSeparable { n, eta, phi } => {
                let r2 = sumsq(&xs[..*n]);
                let t = &xs[*n];
                Ok(&(&r2 * &eta.eval_jet(t)?) + &phi.eval_jet(t)?)
            }
            ConvexFamily::TWSeparable { n, phi, eta } => {
                let r = sumsq(&xs[..*n]).sqrt()?;
                Ok(&phi.eval_jet(&r)? * &eta.eval_jet(&xs[*n])?)
            }
            ConvexFamily::ExpPower { n, alpha } => {
                let ra = sumsq(&xs[..*n]).powf(alpha / 2.0)?;
                Ok((&ra + &xs[*n]).exp())
            }
            ConvexFamily::HalfExp { a, b, c } => {
                let n = dim - 1;
                let t = &xs[n];
                let mut acc = (&(&xs[0] * &xs[0]) + t).exp().add_scalar(*c);
                for i in 1..n {
                    for j in 1..n {
                        let aij = a[(i - 1, j - 1)];
                        if aij != 0.0 {
                            acc = &acc + &(&xs[i] * &xs[j]).scale(aij);
                        }
                    }
                    if b[i - 1] != 0.0 {
                        acc = &acc + &xs[i].scale(b[i - 1]);
                    }
                }
                Ok(acc)
            }
            ConvexFamily::ProductHalfSpace { alpha } => {
                let mut expo = xs[alpha.len()].clone();
                for (i, &a) in alpha.iter().enumerate() {
                    expo = &expo - &xs[i].ln()?.scale(a);
                }
                Ok(expo.exp())
            }
            ConvexFamily::ProductFull { alpha } => {
                let mut expo = zero();
                for (i, &a) in alpha.iter().enumerate() {
                    expo = &expo - &xs[i].ln()?.scale(a);
                }
                Ok(expo.exp())
            }
            ConvexFamily::PowerRadial { beta, .. } => Ok(sumsq(xs).powf(beta / 2.0)?.add_scalar(-1.0)),
            ConvexFamily::SlabSeparable { zeta, eta, .. } => {
                let r2 = sumsq(&xs[1..]);
                let x1 = &xs[0];
                Ok(&(&zeta.eval_jet(x1)? * &r2) - &eta.eval_jet(x1)?)
            }
            ConvexFamily::Cone { .. } => Ok(sumsq(xs).sqrt()?.add_scalar(-1.0)),
            ConvexFamily::AxisPower { axis, coef, power, .. } => Ok(xs[*axis].powf(*power)?.scale(*coef)),
            ConvexFamily::Sum { parts } => {
                let mut acc = zero();
                for p in parts {
                    acc = &acc + &p.eval_on(xs)?;
                }
                Ok(acc)
            }
            ConvexFamily::AffineImage { base, matrix, shift, linear, constant } => {
                let z: Vec<Jet> = (0..dim)
                    .map(|i| {
                        let mut acc = Jet::constant(shift[i], dim, order);
                        for j in 0..dim {
                            if matrix[(i, j)] != 0.0 {
                                acc = &acc + &xs[j].scale(matrix[(i, j)]);
                            }
                        }
                        acc
                    })
                    .collect();
                let mut acc = base.eval_on(&z)?.add_scalar(*constant);
                for (j, &l) in linear.iter().enumerate() {
                    if l != 0.0 {
                        acc = &acc + &xs[j].scale(l);
                    }
                }
                Ok(acc)
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        // radial profiles stay continuous at the center, where their jets do not exist
        match self {
            ConvexFamily::PowerRadial { dim, beta } if x.len() == *dim && self.check_domain(x).is_err() => {
                Ok(super::domain::norm(x).powf(*beta) - 1.0)
            }
            ConvexFamily::Cone { dim } if x.len() == *dim && self.check_domain(x).is_err() => {
                Ok(super::domain::norm(x) - 1.0)
            }
            _ => Ok(self.eval_jet_order(x, 0)?.value()),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            ConvexFamily::PowerRadial { dim, beta }
                if *beta > 1.0 && x.len() == *dim && self.check_domain(x).is_err() =>
            {
                let r = super::domain::norm(x);
                Ok(x.iter().map(|v| if r > 0.0 { beta * r.powf(beta - 2.0) * v } else { 0.0 }).collect())
            }
            _ => Ok(self.eval_jet_order(x, 1)?.gradient()),
        }
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.eval_jet_order(x, 2)?.hessian())
    }

    pub fn hessian_det(&self, x: &[f64]) -> Result<f64> {
        Ok(self.hessian(x)?.determinant())
    }

    /// Eigenvalue classification of `D²u(x)` with a scale-free threshold.
    pub fn is_convex_at(&self, x: &[f64]) -> Result<ConvexityReport> {
        let h = self.hessian(x)?;
        let eig = SymmetricEigen::new(h);
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        let eps = CONVEXITY_REL_TOL * max.abs().max(min.abs());
        let class = if min < -eps {
            Convexity::NotConvex
        } else if min <= eps {
            Convexity::Degenerate
        } else {
            Convexity::StrictlyConvex
        };
        Ok(ConvexityReport { class, min_eigenvalue: min, max_eigenvalue: max })
    }

    /// Closed-form Hessian determinant where one is known, used to cross-check the jets.
    pub fn closed_form_det(&self, x: &[f64]) -> Result<Option<f64>> {
        self.check_domain(x)?;
        let r2 = |ys: &[f64]| ys.iter().map(|v| v * v).sum::<f64>();
        Ok(match self {
            ConvexFamily::Quadratic { q, .. } => Some(q.determinant()),
            ConvexFamily::WarrenSeparable { n, eta, phi } => {
                let t = x[*n];
                let e = eta.derivatives(t)?;
                let p = phi.derivatives(t)?;
                let r2 = r2(&x[..*n]);
                Some((2.0 * e[0]).powi(*n as i32) * (r2 * (e[2] - 2.0 * e[1] * e[1] / e[0]) + p[2]))
            }
            ConvexFamily::TWSeparable { n, phi, eta } => {
                let r = r2(&x[..*n]).sqrt();
                Some(tw_det(*n, &phi.derivatives(r)?, &eta.derivatives(x[*n])?, r))
            }
            ConvexFamily::ExpPower { n, alpha } => {
                let r = r2(&x[..*n]).sqrt();
                if r <= DOMAIN_MARGIN {
                    return Ok(None);
                }
                let phi = ScalarCurve::expr(CurveExpr::exp(CurveExpr::monomial(1.0, *alpha)), Interval::POSITIVE);
                let eta = ScalarCurve::expr(CurveExpr::exp(CurveExpr::Var), Interval::REAL_LINE);
                Some(tw_det(*n, &phi.derivatives(r)?, &eta.derivatives(x[*n])?, r))
            }
            ConvexFamily::ProductHalfSpace { alpha } => {
                let big_n = alpha.len() as f64 + 1.0;
                let t = x[alpha.len()];
                let prod: f64 = alpha.iter().zip(x).map(|(&a, &y)| a * y.powf(-big_n * a - 2.0)).product();
                Some((big_n * t).exp() * prod)
            }
            ConvexFamily::ProductFull { alpha } => {
                let big_n = alpha.len() as f64;
                let beta: f64 = alpha.iter().sum::<f64>() + 1.0;
                let prod: f64 = alpha.iter().zip(x).map(|(&a, &y)| a * y.powf(-big_n * a - 2.0)).product();
                Some(beta * prod)
            }
            ConvexFamily::PowerRadial { dim, beta } => {
                let r = super::domain::norm(x);
                Some(beta.powi(*dim as i32) * (beta - 1.0) * r.powf(*dim as f64 * (beta - 2.0)))
            }
            ConvexFamily::SlabSeparable { dim, zeta, eta } => {
                let z = zeta.derivatives(x[0])?;
                let e = eta.derivatives(x[0])?;
                let rp2 = r2(&x[1..]);
                let n = (*dim - 1) as i32;
                Some((2.0 * z[0]).powi(n) * (z[2] * rp2 - e[2] - 2.0 * z[1] * z[1] / z[0] * rp2))
            }
            ConvexFamily::AffineImage { base, matrix, shift, .. } => {
                let z = apply_affine(matrix, shift, x);
                base.closed_form_det(&z)?.map(|d| d * matrix.determinant().powi(2))
            }
            _ => None,
        })
    }
}

/// `[φφ''ηη'' − (φ'η')²] (φ'η/r)^{n−1}`.
fn tw_det(n: usize, p: &[f64; MAX_ORDER + 1], e: &[f64; MAX_ORDER + 1], r: f64) -> f64 {
    (p[0] * p[2] * e[0] * e[2] - (p[1] * e[1]).powi(2)) * (p[1] * e[0] / r).powi(n as i32 - 1)
}

fn inside_margin(dom: Interval, v: f64) -> bool {
    v > dom.lo + DOMAIN_MARGIN && v < dom.hi - DOMAIN_MARGIN
}

pub(crate) fn apply_affine(matrix: &DMatrix<f64>, shift: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| shift[i] + (0..x.len()).map(|j| matrix[(i, j)] * x[j]).sum::<f64>()).collect()
}

impl ScalarField for ConvexFamily {
    fn dim(&self) -> usize {
        ConvexFamily::dim(self)
    }

    fn jet_at(&self, x: &[f64], order: usize) -> Result<Jet> {
        self.eval_jet_order(x, order)
    }
}

/// JSON description of a family (tag plus parameter record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Quadratic { q: Vec<Vec<f64>>, b: Vec<f64>, c: f64 },
    WarrenSeparable { n: usize, eta: CurveSpec, phi: CurveSpec },
    TwSeparable { n: usize, phi: CurveSpec, eta: CurveSpec },
    ExpPower { n: usize, alpha: f64 },
    HalfExp { a: Vec<Vec<f64>>, b: Vec<f64>, c: f64 },
    ProductHalfSpace { alpha: Vec<f64> },
    ProductFull { alpha: Vec<f64> },
    PowerRadial { dim: usize, beta: f64 },
    SlabSeparable { dim: usize, gamma: f64, lambda: f64, sigma0: f64 },
    Cone { dim: usize },
    AxisPower { dim: usize, axis: usize, coef: f64, power: f64 },
    Sum { parts: Vec<FamilySpec> },
    AffineImage { base: Box<FamilySpec>, matrix: Vec<Vec<f64>>, shift: Vec<f64>, linear: Vec<f64>, constant: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub expr: CurveExpr,
    pub domain: Interval,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidParameter("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn curve_spec(c: &ScalarCurve) -> Option<CurveSpec> {
    c.as_expr().map(|(e, d)| CurveSpec { expr: e.clone(), domain: d })
}

impl FamilySpec {
    pub fn build(&self) -> Result<ConvexFamily> {
        let curve = |c: &CurveSpec| ScalarCurve::expr(c.expr.clone(), c.domain);
        match self {
            FamilySpec::Quadratic { q, b, c } => ConvexFamily::quadratic(from_rows(q)?, b.clone(), *c),
            FamilySpec::WarrenSeparable { n, eta, phi } => ConvexFamily::warren(*n, curve(eta), curve(phi)),
            FamilySpec::TwSeparable { n, phi, eta } => ConvexFamily::trudinger_wang(*n, curve(phi), curve(eta)),
            FamilySpec::ExpPower { n, alpha } => ConvexFamily::exp_power(*n, *alpha),
            FamilySpec::HalfExp { a, b, c } => ConvexFamily::half_exp(from_rows(a)?, b.clone(), *c),
            FamilySpec::ProductHalfSpace { alpha } => ConvexFamily::product_halfspace(alpha.clone()),
            FamilySpec::ProductFull { alpha } => ConvexFamily::product_full(alpha.clone()),
            FamilySpec::PowerRadial { dim, beta } => ConvexFamily::power_radial(*dim, *beta),
            FamilySpec::SlabSeparable { dim, gamma, lambda, sigma0 } => {
                Ok(crate::inequalities::slab::SlabCounterexample::build(*dim, *gamma, *lambda, *sigma0)?.family())
            }
            FamilySpec::Cone { dim } => Ok(ConvexFamily::Cone { dim: *dim }),
            FamilySpec::AxisPower { dim, axis, coef, power } => {
                if axis >= dim {
                    return Err(Error::IndexOutOfRange { index: *axis, dim: *dim });
                }
                Ok(ConvexFamily::AxisPower { dim: *dim, axis: *axis, coef: *coef, power: *power })
            }
            FamilySpec::Sum { parts } => {
                let parts = parts.iter().map(|p| p.build()).collect::<Result<Vec<_>>>()?;
                let d = parts.first().map_or(0, |p| p.dim());
                if d == 0 || parts.iter().any(|p| p.dim() != d) {
                    return Err(Error::InvalidParameter("sum parts must share a dimension".into()));
                }
                Ok(ConvexFamily::Sum { parts })
            }
            FamilySpec::AffineImage { base, matrix, shift, linear, constant } => {
                ConvexFamily::affine_image(base.build()?, from_rows(matrix)?, shift.clone(), linear.clone(), *constant)
            }
        }
    }
}

impl ConvexFamily {
    /// JSON-ready description; `None` for families holding numerically backed
    /// curves that are not reconstructible from parameters alone.
    pub fn to_spec(&self) -> Option<FamilySpec> {
        Some(match self {
            ConvexFamily::Quadratic { q, b, c } => FamilySpec::Quadratic { q: to_rows(q), b: b.clone(), c: *c },
            ConvexFamily::WarrenSeparable { n, eta, phi } => {
                FamilySpec::WarrenSeparable { n: *n, eta: curve_spec(eta)?, phi: curve_spec(phi)? }
            }
            ConvexFamily::TWSeparable { n, phi, eta } => {
                FamilySpec::TwSeparable { n: *n, phi: curve_spec(phi)?, eta: curve_spec(eta)? }
            }
            ConvexFamily::ExpPower { n, alpha } => FamilySpec::ExpPower { n: *n, alpha: *alpha },
            ConvexFamily::HalfExp { a, b, c } => FamilySpec::HalfExp { a: to_rows(a), b: b.clone(), c: *c },
            ConvexFamily::ProductHalfSpace { alpha } => FamilySpec::ProductHalfSpace { alpha: alpha.clone() },
            ConvexFamily::ProductFull { alpha } => FamilySpec::ProductFull { alpha: alpha.clone() },
            ConvexFamily::PowerRadial { dim, beta } => FamilySpec::PowerRadial { dim: *dim, beta: *beta },
            ConvexFamily::SlabSeparable { .. } => return None,
            ConvexFamily::Cone { dim } => FamilySpec::Cone { dim: *dim },
            ConvexFamily::AxisPower { dim, axis, coef, power } => {
                FamilySpec::AxisPower { dim: *dim, axis: *axis, coef: *coef, power: *power }
            }
            ConvexFamily::Sum { parts } => {
                FamilySpec::Sum { parts: parts.iter().map(|p| p.to_spec()).collect::<Option<Vec<_>>>()? }
            }
            ConvexFamily::AffineImage { base, matrix, shift, linear, constant } => FamilySpec::AffineImage {
                base: Box::new(base.to_spec()?),
                matrix: to_rows(matrix),
                shift: shift.clone(),
                linear: linear.clone(),
                constant: *constant,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_power_hessian_at_origin() {
        let u = ConvexFamily::exp_power(1, 2.0).unwrap();
        let h = u.hessian(&[0.0, 0.0]).unwrap();
        assert_relative_eq!(h[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(h[(1, 1)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(h[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn quadratic_hessian_is_q() {
        let u = ConvexFamily::quadratic(DMatrix::identity(3, 3), vec![0.0; 3], 0.0).unwrap();
        let h = u.hessian(&[0.3, -2.0, 5.0]).unwrap();
        assert_eq!(h, DMatrix::identity(3, 3));
    }

    #[test]
    fn product_full_det() {
        let u = ConvexFamily::product_full(vec![1.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(u.hessian_det(&[1.0, 1.0, 1.0]).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(u.closed_form_det(&[1.0, 1.0, 1.0]).unwrap().unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn convexity_examples() {
        let q = ConvexFamily::quadratic(DMatrix::identity(2, 2), vec![0.0; 2], 0.0).unwrap();
        let rep = q.is_convex_at(&[1.0, 2.0]).unwrap();
        assert_eq!(rep.class, Convexity::StrictlyConvex);
        assert_relative_eq!(rep.min_eigenvalue, 1.0, epsilon = 1e-14);

        let e = ConvexFamily::exp_power(3, 6.0).unwrap();
        assert_eq!(e.is_convex_at(&[0.0, 0.0, 0.0, 0.3]).unwrap().class, Convexity::Degenerate);

        let p = ConvexFamily::power_radial(2, 1.2).unwrap();
        let rep = p.is_convex_at(&[0.5, 0.0]).unwrap();
        assert_eq!(rep.class, Convexity::StrictlyConvex);
        let base = 1.2 * 0.5f64.powf(-0.8);
        assert_relative_eq!(rep.max_eigenvalue, base, epsilon = 1e-12);
        assert_relative_eq!(rep.min_eigenvalue, base * 0.2, epsilon = 1e-12);
    }

    #[test]
    fn domain_errors() {
        let p = ConvexFamily::product_full(vec![1.0, 2.0]).unwrap();
        assert!(matches!(p.eval_jet(&[-1.0, 1.0]), Err(Error::OutsideDomain { .. })));
        assert!(ConvexFamily::power_radial(2, 1.0).is_err());
        assert!(ConvexFamily::product_full(vec![1.0, -2.0]).is_err());
        assert!(ConvexFamily::half_exp(DMatrix::from_element(1, 1, -1.0), vec![0.0], 0.0).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let fam = ConvexFamily::warren(2, ScalarCurve::constant(1.0), ScalarCurve::power(1.0, -1.0)).unwrap();
        let spec = fam.to_spec().unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        let rebuilt = back.build().unwrap();
        let x = [0.3, 0.4, 1.5];
        assert_eq!(fam.eval_jet(&x).unwrap(), rebuilt.eval_jet(&x).unwrap());
    }
}
