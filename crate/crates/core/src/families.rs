//! Solution-family constructors with parameter-range enforcement, and solvers
//! for the algebraic θ–α conditions.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_ORDER};
use crate::quad::integrate;
use crate::surfaces::{ConvexFamily, CurveBackend, CurveExpr, Interval, ScalarCurve};

/// The solution families, keyed by the theorem labels the CLI accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `C₁|y|² + C₂t^{2−1/θ} + C₃t + C₄`
    #[serde(rename = "8.1")]
    Thm81,
    /// `C₁|y|²/t + C₂t^{n+2−1/θ} + C₃t + C₄`
    #[serde(rename = "8.2")]
    Thm82,
    /// `exp(|y|^α + t)`
    #[serde(rename = "9.1")]
    Thm91,
    /// `exp(y₁² + t) + quadratic`
    #[serde(rename = "9.1cor")]
    Cor91,
    /// `Π y_i^{-α_i} e^t`
    #[serde(rename = "10.1")]
    Thm101,
    /// `Π y_i^{-α_i}`
    #[serde(rename = "10.2")]
    Thm102,
}

impl Theorem {
    pub const ALL: [Theorem; 6] =
        [Theorem::Thm81, Theorem::Thm82, Theorem::Thm91, Theorem::Cor91, Theorem::Thm101, Theorem::Thm102];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::Thm81 => "8.1",
            Theorem::Thm82 => "8.2",
            Theorem::Thm91 => "9.1",
            Theorem::Cor91 => "9.1cor",
            Theorem::Thm101 => "10.1",
            Theorem::Thm102 => "10.2",
        }
    }

    pub fn parse(s: &str) -> Result<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.label() == s).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown theorem '{s}' (expected 8.1, 8.2, 9.1, 9.1cor, 10.1, 10.2)"))
        })
    }

    fn display_name(self) -> &'static str {
        match self {
            Theorem::Cor91 => "Corollary 9.1",
            Theorem::Thm81 => "Theorem 8.1",
            Theorem::Thm82 => "Theorem 8.2",
            Theorem::Thm91 => "Theorem 9.1",
            Theorem::Thm101 => "Theorem 10.1",
            Theorem::Thm102 => "Theorem 10.2",
        }
    }
}

/// Admissible θ values of a family in dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRange {
    pub theorem: Theorem,
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    /// Human-readable interval, e.g. `(0,1/2)`.
    pub text: String,
}

impl ThetaRange {
    pub fn of(theorem: Theorem, dim: usize) -> ThetaRange {
        let n = dim as f64;
        let (lo, hi, lc, hc, text) = match theorem {
            Theorem::Thm81 => (0.0, 0.5, false, false, "(0,1/2)".to_string()),
            Theorem::Thm82 => (0.0, 1.0 / (n + 1.0), false, false, format!("(0,1/{})", dim + 1)),
            Theorem::Thm91 => {
                let v = (n - 1.0) / n;
                (v, v, true, true, format!("{{{}/{}}}", dim - 1, dim))
            }
            Theorem::Cor91 => (0.5, 0.5, true, true, "{1/2}".to_string()),
            Theorem::Thm101 | Theorem::Thm102 => {
                (0.5, (n - 1.0) / n, false, false, format!("(1/2,{}/{})", dim.saturating_sub(1), dim))
            }
        };
        ThetaRange { theorem, dim, lo, hi, lo_closed: lc, hi_closed: hc, text }
    }

    pub fn contains(&self, theta: f64) -> bool {
        if self.lo == self.hi {
            return (theta - self.lo).abs() <= 1e-12;
        }
        let above = if self.lo_closed { theta >= self.lo } else { theta > self.lo };
        let below = if self.hi_closed { theta <= self.hi } else { theta < self.hi };
        above && below
    }

    pub fn check(&self, theta: f64) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::ThetaOutOfRange(format!(
                "θ must lie in {} per {} (N = {}), got θ = {theta}",
                self.text,
                self.theorem.display_name(),
                self.dim
            )))
        }
    }
}

fn require_dim(theorem: Theorem, dim: usize, min: usize) -> Result<()> {
    if dim < min || dim > crate::jets::MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "{} needs {min} <= N <= {}, got N = {dim}",
            theorem.display_name(),
            crate::jets::MAX_DIM
        )));
    }
    Ok(())
}

/// `c·t^p + c₃t + c₄` on `t > 0`.
fn power_plus_affine(c: f64, p: f64, c3: f64, c4: f64) -> ScalarCurve {
    let mut terms = vec![CurveExpr::monomial(c, p)];
    if c3 != 0.0 {
        terms.push(CurveExpr::monomial(c3, 1.0));
    }
    if c4 != 0.0 {
        terms.push(CurveExpr::constant(c4));
    }
    ScalarCurve::expr(CurveExpr::sum(terms), Interval::POSITIVE)
}

pub fn make_thm81(dim: usize, theta: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Result<ConvexFamily> {
    require_dim(Theorem::Thm81, dim, 2)?;
    ThetaRange::of(Theorem::Thm81, dim).check(theta)?;
    if !(c1 > 0.0 && c2 > 0.0) || c3 < 0.0 || c4 < 0.0 {
        return Err(Error::InvalidParameter("Theorem 8.1 needs C₁, C₂ > 0 and C₃, C₄ >= 0".into()));
    }
    let eta = ScalarCurve::expr(CurveExpr::constant(c1), Interval::POSITIVE);
    ConvexFamily::warren(dim - 1, eta, power_plus_affine(c2, 2.0 - 1.0 / theta, c3, c4))
}

pub fn make_thm82(dim: usize, theta: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Result<ConvexFamily> {
    require_dim(Theorem::Thm82, dim, 2)?;
    ThetaRange::of(Theorem::Thm82, dim).check(theta)?;
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidParameter("Theorem 8.2 needs C₁, C₂ > 0".into()));
    }
    let n = (dim - 1) as f64;
    let eta = ScalarCurve::expr(CurveExpr::monomial(c1, -1.0), Interval::POSITIVE);
    ConvexFamily::warren(dim - 1, eta, power_plus_affine(c2, n + 2.0 - 1.0 / theta, c3, c4))
}

/// Branch of the Riccati solution for `φ` with `η = 1/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RiccatiBranch {
    /// `β₃ = 0`
    Zero,
    /// finite `β₃ < 0`
    Finite(f64),
    /// `β₃ = −∞`
    NegInfinity,
}

/// `φ` for the finite branch: `φ'' = β₄ t^n (t − 1/β₃)^{−1/θ}`, integrated twice from 0.
struct RiccatiBackend {
    n: usize,
    shift: f64,
    power: f64,
    beta4: f64,
    beta5: f64,
    beta6: f64,
}

impl fmt::Debug for RiccatiBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RiccatiBackend(n={}, shift={}, power={})", self.n, self.shift, self.power)
    }
}

impl RiccatiBackend {
    fn kernel(&self, r: f64) -> f64 {
        r.powi(self.n as i32) * (r + self.shift).powf(-self.power)
    }
}

const RICCATI_REL_TOL: f64 = 1e-12;

impl CurveBackend for RiccatiBackend {
    fn domain(&self) -> Interval {
        Interval::POSITIVE
    }

    fn derivatives(&self, t: f64) -> Result<[f64; MAX_ORDER + 1]> {
        let tj = Jet::variable(0, t, 1)?;
        let g = &tj.powi(self.n as i64)? * &tj.add_scalar(self.shift).powf(-self.power)?;
        let first = integrate(|r| Ok(self.kernel(r)), 0.0, t, RICCATI_REL_TOL, 1e-300, 2000)?;
        // repeated integral as a single one: ∫_0^t (t − r) g(r) dr
        let second = integrate(|r| Ok((t - r) * self.kernel(r)), 0.0, t, RICCATI_REL_TOL, 1e-300, 2000)?;
        let b = self.beta4;
        Ok([
            b * second.value + self.beta5 * t + self.beta6,
            b * first.value + self.beta5,
            b * g.value(),
            b * g.derivative(&[0]),
            b * g.derivative(&[0, 0]),
        ])
    }
}

pub fn riccati_phi(
    n: usize,
    theta: f64,
    branch: RiccatiBranch,
    beta4: f64,
    beta5: f64,
    beta6: f64,
) -> Result<ScalarCurve> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("θ must be positive, got {theta}")));
    }
    if !(beta4 > 0.0) {
        return Err(Error::InvalidParameter("β₄ must be positive".into()));
    }
    let nf = n as f64;
    Ok(match branch {
        RiccatiBranch::Zero => power_plus_affine(beta4, nf + 2.0, beta5, beta6),
        RiccatiBranch::NegInfinity => power_plus_affine(beta4, nf + 2.0 - 1.0 / theta, beta5, beta6),
        RiccatiBranch::Finite(b3) => {
            if !(b3 < 0.0) || !b3.is_finite() {
                return Err(Error::InvalidParameter(format!("finite branch needs β₃ < 0, got {b3}")));
            }
            ScalarCurve::Backed(Arc::new(RiccatiBackend {
                n,
                shift: -1.0 / b3,
                power: 1.0 / theta,
                beta4,
                beta5,
                beta6,
            }))
        }
    })
}

/// Exponent choice in `exp(|y|^α + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpBranch {
    /// `α = 2`
    Quadratic,
    /// `α = (N−1)(N−2)`
    High,
}

/// Returns the family together with its θ = (N−1)/N.
pub fn make_thm91(dim: usize, branch: ExpBranch) -> Result<(ConvexFamily, f64)> {
    require_dim(Theorem::Thm91, dim, 2)?;
    let alpha = match branch {
        ExpBranch::Quadratic => 2.0,
        ExpBranch::High => {
            if dim < 3 {
                return Err(Error::InvalidParameter(format!(
                    "the branch α = (N−1)(N−2) of Theorem 9.1 needs N >= 3, got N = {dim}"
                )));
            }
            ((dim - 1) * (dim - 2)) as f64
        }
    };
    let theta = (dim as f64 - 1.0) / dim as f64;
    Ok((ConvexFamily::exp_power(dim - 1, alpha)?, theta))
}

/// `exp(y₁² + t) + Σ A_ij y_i y_j + Σ B_i y_i + C` with `n = N − 1`; θ = 1/2.
pub fn make_cor91(n: usize, a: DMatrix<f64>, b: Vec<f64>, c: f64) -> Result<ConvexFamily> {
    require_dim(Theorem::Cor91, n + 1, 2)?;
    if a.nrows() != n - 1 || a.ncols() != n - 1 || b.len() != n - 1 {
        return Err(Error::InvalidParameter(format!(
            "Corollary 9.1 with n = {n} needs A of size {0}x{0} and B of length {0}",
            n - 1
        )));
    }
    ConvexFamily::half_exp(a, b, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductVariant {
    /// `Π y_i^{-α_i} e^t`, `n = N − 1` exponents
    Halfspace,
    /// `Π y_i^{-α_i}`, `N` exponents
    Full,
}

/// θ at which the product family with exponents `alpha` solves the equation.
pub fn theta_of_alpha(alpha: &[f64], dim: usize, variant: ProductVariant) -> Result<f64> {
    if alpha.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidParameter("exponents α_i must be positive".into()));
    }
    let n = dim as f64;
    let inv: f64 = alpha.iter().map(|a| 1.0 / a).sum();
    match variant {
        ProductVariant::Halfspace => {
            if alpha.len() + 1 != dim {
                return Err(Error::DimensionMismatch { expected: dim - 1, got: alpha.len() });
            }
            Ok((2.0 * inv + n * (n - 1.0)) / (4.0 * inv + n * n))
        }
        ProductVariant::Full => {
            if alpha.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: alpha.len() });
            }
            let beta: f64 = alpha.iter().sum::<f64>() + 1.0;
            Ok((2.0 * beta * inv + (n * n - n) * beta - n) / (4.0 * beta * inv + n * n * beta - n * n))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    pub method: SolveMethod,
    pub iterations: usize,
    pub brackets: Vec<(f64, f64)>,
    /// Absolute residual of the algebraic condition at the returned value.
    pub residual: f64,
}

fn product_range_check(theorem: Theorem, theta: f64, dim: usize) -> Result<()> {
    require_dim(theorem, dim, 3)?;
    ThetaRange::of(theorem, dim).check(theta)
}

/// Symmetric exponent `a` (all `α_j = a`) for the half-space family.
pub fn solve_alpha_halfspace(theta: f64, dim: usize) -> Result<(Vec<f64>, SolveTrace)> {
    product_range_check(Theorem::Thm101, theta, dim)?;
    let big = dim as f64;
    let n = big - 1.0;
    let a = (4.0 * theta - 2.0) * n / (big * (big - 1.0 - theta * big));
    let alpha = vec![a; dim - 1];
    let residual = (theta_of_alpha(&alpha, dim, ProductVariant::Halfspace)? - theta).abs();
    Ok((alpha, SolveTrace { method: SolveMethod::ClosedForm, iterations: 0, brackets: vec![], residual }))
}

/// `F(s)` on the symmetric ray `α = s·1` and its target `N(Nθ − 1)`.
pub fn symmetric_f(theta: f64, dim: usize, s: f64) -> (f64, f64) {
    let n = dim as f64;
    let beta = n * s + 1.0;
    let gamma = n / s + 1.0;
    let f = (4.0 * theta - 2.0) * beta * gamma + (n * n - 4.0) * (theta - (n + 1.0) / (n + 2.0)) * beta;
    (f, n * (n * theta - 1.0))
}

/// Relative bracket width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-15;
pub const BISECTION_MAX_ITER: usize = 200;

/// Symmetric exponent `s` (all `α_i = s`) for the orthant family, by bisection.
pub fn solve_alpha_full(theta: f64, dim: usize) -> Result<(Vec<f64>, SolveTrace)> {
    product_range_check(Theorem::Thm102, theta, dim)?;
    let g = |s: f64| {
        let (f, target) = symmetric_f(theta, dim, s);
        f - target
    };
    let mut brackets = Vec::new();
    let (mut lo, mut hi) = (1.0, 1.0);
    while g(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Bracket("F stays below target as s → 0".into()));
        }
    }
    while g(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Bracket("F stays above target as s → ∞".into()));
        }
    }
    brackets.push((lo, hi));
    let mut iterations = 0;
    while iterations < BISECTION_MAX_ITER && hi - lo > BISECTION_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        brackets.push((lo, hi));
    }
    let s = if g(lo).abs() <= g(hi).abs() { lo } else { hi };
    let residual = g(s).abs();
    // size of the terms of F at the root, so large roots near θ = 1/2 are judged fairly
    let n = dim as f64;
    let (beta, gamma) = (n * s + 1.0, n / s + 1.0);
    let terms = ((4.0 * theta - 2.0) * beta * gamma).abs()
        + ((n * n - 4.0) * (theta - (n + 1.0) / (n + 2.0)) * beta).abs()
        + symmetric_f(theta, dim, s).1.abs();
    if residual > 1e-12 * terms {
        return Err(Error::Bracket(format!("bisection stalled with residual {residual:e}")));
    }
    Ok((vec![s; dim], SolveTrace { method: SolveMethod::Bisection, iterations, brackets, residual }))
}

/// Critical point `x*` and value of `F` on the symmetric ray, for `θ > (N−1)/N`.
pub fn symmetric_f_min(theta: f64, dim: usize) -> Result<(f64, f64)> {
    let n = dim as f64;
    let edge = (n - 1.0) / n;
    if !(theta > edge) || !(theta < 1.0) {
        return Err(Error::ThetaOutOfRange(format!(
            "θ must lie in ({}/{dim},1) for the symmetric minimum, got θ = {theta}",
            dim - 1
        )));
    }
    let x = ((4.0 * theta - 2.0) / (theta - edge)).sqrt() / n;
    let value = 5.0 * n * n * theta - (3.0 * n * n - n) + 2.0 * n * n * ((4.0 * theta - 2.0) * (theta - edge)).sqrt();
    Ok((x, value))
}

/// Bounds `(lower, upper)` on the critical dimension `N*(θ)`.
pub fn critical_dimension_bounds(theta: f64) -> Result<(usize, usize)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ThetaOutOfRange(format!("θ must lie in (0,1), got θ = {theta}")));
    }
    let z = 1.0 / (1.0 - theta);
    // ceil with a relative guard against 1/(1 − 0.8) = 5.000000000000001
    let zr = z.round();
    let ceil = if (z - zr).abs() <= 1e-9 * z { zr } else { z.ceil() };
    let upper = ceil as usize - 1;
    let mut lower = if theta < 0.75 { 1 } else { 2 };
    // θ = (N+1)/(N+2)  ⇔  N = 1/(1−θ) − 2
    let cand = z - 2.0;
    if cand >= 1.0 - 1e-9 && (cand - cand.round()).abs() <= 1e-9 * z {
        lower = lower.max(cand.round() as usize);
    }
    Ok((lower, upper))
}

/// Named parameter choice for [`instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Unit constants (8.x), `α = 2` (9.1), identity `A` (9.1cor), symmetric α (10.x).
    Default,
    /// `α = (N−1)(N−2)` for 9.1.
    High,
    /// `φ(r) = r⁹`, `η(t) = 1/t` in ten dimensions at θ = 11/12.
    TwPaper,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Variant> {
        match s {
            "default" | "quadratic" => Ok(Variant::Default),
            "high" => Ok(Variant::High),
            "tw-paper" => Ok(Variant::TwPaper),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant '{other}' (expected default, quadratic, high, tw-paper)"
            ))),
        }
    }
}

/// A concrete solution of the equation at a fixed θ.
#[derive(Debug, Clone)]
pub struct Instance {
    pub theorem: Theorem,
    pub dim: usize,
    pub theta: f64,
    pub family: ConvexFamily,
    /// Solved or chosen parameters, for reports.
    pub params: Vec<f64>,
}

fn fixed_theta(theorem: Theorem, dim: usize, fixed: f64, given: Option<f64>) -> Result<f64> {
    if let Some(t) = given {
        ThetaRange::of(theorem, dim).check(t)?;
    }
    Ok(fixed)
}

fn required_theta(theorem: Theorem, theta: Option<f64>) -> Result<f64> {
    theta.ok_or_else(|| Error::InvalidParameter(format!("{} needs --theta", theorem.display_name())))
}

/// Builds the family of `theorem` in dimension `dim`.
pub fn instance(theorem: Theorem, dim: usize, theta: Option<f64>, variant: Variant) -> Result<Instance> {
    if variant != Variant::Default && theorem != Theorem::Thm91 {
        return Err(Error::InvalidParameter(format!("variant {variant:?} only applies to Theorem 9.1")));
    }
    let one = |theta: f64, family: ConvexFamily, params: Vec<f64>| Instance { theorem, dim, theta, family, params };
    Ok(match theorem {
        Theorem::Thm81 => {
            let t = required_theta(theorem, theta)?;
            one(t, make_thm81(dim, t, 1.0, 1.0, 1.0, 1.0)?, vec![2.0 - 1.0 / t])
        }
        Theorem::Thm82 => {
            let t = required_theta(theorem, theta)?;
            let n = (dim - 1) as f64;
            one(t, make_thm82(dim, t, 1.0, 1.0, 0.0, 0.0)?, vec![n + 2.0 - 1.0 / t])
        }
        Theorem::Thm91 => match variant {
            Variant::TwPaper => {
                if dim != 10 {
                    return Err(Error::InvalidParameter(format!(
                        "the tw-paper instance lives in N = 10, got N = {dim}"
                    )));
                }
                let t = fixed_theta(theorem, dim, 11.0 / 12.0, None)?;
                if let Some(g) = theta {
                    if (g - t).abs() > 1e-12 {
                        return Err(Error::ThetaOutOfRange(format!(
                            "θ must equal 11/12 for the tw-paper instance, got θ = {g}"
                        )));
                    }
                }
                let phi = ScalarCurve::expr(CurveExpr::monomial(1.0, 9.0), Interval::POSITIVE);
                let eta = ScalarCurve::expr(CurveExpr::monomial(1.0, -1.0), Interval::POSITIVE);
                one(t, ConvexFamily::trudinger_wang(9, phi, eta)?, vec![9.0])
            }
            _ => {
                let branch = if variant == Variant::High { ExpBranch::High } else { ExpBranch::Quadratic };
                let (family, t) = make_thm91(dim, branch)?;
                let t = fixed_theta(theorem, dim, t, theta)?;
                let alpha = match &family {
                    ConvexFamily::ExpPower { alpha, .. } => *alpha,
                    _ => unreachable!("make_thm91 builds the exp-power family"),
                };
                one(t, family, vec![alpha])
            }
        },
        Theorem::Cor91 => {
            let t = fixed_theta(theorem, dim, 0.5, theta)?;
            let n = dim - 1;
            if n < 2 {
                return Err(Error::InvalidParameter(format!("Corollary 9.1 needs N >= 3, got N = {dim}")));
            }
            one(t, make_cor91(n, DMatrix::identity(n - 1, n - 1), vec![0.0; n - 1], 0.0)?, vec![])
        }
        Theorem::Thm101 => {
            let t = required_theta(theorem, theta)?;
            let (alpha, _) = solve_alpha_halfspace(t, dim)?;
            one(t, ConvexFamily::product_halfspace(alpha.clone())?, alpha)
        }
        Theorem::Thm102 => {
            let t = required_theta(theorem, theta)?;
            let (alpha, _) = solve_alpha_full(t, dim)?;
            one(t, ConvexFamily::product_full(alpha.clone())?, alpha)
        }
    })
}

/// Random interior points of a family's natural domain, seeded.
pub fn sample_interior(family: &ConvexFamily, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = family.dim();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::EmptySample(format!("could not draw interior points for {}", family.tag())));
        }
        let x: Vec<f64> = match family {
            ConvexFamily::ProductHalfSpace { .. } => {
                (0..dim).map(|i| if i + 1 < dim { rng.gen_range(0.5..2.0) } else { rng.gen_range(-1.0..1.0) }).collect()
            }
            ConvexFamily::ProductFull { .. } => (0..dim).map(|_| rng.gen_range(0.5..2.0)).collect(),
            ConvexFamily::WarrenSeparable { .. } | ConvexFamily::TWSeparable { .. } => {
                (0..dim).map(|i| if i + 1 < dim { rng.gen_range(-1.0..1.0) } else { rng.gen_range(0.5..2.0) }).collect()
            }
            _ => (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        // keep away from the axis where exp-power and rotational families degenerate
        if matches!(family, ConvexFamily::ExpPower { .. } | ConvexFamily::TWSeparable { .. }) {
            let r: f64 = x[..dim - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
            if r < 0.1 {
                continue;
            }
        }
        if family.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}
