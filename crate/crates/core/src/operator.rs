//! The fourth-order operator `u^{ij} D_ij w`, `w = (det D²u)^{-θ}`, and the
//! closed-form reductions it collapses to on each family.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::surfaces::{ConvexFamily, ScalarCurve};

/// Residual of the operator at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub point: Vec<f64>,
    pub theta: f64,
    pub det: f64,
    pub w: f64,
    pub raw: f64,
    /// Largest summand magnitude in the expansion of `u^{ij} w_ij`.
    pub scale: f64,
    /// `raw / scale`, or 0 when every term vanishes.
    pub normalized: f64,
}

impl ResidualReport {
    pub fn csv_header(dim: usize) -> String {
        let mut cols: Vec<String> = (0..dim).map(|i| format!("x{}", i + 1)).collect();
        cols.extend(["theta", "det", "w", "raw", "scale", "normalized"].iter().map(|s| s.to_string()));
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols: Vec<String> = self.point.iter().map(|v| format!("{v:e}")).collect();
        for v in [self.theta, self.det, self.w, self.raw, self.scale, self.normalized] {
            cols.push(format!("{v:e}"));
        }
        cols.join(",")
    }
}

/// Determinant of a matrix of jets by Gaussian elimination with partial pivoting on values.
pub fn jet_determinant(mut m: Vec<Vec<Jet>>) -> Result<Jet> {
    let n = m.len();
    let mut det = Jet::constant(1.0, m[0][0].dim(), m[0][0].order());
    for k in 0..n {
        let p =
            (k..n).max_by(|&a, &b| m[a][k].value().abs().total_cmp(&m[b][k].value().abs())).expect("non-empty range");
        if m[p][k].value() == 0.0 {
            return Ok(Jet::constant(0.0, det.dim(), det.order()));
        }
        if p != k {
            m.swap(p, k);
            det = -&det;
        }
        det = &det * &m[k][k];
        let pivot_inv = m[k][k].recip()?;
        for i in k + 1..n {
            let f = &m[i][k] * &pivot_inv;
            for j in k + 1..n {
                let upd = &m[i][j] - &(&f * &m[k][j]);
                m[i][j] = upd;
            }
        }
    }
    Ok(det)
}

/// `(det D²u(x))^{-θ}`.
pub fn w_value(u: &ConvexFamily, theta: f64, x: &[f64]) -> Result<f64> {
    let det = u.hessian_det(x)?;
    if !(det > 0.0) {
        return Err(Error::DegenerateHessian { point: x.to_vec(), det });
    }
    Ok(det.powf(-theta))
}

/// Generic residual of `u^{ij} D_ij w` at `x`, from the order-4 jet of `u`.
pub fn residual(u: &ConvexFamily, theta: f64, x: &[f64]) -> Result<ResidualReport> {
    let jet = u.eval_jet(x)?;
    residual_from_jet(&jet, theta, x)
}

pub fn residual_from_jet(jet: &Jet, theta: f64, x: &[f64]) -> Result<ResidualReport> {
    let n = jet.dim();
    if jet.order() < 4 {
        return Err(Error::InvalidParameter("residual needs a jet of order 4".into()));
    }
    let first: Vec<Jet> = (0..n).map(|i| jet.differentiate(i)).collect::<Result<_>>()?;
    let mut hess: Vec<Vec<Jet>> = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            let e = if j < i { hess[j][i].clone() } else { first[i].differentiate(j)? };
            hess[i].push(e);
        }
    }
    let hv = DMatrix::from_fn(n, n, |i, j| hess[i][j].value());
    let chol =
        hv.clone().cholesky().ok_or_else(|| Error::DegenerateHessian { point: x.to_vec(), det: hv.determinant() })?;
    let det = jet_determinant(hess)?;
    if !(det.value() > 0.0) {
        return Err(Error::DegenerateHessian { point: x.to_vec(), det: det.value() });
    }
    let w = det.powf(-theta)?;
    let d2w = w.hessian();
    let inv = chol.inverse();
    // summands of u^{ij}(−θ w d_ij/d + θ(θ+1) w d_i d_j/d²), d = det D²u
    let (dv, dg, dh) = (det.value(), det.gradient(), det.hessian());
    let wv = w.value().abs();
    let mut raw = 0.0;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let term = inv[(i, j)] * d2w[(i, j)];
            raw += term;
            let first = theta * wv * dh[(i, j)].abs() / dv;
            let second = theta * (theta + 1.0) * wv * (dg[i] * dg[j]).abs() / (dv * dv);
            scale = scale.max(term.abs()).max(inv[(i, j)].abs() * first.max(second));
        }
    }
    let normalized = if scale > 0.0 { raw / scale } else { 0.0 };
    Ok(ResidualReport { point: x.to_vec(), theta, det: det.value(), w: w.value(), raw, scale, normalized })
}

/// Residual reports at every point, in input order.
pub fn residual_scan(u: &ConvexFamily, theta: f64, points: &[Vec<f64>]) -> Result<Vec<ResidualReport>> {
    points.par_iter().map(|x| residual(u, theta, x)).collect()
}

/// Largest `|normalized residual|` in a scan.
pub fn max_normalized(reports: &[ResidualReport]) -> f64 {
    reports.iter().fold(0.0, |m, r| m.max(r.normalized.abs()))
}

/// Coefficients of the quartic `Ar⁴ + Br² + C` the operator reduces to on `|y|²η(t) + φ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WarrenCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

struct WarrenData {
    eta: [f64; 2],
    p: [f64; 3],
    phi: [f64; 3],
}

fn warren_data(eta: &ScalarCurve, phi: &ScalarCurve, t: f64) -> Result<WarrenData> {
    let tj = Jet::variable(0, t, 1)?;
    let e = eta.eval_jet(&tj)?;
    if !(e.value() > 0.0) {
        return Err(Error::InvalidParameter(format!("η must be positive, got η({t}) = {}", e.value())));
    }
    let e1 = e.differentiate(0)?;
    let e2 = e1.differentiate(0)?;
    let p = &e2 - &(&e1 * &e1).try_div(&e)?.scale(2.0);
    let f = phi.derivatives(t)?;
    Ok(WarrenData {
        eta: [e.value(), e1.value()],
        p: [p.value(), p.derivative(&[0]), p.derivative(&[0, 0])],
        phi: [f[2], f[3], f[4]],
    })
}

pub fn warren_reduction(
    eta: &ScalarCurve,
    phi: &ScalarCurve,
    theta: f64,
    n: usize,
    t: f64,
) -> Result<WarrenCoefficients> {
    let d = warren_data(eta, phi, t)?;
    let (e, e1) = (d.eta[0], d.eta[1]);
    let e2 = d.p[0] + 2.0 * e1 * e1 / e;
    let [p, pp, ppp] = d.p;
    let [f2, f3, f4] = d.phi;
    let nf = n as f64;
    let th = theta;
    let q = e1 * e1 / e;
    let a = p * p * (4.0 * (th - nf + 1.0) * e2 + ((2.0 * nf * nf - 8.0 * nf) * th + (6.0 * nf - 4.0)) * q)
        + (4.0 * nf * th - 8.0 * th) * e1 * p * pp
        + 2.0 * (th + 1.0) * e * pp * pp
        - 2.0 * e * p * ppp;
    let b = f2
        * (4.0 * ((th - 2.0 * nf + 1.0) * e2 + (nf * nf * th - 2.0 * nf * th - 2.0 * th + 3.0 * nf - 3.0) * q) * p
            + 4.0 * (nf * th + 2.0) * e1 * pp
            - 2.0 * e * ppp)
        + f3 * (4.0 * (nf * th - 2.0 * th - 2.0) * e1 * p + 4.0 * (th + 1.0) * e * pp)
        + f4 * (-2.0 * e * p);
    let c = f2 * f2 * (-4.0 * nf * e2 + 2.0 * nf * (nf * th + 3.0) * q)
        + 4.0 * nf * th * e1 * f2 * f3
        + 2.0 * (th + 1.0) * e * f3 * f3
        - 2.0 * e * f2 * f4;
    Ok(WarrenCoefficients { a, b, c })
}

/// The generic residual predicted by the quartic:
/// `(Ar⁴ + Br² + C) · θ (2η)^{-nθ-1} ψ^{-θ-3}` with `ψ = r²(η'' − 2η'²/η) + φ''`.
pub fn warren_predicted_residual(
    eta: &ScalarCurve,
    phi: &ScalarCurve,
    theta: f64,
    n: usize,
    r: f64,
    t: f64,
) -> Result<f64> {
    let co = warren_reduction(eta, phi, theta, n, t)?;
    let d = warren_data(eta, phi, t)?;
    let psi = r * r * d.p[0] + d.phi[0];
    if !(psi > 0.0) {
        return Err(Error::DegenerateHessian { point: vec![r, t], det: psi });
    }
    let quartic = co.a * r.powi(4) + co.b * r * r + co.c;
    Ok(quartic * theta * (2.0 * d.eta[0]).powf(-(n as f64) * theta - 1.0) * psi.powf(-theta - 3.0))
}

/// `(B₁, B₂)` of `B₁r^{β−2} + B₂r^{α+β−2}` for `u = exp(|y|^α + t)`, `β = −nθ(α−2)`.
pub fn tw_exponential_condition(alpha: f64, theta: f64, n: usize) -> Result<(f64, f64)> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter(format!("α must exceed 1, got {alpha}")));
    }
    let nf = n as f64;
    let beta = -nf * theta * (alpha - 2.0);
    let b1 = beta * (beta - 1.0) + (nf - 1.0) * (alpha - 1.0) * beta;
    let b2 = -(nf + 1.0) * theta * alpha * (alpha + 2.0 * beta - 1.0)
        + 2.0 * (nf + 1.0) * theta * alpha * beta
        + alpha * (alpha - 1.0) * (nf + 1.0).powi(2) * theta * theta
        - (nf - 1.0) * (nf + 1.0) * alpha * (alpha - 1.0) * theta;
    Ok((b1, b2))
}

/// Generic residual implied by `(B₁, B₂)` at `|y| = r`, `t`.
pub fn tw_exponential_predicted_residual(alpha: f64, theta: f64, n: usize, r: f64, t: f64) -> Result<f64> {
    let (b1, b2) = tw_exponential_condition(alpha, theta, n)?;
    let nf = n as f64;
    let beta = -nf * theta * (alpha - 2.0);
    let s = r.powf(alpha) + t;
    // κ·det₂/E with E = e^s, κ = α^{nθ}(α−1)^θ e^{(n+1)θs}, det₂ = E²α(α−1)r^{α−2}
    let log_denominator = nf * theta * alpha.ln()
        + theta * (alpha - 1.0).ln()
        + (nf + 1.0) * theta * s
        + s
        + (alpha * (alpha - 1.0)).ln()
        + (alpha - 2.0) * r.ln();
    Ok((b1 * r.powf(beta - 2.0) + b2 * r.powf(alpha + beta - 2.0)) * (-log_denominator).exp())
}

fn check_alpha(alpha: &[f64]) -> Result<()> {
    if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidParameter("exponents α_i must be positive".into()));
    }
    Ok(())
}

/// Left-hand side of the algebraic condition for `Π y_i^{-α_i} e^t` (`n = N − 1` exponents).
pub fn product_halfspace_residual(alpha: &[f64], theta: f64, big_n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha.len() + 1 != big_n {
        return Err(Error::DimensionMismatch { expected: big_n - 1, got: alpha.len() });
    }
    let nf = big_n as f64;
    let mut lhs = 0.0;
    let mut sum_c = 0.0;
    for &a in alpha {
        let c = (nf * a + 2.0) * theta;
        lhs += c * (c - 1.0) / a;
        sum_c += nf * a + 2.0;
    }
    lhs -= 2.0 * nf * theta * theta * sum_c;
    lhs += nf * nf * theta * theta * (alpha.iter().sum::<f64>() + 1.0);
    Ok(lhs)
}

/// Left-hand side of the algebraic condition for `Π y_i^{-α_i}` (`N` exponents).
pub fn product_full_residual(alpha: &[f64], theta: f64, big_n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha.len() != big_n {
        return Err(Error::DimensionMismatch { expected: big_n, got: alpha.len() });
    }
    let nf = big_n as f64;
    let total: f64 = alpha.iter().sum();
    let c: Vec<f64> = alpha.iter().map(|a| (nf * a + 2.0) * theta).collect();
    let mut lhs = 0.0;
    for (j, &a) in alpha.iter().enumerate() {
        let beta_j = total - a + 1.0;
        lhs += beta_j * c[j] * (c[j] - 1.0) / a;
    }
    for j in 0..big_n {
        for k in j + 1..big_n {
            lhs -= 2.0 * c[j] * c[k];
        }
    }
    Ok(lhs)
}

/// Generic residual implied by the half-space condition: `w · L / u`.
pub fn product_halfspace_predicted_residual(alpha: &[f64], theta: f64, x: &[f64]) -> Result<f64> {
    let fam = ConvexFamily::product_halfspace(alpha.to_vec())?;
    let l = product_halfspace_residual(alpha, theta, x.len())?;
    Ok(w_value(&fam, theta, x)? * l / fam.value(x)?)
}

/// Generic residual implied by the orthant condition: `w · L / (β u)`, `β = Σα + 1`.
pub fn product_full_predicted_residual(alpha: &[f64], theta: f64, x: &[f64]) -> Result<f64> {
    let fam = ConvexFamily::product_full(alpha.to_vec())?;
    let l = product_full_residual(alpha, theta, x.len())?;
    let beta = alpha.iter().sum::<f64>() + 1.0;
    Ok(w_value(&fam, theta, x)? * l / (beta * fam.value(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{CurveExpr, Interval};
    use approx::assert_relative_eq;

    #[test]
    fn w_examples() {
        let q = ConvexFamily::quadratic(DMatrix::identity(2, 2), vec![0.0; 2], 0.0).unwrap();
        assert_relative_eq!(w_value(&q, 0.7, &[0.3, 0.1]).unwrap(), 1.0, epsilon = 1e-15);
        let e = ConvexFamily::exp_power(1, 2.0).unwrap();
        assert_relative_eq!(w_value(&e, 0.5, &[0.0, 0.0]).unwrap(), 0.5f64.sqrt(), epsilon = 1e-14);
        let p = ConvexFamily::product_full(vec![1.0; 3]).unwrap();
        assert_relative_eq!(w_value(&p, 0.6, &[1.0; 3]).unwrap(), 4f64.powf(-0.6), epsilon = 1e-13);
    }

    #[test]
    fn quadratic_residual_vanishes() {
        let q =
            ConvexFamily::quadratic(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]), vec![1.0, 0.0], 3.0).unwrap();
        let r = residual(&q, 0.4, &[1.0, -2.0]).unwrap();
        assert_eq!(r.normalized, 0.0);
    }

    #[test]
    fn trudinger_wang_instance() {
        let tw = ConvexFamily::trudinger_wang(9, ScalarCurve::power(1.0, 9.0), ScalarCurve::power(1.0, -1.0)).unwrap();
        let mut x = vec![0.0; 10];
        x[0] = 1.0;
        x[9] = 1.0;
        let r = residual(&tw, 11.0 / 12.0, &x).unwrap();
        assert!(r.normalized.abs() <= 1e-7, "{r:?}");
    }

    #[test]
    fn warren_constant_eta_examples() {
        let one = ScalarCurve::constant(1.0);
        let phi = ScalarCurve::power(1.0, -1.0);
        let co = warren_reduction(&one, &phi, 1.0 / 3.0, 1, 2.0).unwrap();
        assert_eq!(co.a, 0.0);
        assert_eq!(co.b, 0.0);
        assert!(co.c.abs() < 1e-12);
        let fam = ConvexFamily::warren(1, one, phi).unwrap();
        let r = residual(&fam, 1.0 / 3.0, &[1.0, 1.0]).unwrap();
        assert!(r.normalized.abs() <= 1e-8, "{r:?}");
    }

    #[test]
    fn warren_inverse_eta_zeroes_reduction() {
        let eta = ScalarCurve::power(1.0, -1.0);
        let phi = ScalarCurve::power(1.0, 1.0 + 2.0 - 5.0);
        let co = warren_reduction(&eta, &phi, 0.2, 1, 1.0).unwrap();
        assert!(co.a.abs() < 1e-10 && co.b.abs() < 1e-10 && co.c.abs() < 1e-10, "{co:?}");
    }

    #[test]
    fn warren_prediction_matches_generic() {
        let eta = ScalarCurve::expr(
            CurveExpr::sum(vec![CurveExpr::exp(CurveExpr::monomial(1.0 / 3.0, 1.0)), CurveExpr::monomial(0.2, 2.0)]),
            Interval::REAL_LINE,
        );
        let phi = ScalarCurve::expr(
            CurveExpr::sum(vec![CurveExpr::exp(CurveExpr::Var), CurveExpr::monomial(1.0, 4.0)]),
            Interval::REAL_LINE,
        );
        for n in 1..=3 {
            let fam = ConvexFamily::warren(n, eta.clone(), phi.clone()).unwrap();
            let mut x: Vec<f64> = (0..n).map(|k| 0.3 + 0.1 * k as f64).collect();
            x.push(0.7);
            let r = residual(&fam, 0.3, &x).unwrap();
            let rad = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            let pred = warren_predicted_residual(&eta, &phi, 0.3, n, rad, 0.7).unwrap();
            assert!((r.raw - pred).abs() <= 1e-9 * r.scale, "n={n}: {} vs {pred}", r.raw);
        }
    }

    #[test]
    fn tw_condition_examples() {
        let (b1, b2) = tw_exponential_condition(2.0, 2.0 / 3.0, 2).unwrap();
        assert!(b1.abs() < 1e-14 && b2.abs() < 1e-14);
        let (b1, b2) = tw_exponential_condition(6.0, 0.75, 3).unwrap();
        assert!(b1.abs() < 1e-12 && b2.abs() < 1e-12);
        let (b1, b2) = tw_exponential_condition(2.0, 0.5, 2).unwrap();
        assert_eq!(b1, 0.0);
        assert_relative_eq!(b2, -1.5, epsilon = 1e-14);
        assert!(tw_exponential_condition(1.0, 0.5, 2).is_err());
    }

    #[test]
    fn product_condition_examples() {
        assert!(product_halfspace_residual(&[4.0 / 3.0; 2], 0.6, 3).unwrap().abs() < 1e-12);
        assert!(product_halfspace_residual(&[1.0, 1.0], 0.9, 3).unwrap() > 0.0);
        assert!(product_full_residual(&[1.0; 3], 0.6, 3).unwrap().abs() < 1e-12);
        assert!(product_full_residual(&[1.0; 3], 0.5, 3).unwrap().abs() > 1e-3);
        assert!(product_full_residual(&[1.0, -1.0, 1.0], 0.5, 3).is_err());
    }
}
