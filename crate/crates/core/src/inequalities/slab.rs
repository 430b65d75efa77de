//! The slab counterexample `u = ζ(x₁)|x'|² − η(x₁)` and its ODE-built profiles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_ORDER};
use crate::ode::{integrate_with_event, OdeOptions, Trajectory};
use crate::surfaces::domain::Profile;
use crate::surfaces::{ConvexFamily, CurveBackend, Domain, Interval, ScalarCurve};

/// Upper end `(√2 − 1)/2` of the admissible γ interval.
pub fn gamma_max() -> f64 {
    (2f64.sqrt() - 1.0) / 2.0
}

/// Roots `λ₁ < λ₂` of `λ² − λ + γ(γ+1) = 0`.
pub fn lambda_roots(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma < gamma_max()) {
        return Err(Error::InvalidParameter(format!(
            "γ must lie in (0,(√2−1)/2) ≈ (0,{:.5}), got {gamma}",
            gamma_max()
        )));
    }
    let disc = 1.0 - 4.0 * gamma * (gamma + 1.0);
    let s = disc.sqrt();
    // λ₁λ₂ = γ(γ+1) avoids cancellation in the small root
    let l2 = (1.0 + s) / 2.0;
    Ok((gamma * (gamma + 1.0) / l2, l2))
}

/// Pinch value `ζ''/ζ − 2ζ'²/ζ²` of `x^γ`.
fn power_pinch(gamma: f64, x: f64) -> f64 {
    -gamma * (gamma + 1.0) / (x * x)
}

/// Admissible σ₀ interval: pinch at σ₀ in `[−3/4, −1/2)`.
pub fn sigma0_bracket(gamma: f64) -> (f64, f64) {
    let g = gamma * (gamma + 1.0);
    ((4.0 * g / 3.0).sqrt(), (2.0 * g).sqrt())
}

/// σ₀ placing the pinch at −5/8, the middle of the admissible bracket.
pub fn default_sigma0(gamma: f64) -> f64 {
    (gamma * (gamma + 1.0) * 8.0 / 5.0).sqrt()
}

/// Degree-9 smoothstep: 0 → 1 on [0, 1] with four vanishing derivatives at both ends.
fn smoothstep(tau: &Jet) -> Jet {
    let v = tau.value();
    if v <= 0.0 {
        return Jet::constant(0.0, tau.dim(), tau.order());
    }
    if v >= 1.0 {
        return Jet::constant(1.0, tau.dim(), tau.order());
    }
    // 126τ⁵ − 420τ⁶ + 540τ⁷ − 315τ⁸ + 70τ⁹
    let coeffs = [70.0, -315.0, 540.0, -420.0, 126.0];
    let mut acc = Jet::constant(0.0, tau.dim(), tau.order());
    for c in coeffs {
        acc = (&acc * tau).add_scalar(c);
    }
    let t5 = tau.powi(5).expect("integer power");
    &acc * &t5
}

/// Prescribed pinch and forcing on `x₁ ≥ σ₀`, blended smoothly away from the power-law values.
#[derive(Debug, Clone, Copy)]
struct Blend {
    gamma: f64,
    sigma0: f64,
    ramp: f64,
}

impl Blend {
    fn new(gamma: f64, sigma0: f64) -> Blend {
        let ramp = (2.0 * (gamma * (gamma + 1.0)).sqrt() - sigma0) / 2.0;
        Blend { gamma, sigma0, ramp }
    }

    fn weight(&self, x: &Jet) -> Jet {
        smoothstep(&x.add_scalar(-self.sigma0).scale(1.0 / self.ramp))
    }

    /// Target pinch: `−γ(γ+1)/x²` ramping to the constant −1/2.
    fn pinch(&self, x: &Jet) -> Result<Jet> {
        let s = self.weight(x);
        let base = x.powi(-2)?.scale(-self.gamma * (self.gamma + 1.0));
        let one_minus = s.scale(-1.0).add_scalar(1.0);
        Ok(&(&one_minus * &base) + &s.scale(-0.5))
    }

    /// Forcing `c·x^{λ−2}` ramping to the constant `c·σ₀^{λ−2}`.
    fn forcing(&self, x: &Jet, c: f64, lambda: f64) -> Result<Jet> {
        let s = self.weight(x);
        let base = x.powf(lambda - 2.0)?.scale(c);
        let one_minus = s.scale(-1.0).add_scalar(1.0);
        Ok(&(&one_minus * &base) + &s.scale(c * self.sigma0.powf(lambda - 2.0)))
    }
}

fn taylor_jet(coeffs: &[f64]) -> Result<Jet> {
    Jet::from_coeffs(1, MAX_ORDER, coeffs[..=MAX_ORDER].to_vec())
}

fn derivs_of(j: &Jet) -> [f64; MAX_ORDER + 1] {
    let mut out = [0.0; MAX_ORDER + 1];
    for (k, o) in out.iter_mut().enumerate() {
        *o = j.derivative(&vec![0; k]);
    }
    out
}

fn ode_options() -> OdeOptions {
    OdeOptions { rtol: 1e-13, atol: 1e-15, h_init: 1e-4, h_max: 1e-2, max_steps: 2_000_000 }
}

/// ζ: `x^γ` up to σ₀, then `exp(∫ψ)` with `ψ' = p + ψ²` for the blended pinch `p`.
pub struct ZetaBackend {
    gamma: f64,
    sigma0: f64,
    end: f64,
    blend: Blend,
    traj: Trajectory,
}

impl fmt::Debug for ZetaBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZetaBackend(γ={}, σ₀={}, end={})", self.gamma, self.sigma0, self.end)
    }
}

impl ZetaBackend {
    fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
        move |x, y, dy| {
            let p = self.blend.pinch(&Jet::constant(x, 1, 0))?.value();
            dy[0] = p + y[0] * y[0];
            dy[1] = y[0];
            Ok(())
        }
    }
}

impl CurveBackend for ZetaBackend {
    fn domain(&self) -> Interval {
        Interval::new(0.0, self.end)
    }

    fn derivatives(&self, x: f64) -> Result<[f64; MAX_ORDER + 1]> {
        let xj = Jet::variable(0, x, 1)?;
        if x <= self.sigma0 {
            return Ok(derivs_of(&xj.powf(self.gamma)?));
        }
        let st = self.traj.state_at(&self.rhs(), x, &ode_options())?;
        let p = self.blend.pinch(&xj)?;
        let pc = p.coeffs();
        // Taylor coefficients of ψ from (k+1)ψ_{k+1} = p_k + Σ ψ_i ψ_{k−i}
        let mut psi = [0.0; MAX_ORDER];
        psi[0] = st[0];
        for k in 0..MAX_ORDER - 1 {
            let conv: f64 = (0..=k).map(|i| psi[i] * psi[k - i]).sum();
            psi[k + 1] = (pc[k] + conv) / (k + 1) as f64;
        }
        let mut log = [0.0; MAX_ORDER + 1];
        log[0] = st[1];
        for k in 0..MAX_ORDER {
            log[k + 1] = psi[k] / (k + 1) as f64;
        }
        Ok(derivs_of(&taylor_jet(&log)?.exp()))
    }
}

/// Builds ζ and verifies the pinch bracket `[−1, −1/4)` on `[σ₀, σ₀ + 5]`.
pub fn build_zeta(gamma: f64, sigma0: f64) -> Result<ScalarCurve> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("γ must lie in (0,1), got {gamma}")));
    }
    let pinch = power_pinch(gamma, sigma0);
    if !(-0.75..-0.5).contains(&pinch) {
        let (lo, hi) = sigma0_bracket(gamma);
        return Err(Error::InvalidParameter(format!(
            "σ₀ = {sigma0} puts the pinch at {pinch:.6}, outside [−3/4,−1/2); need σ₀ ∈ [{lo:.6}, {hi:.6})"
        )));
    }
    let end = sigma0 + 4.0 * PI + 1.0;
    let mut backend = ZetaBackend { gamma, sigma0, end, blend: Blend::new(gamma, sigma0), traj: Trajectory::default() };
    let y0 = [gamma / sigma0, gamma * sigma0.ln()];
    let (traj, _) =
        integrate_with_event::<_, fn(f64, &[f64]) -> f64>(&backend.rhs(), sigma0, &y0, end, &ode_options(), None)?;
    backend.traj = traj;
    let zeta = ScalarCurve::Backed(Arc::new(backend));
    for k in 0..=1000 {
        let x = sigma0 + 5.0 * k as f64 / 1000.0;
        let p = pinch_of(&zeta, x)?;
        if !(-1.0..-0.25).contains(&p) {
            return Err(Error::Construction(format!("pinch {p} leaves [−1,−1/4) at x₁ = {x}")));
        }
    }
    Ok(zeta)
}

/// `ζ''/ζ − 2ζ'²/ζ²` evaluated from the curve's derivatives.
pub fn pinch_of(zeta: &ScalarCurve, x: f64) -> Result<f64> {
    let d = zeta.derivatives(x)?;
    Ok(d[2] / d[0] - 2.0 * (d[1] / d[0]).powi(2))
}

/// Pinch as an order-2 jet in `x₁`.
fn pinch_jet(zeta: &ScalarCurve, x: f64) -> Result<Jet> {
    let z = Jet::variable(0, x, 1)?.compose(&zeta.derivatives(x)?);
    let z1 = z.differentiate(0)?;
    let z2 = z1.differentiate(0)?;
    let ratio = z1.try_div(&z)?;
    Ok(&z2.try_div(&z)? - &(&ratio * &ratio).scale(2.0))
}

/// η: `x^λ` up to σ₀, then the solution of `η'' − pinch·η = g₂`.
pub struct EtaBackend {
    gamma: f64,
    lambda: f64,
    sigma0: f64,
    omega: f64,
    coef: f64,
    blend: Blend,
    zeta: ScalarCurve,
    traj: Trajectory,
}

impl fmt::Debug for EtaBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EtaBackend(γ={}, λ={}, σ₀={}, ω={})", self.gamma, self.lambda, self.sigma0, self.omega)
    }
}

impl EtaBackend {
    fn forcing(&self, x: &Jet) -> Result<Jet> {
        self.blend.forcing(x, self.coef, self.lambda)
    }

    fn rhs(&self) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
        move |x, y, dy| {
            let p = pinch_of(&self.zeta, x)?;
            let g = self.forcing(&Jet::constant(x, 1, 0))?.value();
            dy[0] = y[1];
            dy[1] = p * y[0] + g;
            Ok(())
        }
    }

    /// `g₂(x₁)`, the forcing of the η equation.
    pub fn g2(&self, x: f64) -> Result<f64> {
        if x <= self.sigma0 {
            return Ok(self.coef * x.powf(self.lambda - 2.0));
        }
        Ok(self.forcing(&Jet::constant(x, 1, 0))?.value())
    }
}

impl CurveBackend for EtaBackend {
    fn domain(&self) -> Interval {
        Interval::new(0.0, self.omega)
    }

    fn derivatives(&self, x: f64) -> Result<[f64; MAX_ORDER + 1]> {
        let xj = Jet::variable(0, x, 1)?;
        if x <= self.sigma0 {
            return Ok(derivs_of(&xj.powf(self.lambda)?));
        }
        let st = self.traj.state_at(&self.rhs(), x, &ode_options())?;
        let p = pinch_jet(&self.zeta, x)?;
        let g = self.forcing(&xj)?;
        let (pc, gc) = (p.coeffs(), g.coeffs());
        // (k+2)(k+1) e_{k+2} = Σ p_i e_{k−i} + g_k
        let mut e = [0.0; MAX_ORDER + 1];
        e[0] = st[0];
        e[1] = st[1];
        for k in 0..=MAX_ORDER - 2 {
            let conv: f64 = (0..=k).map(|i| pc[i] * e[k - i]).sum();
            e[k + 2] = (conv + gc[k]) / ((k + 2) * (k + 1)) as f64;
        }
        Ok(derivs_of(&taylor_jet(&e)?))
    }
}

/// Result of [`build_eta`].
pub struct EtaSolution {
    pub eta: ScalarCurve,
    pub omega: f64,
    pub backend: Arc<EtaBackend>,
}

/// Integrates η from σ₀ until its first zero ω, which must occur by `σ₀ + 4π`.
pub fn build_eta(gamma: f64, lambda: f64, zeta: &ScalarCurve, sigma0: f64) -> Result<EtaSolution> {
    let (l1, l2) = lambda_roots(gamma)?;
    if !(lambda > l1 && lambda < l2) {
        return Err(Error::InvalidParameter(format!("λ must lie in (λ₁,λ₂) = ({l1:.6},{l2:.6}), got {lambda}")));
    }
    let coef = lambda * (lambda - 1.0) + gamma * (gamma + 1.0);
    let window = sigma0 + 4.0 * PI;
    let mut backend = EtaBackend {
        gamma,
        lambda,
        sigma0,
        omega: window,
        coef,
        blend: Blend::new(gamma, sigma0),
        zeta: zeta.clone(),
        traj: Trajectory::default(),
    };
    let y0 = [sigma0.powf(lambda), lambda * sigma0.powf(lambda - 1.0)];
    let event = |_x: f64, y: &[f64]| y[0];
    let (traj, hit) = integrate_with_event(&backend.rhs(), sigma0, &y0, window, &ode_options(), Some(&event))?;
    let (omega, _) = hit.ok_or_else(|| {
        Error::Construction(format!("η has no zero in (σ₀, σ₀+4π] = ({sigma0}, {window}]; Sturm bound violated"))
    })?;
    backend.omega = omega;
    backend.traj = traj;
    let backend = Arc::new(backend);
    let eta = ScalarCurve::Backed(backend.clone());
    Ok(EtaSolution { eta, omega, backend })
}

/// The assembled counterexample on `Ω = {x₁ > 0, ζ(x₁)|x'|² < η(x₁)}`.
#[derive(Clone)]
pub struct SlabCounterexample {
    pub dim: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub sigma0: f64,
    pub omega: f64,
    pub zeta: ScalarCurve,
    pub eta: ScalarCurve,
    eta_backend: Arc<EtaBackend>,
}

impl fmt::Debug for SlabCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SlabCounterexample(N={}, γ={}, λ={}, σ₀={}, ω={})",
            self.dim, self.gamma, self.lambda, self.sigma0, self.omega
        )
    }
}

/// Pointwise verification summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabChecks {
    pub min_eigenvalue: f64,
    pub min_convexity_margin: f64,
    pub max_ode_residual: f64,
    pub max_concavity_excess: f64,
    pub points: usize,
}

impl SlabCounterexample {
    /// Builds the profiles for any admissible `(γ, λ, σ₀)`; no dimension restriction.
    pub fn build(dim: usize, gamma: f64, lambda: f64, sigma0: f64) -> Result<SlabCounterexample> {
        if !(2..=crate::jets::MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParameter(format!("slab needs 2 <= N <= {}", crate::jets::MAX_DIM)));
        }
        lambda_roots(gamma)?;
        if !(lambda > gamma) {
            return Err(Error::InvalidParameter("slab needs λ > γ".into()));
        }
        let zeta = build_zeta(gamma, sigma0)?;
        let sol = build_eta(gamma, lambda, &zeta, sigma0)?;
        Ok(SlabCounterexample {
            dim,
            gamma,
            lambda,
            sigma0,
            omega: sol.omega,
            zeta,
            eta: sol.eta,
            eta_backend: sol.backend,
        })
    }

    pub fn family(&self) -> ConvexFamily {
        ConvexFamily::SlabSeparable { dim: self.dim, zeta: self.zeta.clone(), eta: self.eta.clone() }
    }

    /// Cross-section radius `√(η/ζ)` of Ω at `x₁`.
    pub fn profile(&self, x1: f64) -> Result<f64> {
        if !(x1 > 0.0 && x1 < self.omega) {
            return Ok(0.0);
        }
        Ok((self.eta.value(x1)?.max(0.0) / self.zeta.value(x1)?).sqrt())
    }

    pub fn domain(&self) -> Domain {
        let me = self.clone();
        let profile: Profile = Arc::new(move |x1| me.profile(x1));
        Domain::Revolution { dim: self.dim, length: self.omega, profile }
    }

    pub fn g2(&self, x1: f64) -> Result<f64> {
        self.eta_backend.g2(x1)
    }

    /// `det D²u` on `(0, σ₀]` from the power-law profiles.
    pub fn power_region_det(&self, x1: f64, rp2: f64) -> f64 {
        let n = (self.dim - 1) as f64;
        let big = self.dim as f64;
        let (g, l) = (self.gamma, self.lambda);
        -(2f64.powf(n)) * g * (g + 1.0) * x1.powf(big * g - 2.0) * rp2
            - 2f64.powf(n) * l * (l - 1.0) * x1.powf(n * g + l - 2.0)
    }

    /// Largest relative gap between the jet determinant and [`Self::power_region_det`]
    /// over sample points with `x₁ <= σ₀`.
    pub fn power_region_det_error(&self, count: usize, seed: u64) -> Result<f64> {
        let fam = self.family();
        let pts: Vec<Vec<f64>> =
            self.sample_points(4 * count, seed)?.into_iter().filter(|p| p[0] <= self.sigma0).take(count).collect();
        if pts.is_empty() {
            return Err(Error::EmptySample("no sample points in the power region".into()));
        }
        let errs: Vec<f64> = pts
            .par_iter()
            .map(|p| {
                let rp2: f64 = p[1..].iter().map(|v| v * v).sum();
                let exact = self.power_region_det(p[0], rp2);
                Ok((fam.hessian_det(p)? - exact).abs() / exact.abs().max(1e-300))
            })
            .collect::<Result<_>>()?;
        Ok(errs.into_iter().fold(0.0, f64::max))
    }

    /// Random interior points, with `x₁` biased toward 0 (log-uniform on half the samples).
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::with_capacity(count);
        let n = self.dim - 1;
        while pts.len() < count {
            let x1 = if pts.len() % 2 == 0 {
                self.omega * rng.gen_range(1e-6f64..0.999_999)
            } else {
                (rng.gen_range((1e-6f64).ln()..self.omega.ln())).exp()
            };
            let rho = self.profile(x1)?;
            let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(1e-12..=1.0).contains(&norm) {
                continue;
            }
            let scale = rho * rng.gen_range(0.0..0.999_999f64);
            d.iter_mut().for_each(|v| *v *= scale / norm);
            let mut p = vec![x1];
            p.extend(d);
            pts.push(p);
        }
        Ok(pts)
    }

    /// Minimum Hessian eigenvalue and the profile conditions on a verification sample.
    pub fn verify(&self, count: usize, seed: u64) -> Result<SlabChecks> {
        let fam = self.family();
        let pts = self.sample_points(count, seed)?;
        let eigs: Vec<f64> = pts
            .par_iter()
            .map(|p| {
                let h = fam.hessian(p)?;
                let scale = h.amax();
                Ok(SymmetricEigen::new(h).eigenvalues.min() / scale.max(1e-300))
            })
            .collect::<Result<_>>()?;
        let min_eigenvalue = eigs.into_iter().fold(f64::INFINITY, f64::min);

        let m = 2000;
        let mut min_margin = f64::INFINITY;
        let mut max_res = 0.0f64;
        let mut max_excess = f64::NEG_INFINITY;
        let e0 = self.eta.derivatives(self.sigma0)?;
        let h = 1e-4;
        for k in 1..m {
            let x = self.omega * k as f64 / m as f64;
            let z = self.zeta.derivatives(x)?;
            let e = self.eta.derivatives(x)?;
            let pinch = z[2] / z[0] - 2.0 * (z[1] / z[0]).powi(2);
            // third line of the convexity system: pinch·η − η'' >= 0, relative to |η''|
            min_margin = min_margin.min((pinch * e[0] - e[2]) / e[2].abs().max(e[0].abs()).max(1e-300));
            if x > self.sigma0 && x - 2.0 * h > self.sigma0 && x + 2.0 * h < self.omega {
                // central difference of the integrated slope, independent of the recurrence for η''
                let d = |s: f64| Ok::<f64, Error>(self.eta.derivatives(s)?[1]);
                let d2 = (d(x - 2.0 * h)? - 8.0 * d(x - h)? + 8.0 * d(x + h)? - d(x + 2.0 * h)?) / (12.0 * h);
                let g = self.g2(x)?;
                let res = (d2 - pinch * e[0] - g).abs() / g.abs().max(e[0].abs());
                max_res = max_res.max(res);
            }
            if x >= self.sigma0 {
                let line = e0[0] + e0[1] * (x - self.sigma0);
                max_excess = max_excess.max(e[0] - line);
            }
        }
        Ok(SlabChecks {
            min_eigenvalue,
            min_convexity_margin: min_margin,
            max_ode_residual: max_res,
            max_concavity_excess: max_excess,
            points: count,
        })
    }
}

/// Builds the sharpness counterexample; requires `N >= 5`, `γ ∈ (1/N, (√2−1)/2)` and
/// `λ ∈ (λ₁, λ₂)`, and checks convexity on a random sample.
pub fn assemble_slab(dim: usize, gamma: f64, lambda: f64) -> Result<SlabCounterexample> {
    if dim < 5 {
        return Err(Error::InvalidParameter(format!("the slab counterexample needs N >= 5, got N = {dim}")));
    }
    if !(gamma > 1.0 / dim as f64) {
        return Err(Error::InvalidParameter(format!("γ must exceed 1/N = {}, got {gamma}", 1.0 / dim as f64)));
    }
    let slab = SlabCounterexample::build(dim, gamma, lambda, default_sigma0(gamma))?;
    let checks = slab.verify(2000, 17)?;
    if checks.min_eigenvalue < -1e-10 || checks.min_convexity_margin < -1e-10 {
        return Err(Error::ConvexityViolation(format!(
            "slab Hessian eigenvalue {:e}, profile margin {:e}",
            checks.min_eigenvalue, checks.min_convexity_margin
        )));
    }
    Ok(slab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lambda_root_examples() {
        let (a, b) = lambda_roots(0.2).unwrap();
        assert_relative_eq!(a, 0.4, epsilon = 1e-14);
        assert_relative_eq!(b, 0.6, epsilon = 1e-14);
        let (a, b) = lambda_roots(0.1).unwrap();
        assert_relative_eq!(a, (1.0 - 0.56f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(b, (1.0 + 0.56f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert!(lambda_roots(0.21).is_err());
    }

    #[test]
    fn zeta_bracket() {
        assert!(build_zeta(0.2, 10.0).is_err());
        let z = build_zeta(0.2, 0.6).unwrap();
        assert_relative_eq!(pinch_of(&z, 0.6).unwrap(), -2.0 / 3.0, epsilon = 1e-12);
        // smooth across σ₀
        let a = z.derivatives(0.6 - 1e-9).unwrap();
        let b = z.derivatives(0.6 + 1e-9).unwrap();
        for k in 0..=4 {
            assert!((a[k] - b[k]).abs() < 1e-6 * a[k].abs().max(1.0), "k={k}: {} vs {}", a[k], b[k]);
        }
    }

    #[test]
    fn eta_has_transversal_zero() {
        let z = build_zeta(0.2, 0.6).unwrap();
        let sol = build_eta(0.2, 0.5, &z, 0.6).unwrap();
        assert!(sol.omega > 0.6 && sol.omega <= 0.6 + 4.0 * PI);
        let d = sol.eta.derivatives(sol.omega * (1.0 - 1e-12)).unwrap();
        assert!(d[1] < 0.0);
    }
}
