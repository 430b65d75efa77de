//! Refinement-trend probes for the sharpness counterexamples: the radial power
//! `|x|^β − 1` (finite mass, gradient not `C^α` for `β < 1 + α`) and the slab family
//! (finite mass, `u` not `C^α` near `x₁ = 0`).

use serde::Serialize;

use super::slab::SlabCounterexample;
use super::{holder_seminorm, Sampler};
use crate::error::{Error, Result};
use crate::mameasure::{ma_mass, mass_refinement};
use crate::surfaces::{ConvexFamily, Domain};

/// One refinement level of a seminorm or mass sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub level: usize,
    /// Smallest scale reached (sample contraction factor, cutoff, or quadrature size).
    pub scale: f64,
    pub points: usize,
    pub value: f64,
}

/// `true` if every value exceeds its predecessor by more than `rel` relative.
pub fn strictly_increasing(rows: &[TrendRow], rel: f64) -> bool {
    rows.windows(2).all(|w| w[1].value > w[0].value * (1.0 + rel))
}

/// Relative change between the last two values.
pub fn last_change(rows: &[TrendRow]) -> f64 {
    match rows {
        [.., a, b] => (b.value - a.value).abs() / b.value.abs().max(f64::MIN_POSITIVE),
        _ => f64::INFINITY,
    }
}

/// Seminorm of `f` on `base` plus contracted copies toward `focus`; level `k` includes the
/// copies scaled by `ratio, …, ratio^k`. Copies leaving the admissible set are dropped.
pub fn holder_trend<F, C>(
    f: &F,
    base: &[Vec<f64>],
    focus: &[f64],
    ratio: f64,
    levels: usize,
    alpha: f64,
    admissible: &C,
) -> Result<Vec<TrendRow>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    C: Fn(&[f64]) -> bool,
{
    let mut pts: Vec<Vec<f64>> = base.iter().filter(|p| admissible(p)).cloned().collect();
    let mut rows = Vec::with_capacity(levels + 1);
    let mut scale = 1.0;
    for level in 0..=levels {
        if level > 0 {
            scale *= ratio;
            pts.extend(
                base.iter()
                    .map(|p| focus.iter().zip(p).map(|(c, v)| c + scale * (v - c)).collect::<Vec<f64>>())
                    .filter(|p| admissible(p)),
            );
        }
        let h = holder_seminorm(f, &pts, alpha)?;
        rows.push(TrendRow { level, scale, points: pts.len(), value: h.value });
    }
    Ok(rows)
}

/// Mass sequence and gradient seminorm trend for `|x|^β − 1` on the unit ball.
#[derive(Debug, Clone, Serialize)]
pub struct PowerTrend {
    pub dim: usize,
    pub beta: f64,
    pub alpha: f64,
    pub mass: Vec<TrendRow>,
    /// Closed-form mass `β^N |S^{N−1}| / N`.
    pub mass_exact: f64,
    pub holder: Vec<TrendRow>,
}

pub fn power_trend(dim: usize, beta: f64, alpha: f64, levels: usize) -> Result<PowerTrend> {
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::InvalidParameter(format!("β must lie in (1,2), got {beta}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("α must lie in (0,1), got {alpha}")));
    }
    let u = ConvexFamily::power_radial(dim, beta)?;
    let ball = Domain::unit_ball(dim);
    let mass = [8usize, 16, 32, 64]
        .iter()
        .enumerate()
        .map(|(level, &res)| {
            Ok(TrendRow { level, scale: res as f64, points: res, value: ma_mass(&u, &ball, res)?.value })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = dim as f64;
    let mass_exact = beta.powi(dim as i32) * crate::quad::sphere_area(dim) / n;
    // the gradient is not differentiable at the origin, so the lattice center is left out
    let base: Vec<Vec<f64>> = Sampler::uniform(32, 8).sample(&ball)?.into_iter().skip(1).collect();
    let origin = vec![0.0; dim];
    let holder = holder_trend(
        &|x: &[f64]| u.gradient(x),
        &base,
        &origin,
        0.25,
        levels.saturating_sub(1),
        alpha,
        &|x: &[f64]| x.iter().any(|v| *v != 0.0),
    )?;
    Ok(PowerTrend { dim, beta, alpha, mass, mass_exact, holder })
}

/// Seminorm trend of `u` at one exponent.
#[derive(Debug, Clone, Serialize)]
pub struct HolderTrend {
    pub alpha: f64,
    pub rows: Vec<TrendRow>,
}

/// Mass and seminorm trends for the slab counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct SlabTrend {
    /// Mass over `{x₁ > cutoff}` for shrinking cutoffs.
    pub mass: Vec<TrendRow>,
    /// Seminorm of `u` as samples accumulate toward the origin, per exponent.
    pub holder: Vec<HolderTrend>,
}

pub fn slab_trend(slab: &SlabCounterexample, alphas: &[f64], levels: usize, seed: u64) -> Result<SlabTrend> {
    let u = slab.family();
    let omega = slab.domain();
    let cutoffs = [1e-2, 1e-4, 1e-6, 1e-8];
    let mass = mass_refinement(&u, &omega, &cutoffs, 64)?
        .into_iter()
        .zip(cutoffs)
        .enumerate()
        .map(|(level, (m, c))| TrendRow { level, scale: c, points: 64, value: m.value })
        .collect();
    let base = slab.sample_points(400, seed)?;
    let origin = vec![0.0; slab.dim];
    let holder = alphas
        .iter()
        .map(|&alpha| {
            let rows = holder_trend(
                &|x: &[f64]| Ok(vec![u.value(x)?]),
                &base,
                &origin,
                0.25,
                levels.saturating_sub(1),
                alpha,
                &|x: &[f64]| omega.contains(x) && u.contains(x),
            )?;
            Ok(HolderTrend { alpha, rows })
        })
        .collect::<Result<_>>()?;
    Ok(SlabTrend { mass, holder })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_gradient_quotient_grows() {
        let t = power_trend(2, 1.1, 0.3, 4).unwrap();
        assert!(strictly_increasing(&t.holder, 1e-3), "{:?}", t.holder);
        assert!((t.mass.last().unwrap().value / t.mass_exact - 1.0).abs() < 1e-2, "{:?} vs {}", t.mass, t.mass_exact);
    }
}
