//! Adaptive Dormand–Prince 5(4) integration with sign-change event location.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-14, h_init: 1e-3, h_max: 0.05, max_steps: 200_000 }
    }
}

/// Accepted step nodes of an integration run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

/// One Dormand–Prince step; returns the 5th-order state and the error vector.
fn dp_step<F>(f: &F, t: f64, y: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    f(t, y, &mut k1)?;
    f(t + C2 * h, &combine(y, h, &[(A21, &k1)]), &mut k2)?;
    f(t + C3 * h, &combine(y, h, &[(A31, &k1), (A32, &k2)]), &mut k3)?;
    f(t + C4 * h, &combine(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), &mut k4)?;
    f(t + C5 * h, &combine(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), &mut k5)?;
    f(t + h, &combine(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]), &mut k6)?;
    let y_new = combine(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    f(t + h, &y_new, &mut k7)?;
    let err =
        (0..n).map(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])).collect();
    Ok((y_new, err))
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, stopping early (and
/// locating the crossing to ~1e-14) when `event` changes sign.
///
/// Returns the trajectory and the event point, if one was found.
pub fn integrate_with_event<F, E>(
    f: &F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    event: Option<&E>,
) -> Result<(Trajectory, Option<(f64, Vec<f64>)>)>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
    E: Fn(f64, &[f64]) -> f64,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory { ts: vec![t0], ys: vec![y0.to_vec()] };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs()).max(1e-300) * dir;
    let mut g_prev = event.map(|e| e(t, &y));
    for _ in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok((traj, None));
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let (y_new, err) = dp_step(f, t, &y, h)?;
        let norm = err
            .iter()
            .zip(y.iter().zip(&y_new))
            .map(|(e, (a, b))| {
                let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / y.len() as f64;
        let norm = norm.sqrt();
        if !norm.is_finite() {
            h *= 0.25;
            if h.abs() < 1e-14 * t.abs().max(1.0) && (t_end - t).abs() > h.abs() {
                return Err(Error::Ode(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        if norm <= 1.0 {
            let t_new = t + h;
            if let (Some(e), Some(gp)) = (event, g_prev) {
                let g_new = e(t_new, &y_new);
                if gp != 0.0 && g_new.signum() != gp.signum() {
                    let (te, ye) = locate(f, e, t, &y, t_new, opts)?;
                    traj.ts.push(te);
                    traj.ys.push(ye.clone());
                    return Ok((traj, Some((te, ye))));
                }
                g_prev = Some(g_new);
            }
            t = t_new;
            y = y_new;
            traj.ts.push(t);
            traj.ys.push(y.clone());
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).abs().min(opts.h_max) * dir;
        if h.abs() < 1e-14 * t.abs().max(1.0) && (t_end - t).abs() > h.abs() {
            return Err(Error::Ode(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::Ode(format!("exceeded {} steps", opts.max_steps)))
}

fn locate<F, E>(f: &F, event: &E, t_lo: f64, y_lo: &[f64], t_hi: f64, opts: &OdeOptions) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
    E: Fn(f64, &[f64]) -> f64,
{
    let g_lo = event(t_lo, y_lo);
    let (mut a, mut b) = (t_lo, t_hi);
    let mut ya = y_lo.to_vec();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) || (b - a).abs() < 1e-15 * a.abs().max(1.0) {
            break;
        }
        let ym = advance(f, a, &ya, m, opts)?;
        if event(m, &ym).signum() == g_lo.signum() && event(m, &ym) != 0.0 {
            a = m;
            ya = ym;
        } else {
            b = m;
        }
    }
    let yb = advance(f, a, &ya, b, opts)?;
    Ok((b, yb))
}

/// State at `t1` starting from `(t0, y0)`.
pub fn advance<F>(f: &F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOptions) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if t1 == t0 {
        return Ok(y0.to_vec());
    }
    let (traj, _) = integrate_with_event::<F, fn(f64, &[f64]) -> f64>(f, t0, y0, t1, opts, None)?;
    Ok(traj.ys.last().cloned().expect("trajectory is never empty"))
}

impl Trajectory {
    /// Dense evaluation by re-integrating from the nearest stored node at or before `t`.
    pub fn state_at<F>(&self, f: &F, t: f64, opts: &OdeOptions) -> Result<Vec<f64>>
    where
        F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let first = *self.ts.first().ok_or_else(|| Error::Ode("empty trajectory".into()))?;
        let last = *self.ts.last().unwrap();
        if t < first.min(last) - 1e-12 || t > first.max(last) + 1e-12 {
            return Err(Error::Ode(format!("t = {t} outside integrated range [{first}, {last}]")));
        }
        let k = match self.ts.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => return Ok(self.ys[k].clone()),
            Err(0) => 0,
            Err(k) => k - 1,
        };
        advance(f, self.ts[k], &self.ys[k], t, opts)
    }
}
