//! One-variable functions carrying derivatives through order 4.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_ORDER};

/// Open interval `(lo, hi)`; infinite ends allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended_real")]
    pub lo: f64,
    #[serde(with = "extended_real")]
    pub hi: f64,
}

/// JSON has no infinities; unbounded ends travel as the strings `"inf"` / `"-inf"`.
mod extended_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Num(*v)
        } else if *v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number or ±inf, got {other:?}"))),
            },
        }
    }
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const POSITIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }
}

/// Closed-form expression in one variable `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CurveExpr {
    Var,
    Const { value: f64 },
    Sum { terms: Vec<CurveExpr> },
    Product { factors: Vec<CurveExpr> },
    Pow { base: Box<CurveExpr>, exponent: f64 },
    Exp { arg: Box<CurveExpr> },
    Ln { arg: Box<CurveExpr> },
    Scale { factor: f64, arg: Box<CurveExpr> },
}

impl CurveExpr {
    pub fn constant(value: f64) -> CurveExpr {
        CurveExpr::Const { value }
    }

    /// `c * t^p`.
    pub fn monomial(c: f64, p: f64) -> CurveExpr {
        let pow =
            if p == 1.0 { CurveExpr::Var } else { CurveExpr::Pow { base: Box::new(CurveExpr::Var), exponent: p } };
        if c == 1.0 {
            pow
        } else {
            CurveExpr::Scale { factor: c, arg: Box::new(pow) }
        }
    }

    pub fn sum(terms: Vec<CurveExpr>) -> CurveExpr {
        CurveExpr::Sum { terms }
    }

    pub fn exp(arg: CurveExpr) -> CurveExpr {
        CurveExpr::Exp { arg: Box::new(arg) }
    }

    pub fn eval(&self, t: &Jet) -> Result<Jet> {
        Ok(match self {
            CurveExpr::Var => t.clone(),
            CurveExpr::Const { value } => Jet::constant(*value, t.dim(), t.order()),
            CurveExpr::Sum { terms } => {
                let mut acc = Jet::constant(0.0, t.dim(), t.order());
                for term in terms {
                    acc = &acc + &term.eval(t)?;
                }
                acc
            }
            CurveExpr::Product { factors } => {
                let mut acc = Jet::constant(1.0, t.dim(), t.order());
                for f in factors {
                    acc = &acc * &f.eval(t)?;
                }
                acc
            }
            CurveExpr::Pow { base, exponent } => base.eval(t)?.powf(*exponent)?,
            CurveExpr::Exp { arg } => arg.eval(t)?.exp(),
            CurveExpr::Ln { arg } => arg.eval(t)?.ln()?,
            CurveExpr::Scale { factor, arg } => arg.eval(t)?.scale(*factor),
        })
    }
}

/// Numerically backed curve (ODE solution, quadrature) exposing derivatives 0..=4.
pub trait CurveBackend: Send + Sync + Debug {
    fn domain(&self) -> Interval;
    fn derivatives(&self, t: f64) -> Result<[f64; MAX_ORDER + 1]>;
}

/// A scalar function of one variable with derivatives up to order 4.
#[derive(Debug, Clone)]
pub enum ScalarCurve {
    Expr { expr: CurveExpr, domain: Interval },
    Backed(Arc<dyn CurveBackend>),
}

impl ScalarCurve {
    pub fn expr(expr: CurveExpr, domain: Interval) -> ScalarCurve {
        ScalarCurve::Expr { expr, domain }
    }

    /// `c * t^p` on `t > 0`, or on the whole line when `p` is a non-negative integer.
    pub fn power(c: f64, p: f64) -> ScalarCurve {
        let domain = if p.fract() == 0.0 && p >= 0.0 { Interval::REAL_LINE } else { Interval::POSITIVE };
        ScalarCurve::expr(CurveExpr::monomial(c, p), domain)
    }

    pub fn constant(c: f64) -> ScalarCurve {
        ScalarCurve::expr(CurveExpr::constant(c), Interval::REAL_LINE)
    }

    pub fn domain(&self) -> Interval {
        match self {
            ScalarCurve::Expr { domain, .. } => *domain,
            ScalarCurve::Backed(b) => b.domain(),
        }
    }

    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        let v = t.value();
        if !self.domain().contains(v) {
            return Err(Error::OutsideDomain {
                point: vec![v],
                reason: format!("curve argument outside ({}, {})", self.domain().lo, self.domain().hi),
            });
        }
        match self {
            ScalarCurve::Expr { expr, .. } => expr.eval(t),
            ScalarCurve::Backed(b) => Ok(t.compose(&b.derivatives(v)?)),
        }
    }

    /// `[f, f', f'', f''', f'''']` at `t`.
    pub fn derivatives(&self, t: f64) -> Result<[f64; MAX_ORDER + 1]> {
        match self {
            ScalarCurve::Backed(b) => {
                if !b.domain().contains(t) {
                    return Err(Error::OutsideDomain {
                        point: vec![t],
                        reason: "curve argument outside domain".into(),
                    });
                }
                b.derivatives(t)
            }
            ScalarCurve::Expr { .. } => {
                let j = self.eval_jet(&Jet::variable(0, t, 1)?)?;
                let mut out = [0.0; MAX_ORDER + 1];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = j.derivative(&vec![0; k]);
                }
                Ok(out)
            }
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.derivatives(t)?[0])
    }

    pub fn as_expr(&self) -> Option<(&CurveExpr, Interval)> {
        match self {
            ScalarCurve::Expr { expr, domain } => Some((expr, *domain)),
            ScalarCurve::Backed(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_curve_derivatives() {
        let c = ScalarCurve::power(2.0, -1.0);
        let d = c.derivatives(2.0).unwrap();
        assert_relative_eq!(d[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(d[1], -0.5, epsilon = 1e-15);
        assert_relative_eq!(d[2], 0.5, epsilon = 1e-15);
        assert_relative_eq!(d[3], -0.75, epsilon = 1e-15);
        assert_relative_eq!(d[4], 1.5, epsilon = 1e-14);
        assert!(c.derivatives(-1.0).is_err());
    }

    #[test]
    fn expr_round_trips_through_json() {
        let e = CurveExpr::sum(vec![CurveExpr::monomial(1.0, 9.0), CurveExpr::exp(CurveExpr::Var)]);
        let s = serde_json::to_string(&e).unwrap();
        let back: CurveExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(e, back);
    }
}
