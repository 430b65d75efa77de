//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `D^a f(x0) / a!` of a scalar field
//! for every multi-index `a` of total degree at most `order` (4 unless a lower
//! order is requested). All derivatives used by the residual and inequality
//! machinery are pulled out of jets; nothing in the crate differentiates by
//! hand or by finite differences except the validation harness at the bottom
//! of this module.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest supported number of independent variables.
pub const MAX_DIM: usize = 12;
/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 4;

/// Monomial bookkeeping shared by every jet of a given `(dim, order)`.
#[derive(Debug)]
pub struct Layout {
    dim: usize,
    order: usize,
    /// Exponents, `len() * dim` entries, graded lexicographic order.
    exps: Vec<u8>,
    /// `degree_start[d]` is the first coefficient of total degree `d`.
    degree_start: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// Pairs `(a, b, a + b)` with `|a| + |b| <= order`.
    products: Vec<(u32, u32, u32)>,
    /// `prod_i a_i!` per coefficient.
    multi_factorial: Vec<f64>,
    /// Per variable: `(src, dst, a_i)` for differentiating into the next lower layout.
    derivative_maps: Vec<Vec<(u32, u32, f64)>>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn push_degree(dim: usize, remaining: usize, var: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if var == dim - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e as u8;
        push_degree(dim, remaining - e, var + 1, current, out);
    }
    current[var] = 0;
}

impl Layout {
    fn build(dim: usize, order: usize) -> Layout {
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(monomials.len());
            let mut cur = vec![0u8; dim];
            push_degree(dim, d, 0, &mut cur, &mut monomials);
        }
        degree_start.push(monomials.len());

        let lookup: HashMap<Vec<u8>, usize> = monomials.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();

        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();
        let mut products = Vec::new();
        let mut sum = vec![0u8; dim];
        for (ia, a) in monomials.iter().enumerate() {
            let da = degree(a);
            for (ib, b) in monomials.iter().enumerate() {
                if da + degree(b) > order {
                    continue;
                }
                for i in 0..dim {
                    sum[i] = a[i] + b[i];
                }
                let ic = lookup[&sum];
                products.push((ia as u32, ib as u32, ic as u32));
            }
        }

        let multi_factorial = monomials.iter().map(|m| m.iter().map(|&e| factorial(e as usize)).product()).collect();

        let mut derivative_maps = Vec::with_capacity(dim);
        if order > 0 {
            let lower = Layout::index_map(dim, order - 1);
            for i in 0..dim {
                let mut map = Vec::new();
                for (src, m) in monomials.iter().enumerate() {
                    if m[i] == 0 {
                        continue;
                    }
                    let mut reduced = m.clone();
                    reduced[i] -= 1;
                    let dst = lower[&reduced];
                    map.push((src as u32, dst as u32, m[i] as f64));
                }
                derivative_maps.push(map);
            }
        }

        let exps = monomials.concat();
        Layout { dim, order, exps, degree_start, lookup, products, multi_factorial, derivative_maps }
    }

    fn index_map(dim: usize, order: usize) -> HashMap<Vec<u8>, usize> {
        let mut monomials = Vec::new();
        for d in 0..=order {
            let mut cur = vec![0u8; dim];
            push_degree(dim, d, 0, &mut cur, &mut monomials);
        }
        monomials.into_iter().enumerate().map(|(k, m)| (m, k)).collect()
    }

    /// Shared layout for `(dim, order)`.
    pub fn get(dim: usize, order: usize) -> &'static Layout {
        thread_local! {
            static LOCAL: std::cell::RefCell<HashMap<(usize, usize), &'static Layout>> =
                std::cell::RefCell::new(HashMap::new());
        }
        if let Some(l) = LOCAL.with(|c| c.borrow().get(&(dim, order)).copied()) {
            return l;
        }
        let l = Layout::get_shared(dim, order);
        LOCAL.with(|c| c.borrow_mut().insert((dim, order), l));
        l
    }

    fn get_shared(dim: usize, order: usize) -> &'static Layout {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static Layout>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard.entry((dim, order)).or_insert_with(|| Box::leak(Box::new(Layout::build(dim, order))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.multi_factorial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exponents(&self, k: usize) -> &[u8] {
        &self.exps[k * self.dim..(k + 1) * self.dim]
    }

    pub fn index_of(&self, multi_index: &[u8]) -> Option<usize> {
        self.lookup.get(multi_index).copied()
    }

    /// Coefficient indices of total degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_start[d]..self.degree_start[d + 1]
    }
}

/// Truncated Taylor expansion of a scalar field about a point.
#[derive(Clone)]
pub struct Jet {
    layout: &'static Layout,
    coeffs: Vec<f64>,
}

/// The crate-wide differentiation currency: a jet truncated at total order 4.
pub type Jet4 = Jet;

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.layout.dim)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.dim == other.layout.dim && self.layout.order == other.layout.order && self.coeffs == other.coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryOp {
    Exp,
    Log,
    Pow(f64),
    Sqrt,
    Recip,
}

/// Which derivative tensor to pull out of a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    Value,
    Gradient,
    Hessian,
    Third,
    Fourth,
}

impl DerivOrder {
    pub fn as_usize(self) -> usize {
        match self {
            DerivOrder::Value => 0,
            DerivOrder::Gradient => 1,
            DerivOrder::Hessian => 2,
            DerivOrder::Third => 3,
            DerivOrder::Fourth => 4,
        }
    }
}

/// Dense symmetric derivative tensor, row-major with `dim^order` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivTensor {
    pub order: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl DerivTensor {
    pub fn get(&self, index: &[usize]) -> f64 {
        let flat = index.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.data[flat]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension { dim, reason: format!("jets support 1..={MAX_DIM} variables") });
    }
    Ok(())
}

impl Jet {
    pub fn constant(value: f64, dim: usize, order: usize) -> Jet {
        let layout = Layout::get(dim, order.min(MAX_ORDER));
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Jet { layout, coeffs }
    }

    /// Jet of the coordinate function `x_i` at a point whose `i`-th entry is `value`.
    pub fn variable(i: usize, value: f64, dim: usize) -> Result<Jet> {
        Jet::variable_with_order(i, value, dim, MAX_ORDER)
    }

    pub fn variable_with_order(i: usize, value: f64, dim: usize, order: usize) -> Result<Jet> {
        check_dim(dim)?;
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        let mut j = Jet::constant(value, dim, order);
        if j.layout.order >= 1 {
            j.coeffs[1 + i] = 1.0;
        }
        Ok(j)
    }

    /// Seeds every coordinate of `point` at the given order.
    pub fn seed_point(point: &[f64], order: usize) -> Result<Vec<Jet>> {
        let dim = point.len();
        (0..dim).map(|i| Jet::variable_with_order(i, point[i], dim, order)).collect()
    }

    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        check_dim(dim)?;
        let layout = Layout::get(dim, order.min(MAX_ORDER));
        if coeffs.len() != layout.len() {
            return Err(Error::DimensionMismatch { expected: layout.len(), got: coeffs.len() });
        }
        Ok(Jet { layout, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn layout(&self) -> &'static Layout {
        self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient for a multi-index (not the derivative).
    pub fn coeff(&self, multi_index: &[u8]) -> Option<f64> {
        self.layout.index_of(multi_index).map(|k| self.coeffs[k])
    }

    /// Partial derivative `D^a f` for a multi-index `a`.
    pub fn partial(&self, multi_index: &[u8]) -> Option<f64> {
        self.layout.index_of(multi_index).map(|k| self.coeffs[k] * self.layout.multi_factorial[k])
    }

    /// Partial derivative given as a list of variable indices, e.g. `[0, 0, 1]` for `f_{001}`.
    pub fn derivative(&self, vars: &[usize]) -> f64 {
        let mut mi = vec![0u8; self.dim()];
        for &v in vars {
            mi[v] += 1;
        }
        self.partial(&mi).unwrap_or(0.0)
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.derivative(&[i])).collect()
    }

    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.derivative(&[i, j]))
    }

    pub fn extract(&self, order: DerivOrder) -> DerivTensor {
        let k = order.as_usize();
        let dim = self.dim();
        let len = dim.pow(k as u32);
        let mut data = vec![0.0; len];
        let mut idx = vec![0usize; k];
        for (flat, slot) in data.iter_mut().enumerate() {
            let mut rem = flat;
            for p in (0..k).rev() {
                idx[p] = rem % dim;
                rem /= dim;
            }
            *slot = if k > self.order() { 0.0 } else { self.derivative(&idx) };
        }
        DerivTensor { order: k, dim, data }
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let layout = Layout::get(self.dim(), order);
        Jet { layout, coeffs: self.coeffs[..layout.len()].to_vec() }
    }

    /// `∂_i` of the truncated series, one order lower.
    pub fn differentiate(&self, i: usize) -> Result<Jet> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim() });
        }
        if self.order() == 0 {
            return Ok(Jet::constant(0.0, self.dim(), 0));
        }
        let layout = Layout::get(self.dim(), self.order() - 1);
        let mut coeffs = vec![0.0; layout.len()];
        for &(src, dst, factor) in &self.layout.derivative_maps[i] {
            coeffs[dst as usize] += factor * self.coeffs[src as usize];
        }
        Ok(Jet { layout, coeffs })
    }

    fn aligned<'a>(&'a self, other: &'a Jet) -> (std::borrow::Cow<'a, Jet>, std::borrow::Cow<'a, Jet>) {
        use std::borrow::Cow;
        assert_eq!(self.dim(), other.dim(), "jet dimension mismatch");
        match self.order().cmp(&other.order()) {
            std::cmp::Ordering::Equal => (Cow::Borrowed(self), Cow::Borrowed(other)),
            std::cmp::Ordering::Less => (Cow::Borrowed(self), Cow::Owned(other.truncate(self.order()))),
            std::cmp::Ordering::Greater => (Cow::Owned(self.truncate(other.order())), Cow::Borrowed(other)),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet { layout: self.layout, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add_scalar(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    fn mul_raw(a: &Jet, b: &Jet) -> Jet {
        let mut coeffs = vec![0.0; a.layout.len()];
        for &(ia, ib, ic) in &a.layout.products {
            coeffs[ic as usize] += a.coeffs[ia as usize] * b.coeffs[ib as usize];
        }
        Jet { layout: a.layout, coeffs }
    }

    /// Applies a univariate function given its derivatives `f^(k)(a0)`, `k = 0..=order`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        let order = self.order();
        assert!(derivs.len() > order, "need {} derivatives, got {}", order + 1, derivs.len());
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let taylor = |k: usize| derivs[k] / factorial(k);
        let mut coeffs = vec![0.0; self.layout.len()];
        coeffs[0] = taylor(order);
        let mut acc = Jet { layout: self.layout, coeffs };
        for k in (0..order).rev() {
            acc = Jet::mul_raw(&acc, &h);
            acc.coeffs[0] += taylor(k);
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::Domain { op: "log", value: a });
        }
        let r = 1.0 / a;
        Ok(self.compose(&[a.ln(), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    /// `self^p`. Integer `p` is allowed for any leading value where the result
    /// is finite; non-integer `p` needs a positive leading value.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let a = self.value();
        let integer = p.fract() == 0.0 && p.abs() < 1e9;
        if integer {
            return self.powi(p as i64);
        }
        if !(a > 0.0) {
            return Err(Error::Domain { op: "pow", value: a });
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut falling = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = falling * a.powf(p - k as f64);
            falling *= p - k as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn powi(&self, n: i64) -> Result<Jet> {
        let a = self.value();
        if n < 0 && a == 0.0 {
            return Err(Error::Domain { op: "pow", value: a });
        }
        let mut derivs = [0.0; MAX_ORDER + 1];
        let mut falling = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = if falling == 0.0 { 0.0 } else { falling * a.powi((n - k as i64) as i32) };
            falling *= (n - k as i64) as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::Domain { op: "sqrt", value: a });
        }
        self.powf(0.5)
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Domain { op: "recip", value: a });
        }
        self.powi(-1)
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        let inv = other.recip().map_err(|_| Error::Domain { op: "div", value: other.value() })?;
        Ok(self * &inv)
    }

    pub fn arith(&self, other: &Jet, op: ArithOp) -> Result<Jet> {
        match op {
            ArithOp::Add => Ok(self + other),
            ArithOp::Sub => Ok(self - other),
            ArithOp::Mul => Ok(self * other),
            ArithOp::Div => self.try_div(other),
        }
    }

    pub fn unary(&self, op: UnaryOp) -> Result<Jet> {
        match op {
            UnaryOp::Exp => Ok(self.exp()),
            UnaryOp::Log => self.ln(),
            UnaryOp::Pow(p) => self.powf(p),
            UnaryOp::Sqrt => self.sqrt(),
            UnaryOp::Recip => self.recip(),
        }
    }

    /// Sum of squares of the given jets.
    pub fn sum_of_squares(jets: &[Jet]) -> Option<Jet> {
        let mut it = jets.iter();
        let first = it.next()?;
        let mut acc = first * first;
        for j in it {
            acc = &acc + &(j * j);
        }
        Some(acc)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let (a, b) = self.aligned(rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Jet { layout: a.layout, coeffs }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let (a, b) = self.aligned(rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Jet { layout: a.layout, coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let (a, b) = self.aligned(rhs);
        Jet::mul_raw(&a, &b)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Anything that can be expanded into a jet at a point.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    /// Jet of the field at `x` truncated at `order`.
    fn jet_at(&self, x: &[f64], order: usize) -> Result<Jet>;

    fn value_at(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet_at(x, 0)?.value())
    }
}

/// One-dimensional central difference weights, O(h^2), for derivative order `k`.
fn central_stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("stencils exist up to order 4"),
    }
}

/// Central finite-difference estimate of `D^a f(x)` built as a tensor product
/// of one-dimensional stencils.
pub fn central_difference<F>(f: &F, x: &[f64], multi_index: &[u8], h: f64) -> Result<f64>
where
    F: ScalarField + ?Sized,
{
    let stencils: Vec<&[(i32, f64)]> = multi_index.iter().map(|&e| central_stencil(e as usize)).collect();
    let total: usize = multi_index.iter().map(|&e| e as usize).sum();
    let mut sum = 0.0;
    let mut cursor = vec![0usize; x.len()];
    let mut point = x.to_vec();
    loop {
        let mut weight = 1.0;
        for (i, st) in stencils.iter().enumerate() {
            let (off, w) = st[cursor[i]];
            point[i] = x[i] + off as f64 * h;
            weight *= w;
        }
        let v = f.value_at(&point).map_err(|_| Error::StencilOutsideDomain { point: point.clone() })?;
        sum += weight * v;

        let mut i = 0;
        loop {
            if i == x.len() {
                return Ok(sum / h.powi(total as i32));
            }
            cursor[i] += 1;
            if cursor[i] < stencils[i].len() {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}

/// Worst discrepancy between jet derivatives of the given order and central
/// finite differences with step `h`.
pub fn fd_crosscheck<F>(f: &F, x: &[f64], order: usize, h: f64) -> Result<f64>
where
    F: ScalarField + ?Sized,
{
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order {order} exceeds {MAX_ORDER}")));
    }
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let jet = f.jet_at(x, MAX_ORDER)?;
    let layout = jet.layout();
    let mut worst = 0.0f64;
    for k in layout.degree_range(order) {
        let mi = layout.exponents(k).to_vec();
        let exact = jet.partial(&mi).expect("multi-index belongs to layout");
        let approx = central_difference(f, x, &mi, h)?;
        worst = worst.max((exact - approx).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coefficient_counts() {
        assert_eq!(Layout::get(2, 4).len(), 15);
        assert_eq!(Layout::get(3, 4).len(), 35);
        assert_eq!(Layout::get(12, 4).len(), 1820);
        assert_eq!(Layout::get(10, 2).len(), 66);
    }

    #[test]
    fn seed_variable_examples() {
        let j = Jet::variable(0, 3.0, 2).unwrap();
        assert_eq!(j.value(), 3.0);
        assert_eq!(j.derivative(&[0]), 1.0);
        assert_eq!(j.derivative(&[1]), 0.0);
        assert!(j.coeffs()[3..].iter().all(|&c| c == 0.0));

        let j = Jet::variable(1, -2.0, 2).unwrap();
        assert_eq!(j.value(), -2.0);
        assert_eq!(j.derivative(&[1]), 1.0);

        let j = Jet::variable(0, 0.0, 1).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.coeffs()[1], 1.0);
    }

    #[test]
    fn seed_variable_rejects_bad_index() {
        assert!(matches!(Jet::variable(2, 0.0, 2), Err(Error::IndexOutOfRange { index: 2, dim: 2 })));
        assert!(Jet::variable(0, 0.0, 13).is_err());
    }

    #[test]
    fn polynomial_jet() {
        // x1^2 x2 at (1, 2)
        let x = Jet::variable(0, 1.0, 2).unwrap();
        let y = Jet::variable(1, 2.0, 2).unwrap();
        let f = &(&x * &x) * &y;
        assert_eq!(f.value(), 2.0);
        assert_eq!(f.derivative(&[0]), 4.0);
        assert_eq!(f.derivative(&[0, 0]), 4.0);
        assert_eq!(f.derivative(&[0, 0, 1]), 2.0);
        let fourth = f.extract(DerivOrder::Fourth);
        assert!(fourth.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exp_coefficients() {
        let t = Jet::variable(0, 0.0, 1).unwrap();
        let e = t.exp();
        for k in 0..=4 {
            assert_relative_eq!(e.coeffs()[k], 1.0 / factorial(k), epsilon = 1e-15);
            assert_relative_eq!(e.derivative(&vec![0; k]), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn reciprocal_fourth_derivative() {
        // d^4/dx^4 x^-1 = 24 x^-5, at x = 2 gives 0.75
        let x = Jet::variable(0, 2.0, 1).unwrap();
        let r = x.recip().unwrap();
        assert_relative_eq!(r.derivative(&[0, 0, 0, 0]), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors_are_typed() {
        let x = Jet::variable(0, -1.0, 1).unwrap();
        assert!(matches!(x.ln(), Err(Error::Domain { op: "log", .. })));
        assert!(matches!(x.sqrt(), Err(Error::Domain { op: "sqrt", .. })));
        assert!(matches!(x.powf(0.5), Err(Error::Domain { op: "pow", .. })));
        let z = Jet::variable(0, 0.0, 1).unwrap();
        assert!(matches!(z.recip(), Err(Error::Domain { op: "recip", .. })));
        let one = Jet::constant(1.0, 1, 4);
        assert!(matches!(one.try_div(&z), Err(Error::Domain { op: "div", .. })));
        // integer powers are fine at zero
        let cube = z.powi(3).unwrap();
        assert_eq!(cube.derivative(&[0, 0, 0]), 6.0);
    }

    #[test]
    fn extract_examples() {
        let x = Jet::variable(0, 0.0, 2).unwrap();
        let y = Jet::variable(1, 0.0, 2).unwrap();
        let h = (&x * &y).extract(DerivOrder::Hessian);
        assert_eq!(h.data, vec![0.0, 1.0, 1.0, 0.0]);

        let p = [0.3, -1.2, 2.0];
        let v = Jet::seed_point(&p, 4).unwrap();
        let sq = Jet::sum_of_squares(&v).unwrap();
        let h = sq.extract(DerivOrder::Hessian);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(&[i, j]), if i == j { 2.0 } else { 0.0 });
            }
        }

        let e = Jet::variable(0, 1.0, 1).unwrap().exp();
        assert_relative_eq!(e.extract(DerivOrder::Fourth).data[0], std::f64::consts::E, epsilon = 1e-14);
    }

    #[test]
    fn differentiate_lowers_order() {
        let x = Jet::variable(0, 0.7, 2).unwrap();
        let y = Jet::variable(1, -0.4, 2).unwrap();
        let f = (&(&x * &x) * &y).exp();
        let fx = f.differentiate(0).unwrap();
        assert_eq!(fx.order(), 3);
        assert_relative_eq!(fx.value(), f.derivative(&[0]), epsilon = 1e-14);
        assert_relative_eq!(fx.derivative(&[0, 1]), f.derivative(&[0, 0, 1]), epsilon = 1e-12);
        assert_relative_eq!(fx.derivative(&[1, 1, 1]), f.derivative(&[0, 1, 1, 1]), epsilon = 1e-12);
    }

    struct Poly;
    impl ScalarField for Poly {
        fn dim(&self) -> usize {
            2
        }
        fn jet_at(&self, x: &[f64], order: usize) -> Result<Jet> {
            let v = Jet::seed_point(x, order)?;
            Ok(Jet::sum_of_squares(&v).unwrap())
        }
    }

    #[test]
    fn fd_exact_for_quadratics() {
        let d = fd_crosscheck(&Poly, &[0.4, -0.9], 2, 1e-3).unwrap();
        assert!(d <= 1e-8, "discrepancy {d}");
    }
}
