//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `f_a = ∂^a f / a!` of a scalar
//! function around a base point, for every multi-index `a` of total degree up
//! to the jet's order. Coefficients are kept in graded order, so truncating a
//! jet to a lower order is a prefix slice. Differentiating with respect to a
//! seed variable lowers the order by one and is exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Highest total order supported by the jet tables.
pub const MAX_ORDER: usize = 4;
/// Highest number of seed variables supported by the jet tables.
pub const MAX_VARS: usize = 8;

/// Monomial bookkeeping shared by every jet with the same variable count.
#[derive(Debug)]
pub struct JetShape {
    nvars: usize,
    monomials: Vec<Vec<u8>>,
    /// Number of monomials of total degree `<= k`, for `k = 0..=MAX_ORDER`.
    counts: Vec<usize>,
    /// For each result monomial, the pairs `(a, b)` with `a + b = r`.
    products: Vec<Vec<(usize, usize)>>,
    /// `raise[i][a]` is the index of `a + e_i` when its degree is within range.
    raise: Vec<Vec<Option<usize>>>,
}

impl JetShape {
    fn build(nvars: usize) -> JetShape {
        let mut monomials: Vec<Vec<u8>> = Vec::new();
        let mut counts = Vec::with_capacity(MAX_ORDER + 1);
        for degree in 0..=MAX_ORDER {
            let mut current = vec![0u8; nvars];
            push_degree(&mut monomials, &mut current, 0, degree);
            counts.push(monomials.len());
        }
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut products = vec![Vec::new(); monomials.len()];
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                let sum: Vec<u8> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if let Some(&r) = index.get(&sum) {
                    products[r].push((a, b));
                }
            }
        }

        let raise = (0..nvars)
            .map(|var| {
                monomials
                    .iter()
                    .map(|m| {
                        let mut up = m.clone();
                        up[var] += 1;
                        index.get(&up).copied()
                    })
                    .collect()
            })
            .collect();

        JetShape {
            nvars,
            monomials,
            counts,
            products,
            raise,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.counts[order]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn monomial(&self, index: usize) -> &[u8] {
        &self.monomials[index]
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        let degree: usize = exponents.iter().map(|&e| e as usize).sum();
        if exponents.len() != self.nvars || degree > MAX_ORDER {
            return None;
        }
        let start = if degree == 0 {
            0
        } else {
            self.counts[degree - 1]
        };
        (start..self.counts[degree]).find(|&i| self.monomials[i] == exponents)
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut [u8], var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e as u8;
        push_degree(out, current, var + 1, remaining - e);
    }
    current[var] = 0;
}

/// Returns the interned shape for `nvars` seed variables.
pub fn shape(nvars: usize) -> &'static JetShape {
    static SHAPES: OnceLock<Mutex<HashMap<usize, &'static JetShape>>> = OnceLock::new();
    assert!(
        nvars <= MAX_VARS,
        "at most {MAX_VARS} jet variables are supported"
    );
    let mut table = SHAPES
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("jet shape table poisoned");
    table
        .entry(nvars)
        .or_insert_with(|| Box::leak(Box::new(JetShape::build(nvars))))
}

/// Checks that a requested jet order is supported.
pub fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::JetOrder {
            needed: order,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

/// A truncated Taylor expansion in a fixed number of seed variables.
#[derive(Clone)]
pub struct Jet {
    shape: &'static JetShape,
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        let shape = shape(nvars);
        let mut coeffs = vec![0.0; shape.len(order)];
        coeffs[0] = value;
        Jet {
            shape,
            order,
            coeffs,
        }
    }

    /// The seed variable `var` expanded around `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Jet {
        let mut jet = Jet::constant(nvars, order, value);
        if order > 0 {
            jet.coeffs[1 + var] = 1.0;
        }
        jet
    }

    /// Seeds one variable per coordinate of `point`.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(point.len(), order, i, v))
            .collect()
    }

    pub fn from_coeffs(nvars: usize, order: usize, coeffs: Vec<f64>) -> Jet {
        let shape = shape(nvars);
        assert_eq!(coeffs.len(), shape.len(order), "coefficient count mismatch");
        Jet {
            shape,
            order,
            coeffs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.shape.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn shape(&self) -> &'static JetShape {
        self.shape
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exponents: &[u8]) -> f64 {
        match self.shape.index_of(exponents) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i],
            _ => 0.0,
        }
    }

    /// Partial derivative `∂^a f` at the base point (coefficient times `a!`).
    pub fn partial(&self, exponents: &[u8]) -> f64 {
        let factorial: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u32).product::<u32>() as f64)
            .product();
        self.coeff(exponents) * factorial
    }

    /// First-order partials at the base point.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars())
            .map(|i| {
                if self.order > 0 {
                    self.coeffs[1 + i]
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            shape: self.shape,
            order,
            coeffs: self.coeffs[..self.shape.len(order)].to_vec(),
        }
    }

    /// Exact partial derivative with respect to seed variable `var`.
    ///
    /// Panics on an order-0 jet: callers size their jets up front.
    pub fn deriv(&self, var: usize) -> Jet {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let n = self.shape.len(order);
        let raise = &self.shape.raise[var];
        let coeffs = (0..n)
            .map(|a| {
                let up = raise[a].expect("raised monomial within table");
                (self.shape.monomials[a][var] as f64 + 1.0) * self.coeffs[up]
            })
            .collect();
        Jet {
            shape: self.shape,
            order,
            coeffs,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn same_shape(&self, other: &Jet) -> usize {
        assert!(
            std::ptr::eq(self.shape, other.shape),
            "jets over different variable sets"
        );
        self.order.min(other.order)
    }

    fn mul_ref(&self, other: &Jet) -> Jet {
        let order = self.same_shape(other);
        let n = self.shape.len(order);
        let coeffs = self.shape.products[..n]
            .iter()
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|&(a, b)| self.coeffs[a] * other.coeffs[b])
                    .sum()
            })
            .collect();
        Jet {
            shape: self.shape,
            order,
            coeffs,
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.same_shape(other);
        let n = self.shape.len(order);
        let coeffs = self.coeffs[..n]
            .iter()
            .zip(&other.coeffs[..n])
            .map(|(&a, &b)| f(a, b))
            .collect();
        Jet {
            shape: self.shape,
            order,
            coeffs,
        }
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            shape: self.shape,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Evaluates `f(u)` given `taylor[k] = f^(k)(u0) / k!`.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut acc = Jet::constant(self.nvars(), self.order, taylor[self.order]);
        for k in (0..self.order).rev() {
            acc = acc.mul_ref(&delta);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let u0 = self.value();
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / u0.powi(k as i32 + 1)
            })
            .collect();
        let mut out = self.compose(&taylor);
        out.coeffs[0] = 1.0 / u0;
        out
    }

    fn powi_nonneg(&self, mut exponent: u64) -> Jet {
        let mut result = Jet::constant(self.nvars(), self.order, 1.0);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul_ref(&base);
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul_ref(&base);
            }
        }
        result
    }

    fn powf_real(&self, e: f64) -> Jet {
        let u0 = self.value();
        let mut binom = 1.0;
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    binom *= (e - (k as f64 - 1.0)) / k as f64;
                }
                binom * u0.powf(e - k as f64)
            })
            .collect();
        let mut out = self.compose(&taylor);
        out.coeffs[0] = u0.powf(e);
        out
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.nvars())
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        std::ptr::eq(self.shape, other.shape)
            && self.order == other.order
            && self.coeffs == other.coeffs
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.mul_ref(b));
jet_binop!(Div, div, |a, b| {
    let mut out = a.mul_ref(&b.recip());
    // keep the base value identical to the plain float quotient
    out.coeffs[0] = a.coeffs[0] / b.coeffs[0];
    out
});

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.map_coeffs(|c| c * rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.map_coeffs(|c| c * rhs)
    }
}

/// Scalar arithmetic shared by plain floats and jets.
///
/// Every expression and linear-algebra kernel is written against this trait,
/// so the same code path yields either a value or a full Taylor expansion.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Add<f64, Output = Self>
{
    /// A constant compatible with `self` (same jet variables and order).
    fn constant_like(&self, value: f64) -> Self;
    fn value(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    /// Real power with a constant exponent. Integer exponents are exact at zero.
    fn powf(&self, exponent: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }
}

/// Integer exponents small enough to evaluate by repeated multiplication.
fn as_small_integer(e: f64) -> Option<i64> {
    (e.fract() == 0.0 && e.abs() <= 64.0).then_some(e as i64)
}

fn powi_f64(x: f64, n: i64) -> f64 {
    let mut result = 1.0;
    let mut base = x;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            result *= base;
        }
        k >>= 1;
        if k > 0 {
            base *= base;
        }
    }
    if n < 0 {
        1.0 / result
    } else {
        result
    }
}

impl Scalar for f64 {
    fn constant_like(&self, value: f64) -> f64 {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn sin(&self) -> f64 {
        f64::sin(*self)
    }
    fn cos(&self) -> f64 {
        f64::cos(*self)
    }
    fn powf(&self, exponent: f64) -> f64 {
        match as_small_integer(exponent) {
            Some(n) => powi_f64(*self, n),
            None => f64::powf(*self, exponent),
        }
    }
}

impl Scalar for Jet {
    fn constant_like(&self, value: f64) -> Jet {
        Jet::constant(self.nvars(), self.order, value)
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn is_finite(&self) -> bool {
        Jet::is_finite(self)
    }
    fn sqrt(&self) -> Jet {
        let mut out = self.powf_real(0.5);
        out.coeffs[0] = self.value().sqrt();
        out
    }
    fn exp(&self) -> Jet {
        let e0 = self.value().exp();
        let mut fact = 1.0;
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                e0 / fact
            })
            .collect();
        self.compose(&taylor)
    }
    fn ln(&self) -> Jet {
        let u0 = self.value();
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k == 0 {
                    u0.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign / (k as f64 * u0.powi(k as i32))
                }
            })
            .collect();
        self.compose(&taylor)
    }
    fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose(&trig_taylor(s, c, self.order))
    }
    fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        // cos(u0 + d) = cos u0 cos d - sin u0 sin d
        self.compose(&trig_taylor(c, -s, self.order))
    }
    fn powf(&self, exponent: f64) -> Jet {
        match as_small_integer(exponent) {
            Some(0) => self.constant_like(1.0),
            Some(n) if n > 0 => {
                let mut out = self.powi_nonneg(n as u64);
                out.coeffs[0] = powi_f64(self.value(), n);
                out
            }
            Some(n) => {
                let mut out = self.powi_nonneg(n.unsigned_abs()).recip();
                out.coeffs[0] = powi_f64(self.value(), n);
                out
            }
            None => self.powf_real(exponent),
        }
    }
}

/// Taylor coefficients of `s cos d + c sin d` in `d`.
fn trig_taylor(s: f64, c: f64, order: usize) -> Vec<f64> {
    let mut fact = 1.0;
    (0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            let v = match k % 4 {
                0 => s,
                1 => c,
                2 => -s,
                _ => -c,
            };
            v / fact
        })
        .collect()
}
