//! Closed-form scalar expressions over chart coordinates.
//!
//! Expressions are immutable trees behind `Arc`, so derivatives share
//! subtrees with their source. Smart constructors fold constants and drop
//! neutral elements; nothing else is simplified.

mod parse;

pub use parse::{parse, parse_with, ParseOptions};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{self, Jet, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    /// `u ↦ |u|^q`, smooth away from `u = 0`.
    AbsPow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Param(Arc<str>),
    Unary(UnaryOp, Expression),
    Binary(BinaryOp, Expression, Expression),
}

/// Named parameter values (`p`, `l`, `a`, ...).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Params {
        Params::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Params {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Params {
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Params {
        Params(iter.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

#[derive(Clone)]
pub struct Expression(Arc<Node>);

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({self})")
    }
}

impl Expression {
    fn wrap(node: Node) -> Expression {
        Expression(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Expression {
        Expression::wrap(Node::Const(value))
    }

    pub fn coord(index: usize) -> Expression {
        Expression::wrap(Node::Coord(index))
    }

    pub fn param(name: &str) -> Expression {
        Expression::wrap(Node::Param(Arc::from(name)))
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(v) => Some(v),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_constant() == Some(v)
    }

    pub fn unary(op: UnaryOp, arg: Expression) -> Expression {
        if let Some(v) = arg.as_constant() {
            let folded = match op {
                UnaryOp::Neg => Some(-v),
                UnaryOp::Sqrt if v >= 0.0 => Some(v.sqrt()),
                UnaryOp::Exp => Some(v.exp()),
                UnaryOp::Log if v > 0.0 => Some(v.ln()),
                UnaryOp::Sin => Some(v.sin()),
                UnaryOp::Cos => Some(v.cos()),
                UnaryOp::AbsPow(q) if v != 0.0 => Some(Scalar::powf(&v.abs(), q)),
                _ => None,
            };
            if let Some(f) = folded.filter(|f| f.is_finite()) {
                return Expression::constant(f);
            }
        }
        if let (UnaryOp::Neg, Node::Unary(UnaryOp::Neg, inner)) = (op, arg.node()) {
            return inner.clone();
        }
        Expression::wrap(Node::Unary(op, arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expression, rhs: Expression) -> Expression {
        if let (Some(a), Some(b)) = (lhs.as_constant(), rhs.as_constant()) {
            let folded = match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => a / b,
                BinaryOp::Pow => Scalar::powf(&a, b),
            };
            if folded.is_finite() {
                return Expression::constant(folded);
            }
        }
        match op {
            BinaryOp::Add if lhs.is_const(0.0) => return rhs,
            BinaryOp::Add | BinaryOp::Sub if rhs.is_const(0.0) => return lhs,
            BinaryOp::Sub if lhs.is_const(0.0) => return Expression::unary(UnaryOp::Neg, rhs),
            BinaryOp::Mul if lhs.is_const(0.0) || rhs.is_const(0.0) => {
                return Expression::constant(0.0)
            }
            BinaryOp::Mul if lhs.is_const(1.0) => return rhs,
            BinaryOp::Mul | BinaryOp::Div if rhs.is_const(1.0) => return lhs,
            BinaryOp::Div if lhs.is_const(0.0) => return Expression::constant(0.0),
            BinaryOp::Pow if rhs.is_const(1.0) => return lhs,
            BinaryOp::Pow if rhs.is_const(0.0) => return Expression::constant(1.0),
            _ => {}
        }
        Expression::wrap(Node::Binary(op, lhs, rhs))
    }

    pub fn add(&self, other: &Expression) -> Expression {
        Expression::binary(BinaryOp::Add, self.clone(), other.clone())
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        Expression::binary(BinaryOp::Sub, self.clone(), other.clone())
    }

    pub fn mul(&self, other: &Expression) -> Expression {
        Expression::binary(BinaryOp::Mul, self.clone(), other.clone())
    }

    pub fn div(&self, other: &Expression) -> Expression {
        Expression::binary(BinaryOp::Div, self.clone(), other.clone())
    }

    pub fn pow(&self, exponent: &Expression) -> Expression {
        Expression::binary(BinaryOp::Pow, self.clone(), exponent.clone())
    }

    pub fn powf(&self, exponent: f64) -> Expression {
        self.pow(&Expression::constant(exponent))
    }

    pub fn neg(&self) -> Expression {
        Expression::unary(UnaryOp::Neg, self.clone())
    }

    pub fn scale(&self, factor: f64) -> Expression {
        Expression::constant(factor).mul(self)
    }

    pub fn sqrt(&self) -> Expression {
        Expression::unary(UnaryOp::Sqrt, self.clone())
    }

    pub fn exp(&self) -> Expression {
        Expression::unary(UnaryOp::Exp, self.clone())
    }

    pub fn ln(&self) -> Expression {
        Expression::unary(UnaryOp::Log, self.clone())
    }

    pub fn sin(&self) -> Expression {
        Expression::unary(UnaryOp::Sin, self.clone())
    }

    pub fn cos(&self) -> Expression {
        Expression::unary(UnaryOp::Cos, self.clone())
    }

    pub fn abs_pow(&self, q: f64) -> Expression {
        Expression::unary(UnaryOp::AbsPow(q), self.clone())
    }

    /// Sum of a sequence; the empty sum is zero.
    pub fn sum<I: IntoIterator<Item = Expression>>(terms: I) -> Expression {
        terms
            .into_iter()
            .fold(Expression::constant(0.0), |acc, t| acc.add(&t))
    }

    /// Whether the expression structurally contains coordinate `index`.
    pub fn depends_on(&self, index: usize) -> bool {
        match self.node() {
            Node::Const(_) | Node::Param(_) => false,
            Node::Coord(i) => *i == index,
            Node::Unary(_, a) => a.depends_on(index),
            Node::Binary(_, a, b) => a.depends_on(index) || b.depends_on(index),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) | Node::Param(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Unary(_, a) => a.max_coord(),
            Node::Binary(_, a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    /// Names of all parameters referenced.
    pub fn param_names(&self) -> Vec<String> {
        fn walk(e: &Expression, out: &mut Vec<String>) {
            match e.node() {
                Node::Param(name) => {
                    if !out.iter().any(|n| n.as_str() == &**name) {
                        out.push(name.to_string());
                    }
                }
                Node::Unary(_, a) => walk(a, out),
                Node::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out
    }

    /// Replaces bound parameters by constants and refolds.
    pub fn bind(&self, params: &Params) -> Expression {
        self.rebuild(&|node| match node {
            Node::Param(name) => params.get(name).map(Expression::constant),
            _ => None,
        })
    }

    /// Replaces each coordinate `x_i` by `replacements[i]`.
    pub fn substitute(&self, replacements: &[Expression]) -> Expression {
        self.rebuild(&|node| match node {
            Node::Coord(i) => Some(replacements[*i].clone()),
            _ => None,
        })
    }

    fn rebuild(&self, leaf: &dyn Fn(&Node) -> Option<Expression>) -> Expression {
        let mut memo: HashMap<*const Node, Expression> = HashMap::new();
        self.rebuild_memo(leaf, &mut memo)
    }

    fn rebuild_memo(
        &self,
        leaf: &dyn Fn(&Node) -> Option<Expression>,
        memo: &mut HashMap<*const Node, Expression>,
    ) -> Expression {
        let key = Arc::as_ptr(&self.0);
        if let Some(done) = memo.get(&key) {
            return done.clone();
        }
        let out = match self.node() {
            Node::Unary(op, a) => Expression::unary(*op, a.rebuild_memo(leaf, memo)),
            Node::Binary(op, a, b) => {
                let a = a.rebuild_memo(leaf, memo);
                let b = b.rebuild_memo(leaf, memo);
                Expression::binary(*op, a, b)
            }
            other => leaf(other).unwrap_or_else(|| self.clone()),
        };
        memo.insert(key, out.clone());
        out
    }

    /// Exact symbolic partial derivative with respect to coordinate `index`.
    pub fn differentiate(&self, index: usize) -> Expression {
        let mut memo: HashMap<*const Node, Expression> = HashMap::new();
        self.diff_memo(index, &mut memo)
    }

    fn diff_memo(&self, index: usize, memo: &mut HashMap<*const Node, Expression>) -> Expression {
        let key = Arc::as_ptr(&self.0);
        if let Some(done) = memo.get(&key) {
            return done.clone();
        }
        let zero = || Expression::constant(0.0);
        let out = match self.node() {
            Node::Const(_) | Node::Param(_) => zero(),
            Node::Coord(i) => Expression::constant(if *i == index { 1.0 } else { 0.0 }),
            Node::Unary(op, u) => {
                let du = u.diff_memo(index, memo);
                if du.is_const(0.0) {
                    zero()
                } else {
                    match *op {
                        UnaryOp::Neg => du.neg(),
                        UnaryOp::Sqrt => du.div(&self.scale(2.0)),
                        UnaryOp::Exp => self.mul(&du),
                        UnaryOp::Log => du.div(u),
                        UnaryOp::Sin => u.cos().mul(&du),
                        UnaryOp::Cos => u.sin().mul(&du).neg(),
                        // d|u|^q = q |u|^(q-2) u du
                        UnaryOp::AbsPow(q) => u.abs_pow(q - 2.0).mul(u).mul(&du).scale(q),
                    }
                }
            }
            Node::Binary(op, a, b) => {
                let da = a.diff_memo(index, memo);
                let db = b.diff_memo(index, memo);
                match op {
                    BinaryOp::Add => da.add(&db),
                    BinaryOp::Sub => da.sub(&db),
                    BinaryOp::Mul => da.mul(b).add(&a.mul(&db)),
                    BinaryOp::Div => {
                        // (a/b)' = a'/b - a b' / b^2
                        da.div(b).sub(&a.mul(&db).div(&b.powf(2.0)))
                    }
                    BinaryOp::Pow => {
                        if db.is_const(0.0) {
                            // b independent of this coordinate
                            let reduced = b.sub(&Expression::constant(1.0));
                            b.mul(&a.pow(&reduced)).mul(&da)
                        } else {
                            // a^b (b' ln a + b a'/a)
                            let inner = db.mul(&a.ln()).add(&b.mul(&da).div(a));
                            self.mul(&inner)
                        }
                    }
                }
            }
        };
        memo.insert(key, out.clone());
        out
    }

    /// Repeated differentiation along the listed coordinates.
    pub fn differentiate_many(&self, indices: &[usize]) -> Expression {
        indices
            .iter()
            .fold(self.clone(), |acc, &i| acc.differentiate(i))
    }

    /// Evaluates at `coords` over any scalar type.
    ///
    /// Domain violations (negative square roots, logarithms of non-positive
    /// values, division by zero, `|u|^q` at zero) are reported as errors
    /// rather than NaN.
    pub fn eval<S: Scalar>(&self, coords: &[S], params: &Params) -> Result<S> {
        let proto = coords
            .first()
            .ok_or_else(|| Error::Dimension("evaluation needs at least one coordinate".into()))?;
        let mut memo: HashMap<*const Node, S> = HashMap::new();
        self.eval_memo(coords, params, proto, &mut memo)
    }

    fn eval_memo<S: Scalar>(
        &self,
        coords: &[S],
        params: &Params,
        proto: &S,
        memo: &mut HashMap<*const Node, S>,
    ) -> Result<S> {
        let shared = Arc::strong_count(&self.0) > 1;
        let key = Arc::as_ptr(&self.0);
        if shared {
            if let Some(v) = memo.get(&key) {
                return Ok(v.clone());
            }
        }
        let out = match self.node() {
            Node::Const(v) => proto.constant_like(*v),
            Node::Coord(i) => coords
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Dimension(format!("coordinate x{} out of range", i + 1)))?,
            Node::Param(name) => proto.constant_like(
                params
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.to_string()))?,
            ),
            Node::Unary(op, a) => {
                let u = a.eval_memo(coords, params, proto, memo)?;
                let u0 = u.value();
                match *op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Sqrt => {
                        if u0 < 0.0 {
                            return Err(Error::Domain(format!("sqrt of negative value {u0}")));
                        }
                        u.sqrt()
                    }
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Log => {
                        if u0 <= 0.0 {
                            return Err(Error::Domain(format!("log of non-positive value {u0}")));
                        }
                        u.ln()
                    }
                    UnaryOp::Sin => u.sin(),
                    UnaryOp::Cos => u.cos(),
                    UnaryOp::AbsPow(q) => {
                        if u0 == 0.0 {
                            return Err(Error::Domain("abspow evaluated at zero".into()));
                        }
                        if u0 < 0.0 {
                            (-u).powf(q)
                        } else {
                            u.powf(q)
                        }
                    }
                }
            }
            Node::Binary(op, a, b) => {
                let x = a.eval_memo(coords, params, proto, memo)?;
                let y = b.eval_memo(coords, params, proto, memo)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y.value() == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinaryOp::Pow => eval_pow(x, y, b)?,
                }
            }
        };
        if !out.is_finite() {
            return Err(Error::Domain(format!("non-finite result in `{self}`")));
        }
        if shared {
            memo.insert(key, out.clone());
        }
        Ok(out)
    }

    /// Plain-float evaluation.
    pub fn eval_f64(&self, point: &[f64], params: &Params) -> Result<f64> {
        self.eval(point, params)
    }

    /// Formats with coordinates named `{prefix}1, {prefix}2, ...`.
    pub fn display(&self, prefix: char) -> Display<'_> {
        Display { expr: self, prefix }
    }
}

fn eval_pow<S: Scalar>(base: S, exponent: S, exponent_expr: &Expression) -> Result<S> {
    let b0 = base.value();
    let e0 = exponent.value();
    let exponent_constant = exponent_expr.max_coord().is_none();
    let integer = e0.fract() == 0.0;
    if exponent_constant {
        if b0 < 0.0 && !integer {
            return Err(Error::Domain(format!(
                "negative base {b0} raised to non-integer power {e0}"
            )));
        }
        if b0 == 0.0 && (e0 < 0.0 || !integer) {
            return Err(Error::Domain(format!("zero raised to power {e0}")));
        }
        Ok(base.powf(e0))
    } else {
        if b0 <= 0.0 {
            return Err(Error::Domain(format!(
                "non-positive base {b0} with variable exponent"
            )));
        }
        Ok((exponent * base.ln()).exp())
    }
}

/// Evaluates `e` as a jet of the given order, seeding the coordinates listed
/// in `seeds` (in that order) and holding the others fixed.
pub fn eval_jet(
    e: &Expression,
    point: &[f64],
    order: usize,
    seeds: &[usize],
    params: &Params,
) -> Result<Jet> {
    jet::check_order(order)?;
    if seeds.is_empty() || seeds.len() > jet::MAX_VARS {
        return Err(Error::Dimension(format!(
            "between 1 and {} seed variables required",
            jet::MAX_VARS
        )));
    }
    let nvars = seeds.len();
    let coords: Vec<Jet> = point
        .iter()
        .enumerate()
        .map(|(i, &v)| match seeds.iter().position(|&s| s == i) {
            Some(var) => Jet::variable(nvars, order, var, v),
            None => Jet::constant(nvars, order, v),
        })
        .collect();
    e.eval(&coords, params)
}

pub struct Display<'a> {
    expr: &'a Expression,
    prefix: char,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.prefix, f)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, 'x', f)
    }
}

fn write_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Debug formatting of f64 is the shortest exact round-trip representation.
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

fn write_expr(e: &Expression, prefix: char, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Const(v) => write_number(*v, f),
        Node::Coord(i) => write!(f, "{prefix}{}", i + 1),
        Node::Param(name) => write!(f, "{name}"),
        Node::Unary(op, a) => {
            let name = match op {
                UnaryOp::Neg => "neg",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Exp => "exp",
                UnaryOp::Log => "log",
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::AbsPow(q) => {
                    write!(f, "abspow(")?;
                    write_expr(a, prefix, f)?;
                    write!(f, ", ")?;
                    write_number(*q, f)?;
                    return write!(f, ")");
                }
            };
            write!(f, "{name}(")?;
            write_expr(a, prefix, f)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let sym = match op {
                BinaryOp::Add => " + ",
                BinaryOp::Sub => " - ",
                BinaryOp::Mul => " * ",
                BinaryOp::Div => " / ",
                BinaryOp::Pow => "^",
            };
            write!(f, "(")?;
            write_expr(a, prefix, f)?;
            write!(f, "{sym}")?;
            write_expr(b, prefix, f)?;
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, dim: usize) -> Expression {
        parse(text, dim, &[]).unwrap()
    }

    #[test]
    fn sum_of_squares_value() {
        let e = p("x1^2 + x2^2", 2);
        assert_eq!(e.eval_f64(&[3.0, 4.0], &Params::new()).unwrap(), 25.0);
    }

    #[test]
    fn product_derivative() {
        let e = p("x1*x2", 2).differentiate(0);
        assert_eq!(e.to_string(), "x2");
    }

    #[test]
    fn norm_gradient() {
        let e = p("(x1^2 + x2^2)^(1/2)", 2).differentiate(0);
        let v = e.eval_f64(&[3.0, 4.0], &Params::new()).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
    }

    #[test]
    fn jet_of_square() {
        let e = p("x1^2", 1);
        let j = eval_jet(&e, &[3.0], 2, &[0], &Params::new()).unwrap();
        assert_eq!(j.coeffs(), &[9.0, 6.0, 1.0]);
    }

    #[test]
    fn jet_of_sine() {
        let e = p("sin(x1)", 1);
        let j = eval_jet(&e, &[0.0], 3, &[0], &Params::new()).unwrap();
        let expected = [0.0, 1.0, 0.0, -1.0 / 6.0];
        for (a, b) in j.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn jet_order_above_maximum_rejected() {
        let e = p("x1", 1);
        let err = eval_jet(&e, &[1.0], 5, &[0], &Params::new()).unwrap_err();
        assert!(matches!(err, Error::JetOrder { needed: 5, .. }));
    }

    #[test]
    fn domain_errors() {
        let none = Params::new();
        assert!(matches!(
            p("sqrt(x1)", 1).eval_f64(&[-1.0], &none),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            p("log(x1)", 1).eval_f64(&[0.0], &none),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            p("1/x1", 1).eval_f64(&[0.0], &none),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            p("abspow(x1, 3)", 1).eval_f64(&[0.0], &none),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            p("x1^0.5", 1).eval_f64(&[-2.0], &none),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn negative_base_integer_power() {
        let e = p("x1^3", 1);
        assert_eq!(e.eval_f64(&[-2.0], &Params::new()).unwrap(), -8.0);
        let j = eval_jet(&e, &[-2.0], 2, &[0], &Params::new()).unwrap();
        assert_eq!(j.coeffs(), &[-8.0, 12.0, -6.0]);
    }

    #[test]
    fn abs_power_derivative() {
        let e = p("abspow(x1, 3)", 1);
        let d = e.differentiate(0);
        let v = d.eval_f64(&[-2.0], &Params::new()).unwrap();
        // d/dx |x|^3 = 3 x |x| = -12 at x = -2
        assert!((v + 12.0).abs() < 1e-13);
    }

    #[test]
    fn variable_exponent_derivative() {
        let e = p("x1^x2", 2);
        let d = e.differentiate(1);
        let v = d.eval_f64(&[2.0, 3.0], &Params::new()).unwrap();
        assert!((v - 8.0 * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn unbound_parameter() {
        let e = parse("x1^p", 1, &["p"]).unwrap();
        assert_eq!(
            e.eval_f64(&[2.0], &Params::new()).unwrap_err(),
            Error::UnboundParameter("p".into())
        );
        let bound = e.bind(&Params::new().with("p", 3.0));
        assert_eq!(bound.eval_f64(&[2.0], &Params::new()).unwrap(), 8.0);
    }

    #[test]
    fn substitution_composes() {
        let outer = p("x1^2 + x2", 2);
        let inner = [p("x1 + 1", 1), p("3*x1", 1)];
        let e = outer.substitute(&inner);
        assert_eq!(e.eval_f64(&[2.0], &Params::new()).unwrap(), 15.0);
    }

    #[test]
    fn constant_folding() {
        assert_eq!(p("2*3 + 1", 1).as_constant(), Some(7.0));
        assert_eq!(p("0*x1 + x1*1", 1).to_string(), "x1");
    }
}
