//! Scalar multiplier functions: a small library of built-ins carrying exact
//! symbolic derivatives, plus a parser for user-supplied expressions.
//!
//! A [`FuncExpr`] is an immutable expression tree over one free variable.
//! Evaluation is pure, so values can be shared freely across threads.

mod parser;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

pub use parser::ParseError;

/// Declared domain of a function. Callers decide the domain; nothing is
/// extended by zero implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Domain {
    /// All of the complex plane (modulo singularities of the expression).
    Entire,
    /// The real line.
    RealLine,
    /// The open half line (0, inf).
    PositiveHalfLine,
    /// The closed half line [0, inf).
    NonnegativeHalfLine,
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Entire => true,
            Domain::RealLine => z.im == 0.0,
            Domain::PositiveHalfLine => z.im == 0.0 && z.re > 0.0,
            Domain::NonnegativeHalfLine => z.im == 0.0 && z.re >= 0.0,
        }
    }

    /// True when every point of `self` lies in `other`.
    pub fn subset_of(&self, other: Domain) -> bool {
        use Domain::*;
        match (self, other) {
            (_, Entire) => true,
            (a, b) if *a == b => true,
            (PositiveHalfLine, RealLine) | (PositiveHalfLine, NonnegativeHalfLine) => true,
            (NonnegativeHalfLine, RealLine) => true,
            _ => false,
        }
    }

    fn intersect(a: Domain, b: Domain) -> Domain {
        if a.subset_of(b) {
            a
        } else if b.subset_of(a) {
            b
        } else {
            // only remaining mixed case among our variants
            Domain::PositiveHalfLine
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("point ({0}, {1}i) outside the declared domain")]
    OutsideDomain(f64, f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of zero")]
    LogOfZero,
    #[error("zero base with non-positive exponent")]
    PowUndefinedAtZero,
    #[error("bump evaluated off the real line")]
    BumpOffRealLine,
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Error, PartialEq)]
#[error("evaluation failed at point index {index}: {source}")]
pub struct PointEvalError {
    pub index: usize,
    #[source]
    pub source: EvalError,
}

#[derive(Debug, Error, PartialEq)]
pub enum DerivError {
    #[error("derivative of order {requested} unavailable (order {available} differentiable); pass allow_finite_difference to fall back")]
    OrderUnavailable { requested: u32, available: u32 },
    #[error("alpha must be positive, got {0}")]
    BadParameter(f64),
}

/// Expression node. Children are reference-counted so derivative construction
/// can share subtrees.
#[derive(Debug, Clone)]
pub enum Expr {
    Const(Complex64),
    Var,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Exp(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Log(Arc<Expr>),
    Abs(Arc<Expr>),
    /// The standard C^inf_c bump: exp(-1/(1-x^2)) on (-1,1), 0 outside.
    Bump(Arc<Expr>),
    /// Nested central differences of order `order` applied to `inner`.
    FiniteDiff { inner: Arc<Expr>, order: u32 },
}

/// How the expression was constructed; used when embedding in reports.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FuncKind {
    Builtin { name: String, params: Vec<f64> },
    Parsed,
}

/// An immutable scalar function of one variable.
#[derive(Debug, Clone)]
pub struct FuncExpr {
    root: Arc<Expr>,
    domain: Domain,
    kind: FuncKind,
}

impl FuncExpr {
    /// Parses an expression over the free variable `x`; domain defaults to
    /// the whole plane.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::parse_on(text, Domain::Entire)
    }

    pub fn parse_on(text: &str, domain: Domain) -> Result<Self, ParseError> {
        let root = parser::parse_expr(text)?;
        Ok(Self {
            root: Arc::new(simplify(&root)),
            domain,
            kind: FuncKind::Parsed,
        })
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            root: Arc::new(Expr::Const(c)),
            domain: Domain::Entire,
            kind: FuncKind::Builtin {
                name: String::from("const"),
                params: alloc::vec![c.re, c.im],
            },
        }
    }

    pub fn identity() -> Self {
        Self {
            root: Arc::new(Expr::Var),
            domain: Domain::Entire,
            kind: FuncKind::Builtin {
                name: String::from("identity"),
                params: Vec::new(),
            },
        }
    }

    pub(crate) fn from_root(root: Expr, domain: Domain, kind: FuncKind) -> Self {
        Self {
            root: Arc::new(root),
            domain,
            kind,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> &FuncKind {
        &self.kind
    }

    /// Re-declares the domain (e.g. restricting a parsed expression to the
    /// half line before taking Mihlin norms).
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Highest guaranteed symbolic derivative order: unlimited unless the
    /// tree contains `abs`.
    pub fn derivative_order_available(&self) -> Option<u32> {
        if contains_abs(&self.root) {
            Some(0)
        } else {
            None // unlimited
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        if !self.domain.contains(z) {
            return Err(EvalError::OutsideDomain(z.re, z.im));
        }
        let v = eval_node(&self.root, z)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    pub fn eval_real(&self, x: f64) -> Result<Complex64, EvalError> {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Pointwise evaluation; fails on the first offending point, reporting
    /// its index.
    pub fn eval_many(&self, points: &[Complex64]) -> Result<Vec<Complex64>, PointEvalError> {
        points
            .iter()
            .enumerate()
            .map(|(index, &z)| {
                self.eval(z).map_err(|source| PointEvalError { index, source })
            })
            .collect()
    }

    /// k-th derivative as a new evaluable expression: exact symbolic
    /// differentiation when available, nested central differences with
    /// `h = max(1e-5, 1e-5 |x|)` when `allow_finite_difference` is set.
    pub fn derivative(&self, k: u32, allow_finite_difference: bool) -> Result<Self, DerivError> {
        if k == 0 {
            return Ok(self.clone());
        }
        if let Some(avail) = self.derivative_order_available() {
            if k > avail {
                if !allow_finite_difference {
                    return Err(DerivError::OrderUnavailable {
                        requested: k,
                        available: avail,
                    });
                }
                return Ok(Self {
                    root: Arc::new(Expr::FiniteDiff {
                        inner: self.root.clone(),
                        order: k,
                    }),
                    domain: self.domain,
                    kind: self.kind.clone(),
                });
            }
        }
        let mut node: Expr = (*self.root).clone();
        for _ in 0..k {
            node = simplify(&diff(&node));
        }
        Ok(Self {
            root: Arc::new(node),
            domain: self.domain,
            kind: self.kind.clone(),
        })
    }

    /// Pointwise product; the domain is the intersection of the factors'.
    pub fn product(&self, other: &FuncExpr) -> FuncExpr {
        FuncExpr {
            root: Arc::new(Expr::Mul(self.root.clone(), other.root.clone())),
            domain: Domain::intersect(self.domain, other.domain),
            kind: FuncKind::Parsed,
        }
    }

    /// Linear combination `a*self + b*other`.
    pub fn linear_combination(&self, a: Complex64, other: &FuncExpr, b: Complex64) -> FuncExpr {
        let left = Expr::Mul(Arc::new(Expr::Const(a)), self.root.clone());
        let right = Expr::Mul(Arc::new(Expr::Const(b)), other.root.clone());
        FuncExpr {
            root: Arc::new(Expr::Add(Arc::new(left), Arc::new(right))),
            domain: Domain::intersect(self.domain, other.domain),
            kind: FuncKind::Parsed,
        }
    }

    /// The substitution x -> e^x, turning a function on (0, inf) into one on
    /// the real line.
    pub fn substitute_exp(&self) -> FuncExpr {
        let inner = Expr::Exp(Arc::new(Expr::Var));
        FuncExpr {
            root: Arc::new(substitute(&self.root, &inner)),
            domain: Domain::RealLine,
            kind: self.kind.clone(),
        }
    }

    /// The dilation x -> f(c * x) for real c > 0.
    pub fn scale_argument(&self, c: f64) -> FuncExpr {
        let inner = Expr::Mul(
            Arc::new(Expr::Const(Complex64::new(c, 0.0))),
            Arc::new(Expr::Var),
        );
        FuncExpr {
            root: Arc::new(substitute(&self.root, &inner)),
            domain: self.domain,
            kind: self.kind.clone(),
        }
    }

    /// Canonical prefix serialization for report embedding.
    pub fn to_prefix_string(&self) -> String {
        let mut s = String::new();
        write_prefix(&self.root, &mut s);
        s
    }
}

impl fmt::Display for FuncExpr {
    /// Fully parenthesized infix form, re-parseable by [`FuncExpr::parse`]
    /// (unless the tree contains finite-difference nodes).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_infix(&self.root, f)
    }
}

fn contains_abs(e: &Expr) -> bool {
    match e {
        Expr::Abs(_) => true,
        Expr::Const(_) | Expr::Var => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
            contains_abs(a) || contains_abs(b)
        }
        Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Log(a) | Expr::Bump(a) => {
            contains_abs(a)
        }
        Expr::FiniteDiff { inner, .. } => contains_abs(inner),
    }
}

fn bump_real(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

fn eval_node(e: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var => z,
        Expr::Add(a, b) => eval_node(a, z)? + eval_node(b, z)?,
        Expr::Sub(a, b) => eval_node(a, z)? - eval_node(b, z)?,
        Expr::Mul(a, b) => {
            // an exact zero factor annihilates the product without evaluating
            // the other side; derivative trees of compactly supported windows
            // rely on this at the support boundary
            let va = eval_node(a, z)?;
            if va == Complex64::new(0.0, 0.0) {
                return Ok(va);
            }
            va * eval_node(b, z)?
        }
        Expr::Div(a, b) => {
            let den = eval_node(b, z)?;
            if den == Complex64::new(0.0, 0.0) {
                return Err(EvalError::DivisionByZero);
            }
            eval_node(a, z)? / den
        }
        Expr::Neg(a) => -eval_node(a, z)?,
        Expr::Pow(a, b) => {
            let base = eval_node(a, z)?;
            let exponent = eval_node(b, z)?;
            complex_pow(base, exponent)?
        }
        Expr::Exp(a) => eval_node(a, z)?.exp(),
        Expr::Sin(a) => eval_node(a, z)?.sin(),
        Expr::Cos(a) => eval_node(a, z)?.cos(),
        Expr::Log(a) => {
            let v = eval_node(a, z)?;
            if v == Complex64::new(0.0, 0.0) {
                return Err(EvalError::LogOfZero);
            }
            v.ln()
        }
        Expr::Abs(a) => Complex64::new(eval_node(a, z)?.norm(), 0.0),
        Expr::Bump(a) => {
            let v = eval_node(a, z)?;
            if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
                return Err(EvalError::BumpOffRealLine);
            }
            Complex64::new(bump_real(v.re), 0.0)
        }
        Expr::FiniteDiff { inner, order } => central_difference(inner, *order, z)?,
    })
}

fn complex_pow(base: Complex64, exponent: Complex64) -> Result<Complex64, EvalError> {
    if base == Complex64::new(0.0, 0.0) {
        return if exponent == Complex64::new(0.0, 0.0) {
            Ok(Complex64::new(1.0, 0.0))
        } else if exponent.re > 0.0 && exponent.im == 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(EvalError::PowUndefinedAtZero)
        };
    }
    // fast paths: real positive base, or small integer exponent
    if exponent.im == 0.0 {
        let p = exponent.re;
        if base.im == 0.0 && base.re > 0.0 {
            return Ok(Complex64::new(base.re.powf(p), 0.0));
        }
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            return Ok(base.powi(p as i32));
        }
    }
    Ok(base.powc(exponent))
}

fn central_difference(inner: &Expr, order: u32, z: Complex64) -> Result<Complex64, EvalError> {
    if order == 0 {
        return eval_node(inner, z);
    }
    // step from the magnitude of the evaluation point
    let h = (1e-5f64).max(1e-5 * z.norm());
    let hc = Complex64::new(h, 0.0);
    let plus = central_difference(inner, order - 1, z + hc)?;
    let minus = central_difference(inner, order - 1, z - hc)?;
    Ok((plus - minus) / (2.0 * h))
}

fn diff(e: &Expr) -> Expr {
    use Expr::*;
    let one = || Arc::new(Const(Complex64::new(1.0, 0.0)));
    match e {
        Const(_) => Const(Complex64::new(0.0, 0.0)),
        Var => Const(Complex64::new(1.0, 0.0)),
        Add(a, b) => Add(Arc::new(diff(a)), Arc::new(diff(b))),
        Sub(a, b) => Sub(Arc::new(diff(a)), Arc::new(diff(b))),
        Neg(a) => Neg(Arc::new(diff(a))),
        Mul(a, b) => Add(
            Arc::new(Mul(Arc::new(diff(a)), b.clone())),
            Arc::new(Mul(a.clone(), Arc::new(diff(b)))),
        ),
        Div(a, b) => Div(
            Arc::new(Sub(
                Arc::new(Mul(Arc::new(diff(a)), b.clone())),
                Arc::new(Mul(a.clone(), Arc::new(diff(b)))),
            )),
            Arc::new(Mul(b.clone(), b.clone())),
        ),
        Pow(u, v) => {
            if let Const(c) = v.as_ref() {
                // d(u^c) = c * u^(c-1) * u'
                let cm1 = Const(*c - Complex64::new(1.0, 0.0));
                Mul(
                    Arc::new(Mul(
                        Arc::new(Const(*c)),
                        Arc::new(Pow(u.clone(), Arc::new(cm1))),
                    )),
                    Arc::new(diff(u)),
                )
            } else {
                // d(u^v) = u^v * (v' log u + v u'/u)
                let term1 = Mul(Arc::new(diff(v)), Arc::new(Log(u.clone())));
                let term2 = Div(Arc::new(Mul(v.clone(), Arc::new(diff(u)))), u.clone());
                Mul(
                    Arc::new(Pow(u.clone(), v.clone())),
                    Arc::new(Add(Arc::new(term1), Arc::new(term2))),
                )
            }
        }
        Exp(u) => Mul(Arc::new(Exp(u.clone())), Arc::new(diff(u))),
        Sin(u) => Mul(Arc::new(Cos(u.clone())), Arc::new(diff(u))),
        Cos(u) => Neg(Arc::new(Mul(Arc::new(Sin(u.clone())), Arc::new(diff(u))))),
        Log(u) => Div(Arc::new(diff(u)), u.clone()),
        Abs(_) => unreachable!("abs blocks symbolic differentiation"),
        Bump(u) => {
            // b'(y) = b(y) * (-2y) / (1-y^2)^2; the bump factor comes first so
            // the zero short-circuit in Mul kills the pole at y = +-1
            let y = u.clone();
            let y2 = Mul(y.clone(), y.clone());
            let denom = Pow(
                Arc::new(Sub(one(), Arc::new(y2))),
                Arc::new(Const(Complex64::new(2.0, 0.0))),
            );
            let ratio = Div(
                Arc::new(Mul(Arc::new(Const(Complex64::new(-2.0, 0.0))), y.clone())),
                Arc::new(denom),
            );
            Mul(
                Arc::new(Bump(u.clone())),
                Arc::new(Mul(Arc::new(ratio), Arc::new(diff(u)))),
            )
        }
        FiniteDiff { inner, order } => FiniteDiff {
            inner: inner.clone(),
            order: order + 1,
        },
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == Complex64::new(v, 0.0))
}

fn simplify(e: &Expr) -> Expr {
    use Expr::*;
    let zero = Complex64::new(0.0, 0.0);
    match e {
        Const(_) | Var => e.clone(),
        Add(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Const(x), Const(y)) => Const(x + y),
                _ if is_const(&a, 0.0) => b,
                _ if is_const(&b, 0.0) => a,
                _ => Add(Arc::new(a), Arc::new(b)),
            }
        }
        Sub(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Const(x), Const(y)) => Const(x - y),
                _ if is_const(&b, 0.0) => a,
                _ if is_const(&a, 0.0) => Neg(Arc::new(b)),
                _ => Sub(Arc::new(a), Arc::new(b)),
            }
        }
        Mul(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Const(x), Const(y)) => Const(x * y),
                _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Const(zero),
                _ if is_const(&a, 1.0) => b,
                _ if is_const(&b, 1.0) => a,
                _ => Mul(Arc::new(a), Arc::new(b)),
            }
        }
        Div(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Const(x), Const(y)) if *y != zero => Const(x / y),
                _ if is_const(&a, 0.0) && !is_const(&b, 0.0) => Const(zero),
                _ if is_const(&b, 1.0) => a,
                _ => Div(Arc::new(a), Arc::new(b)),
            }
        }
        Neg(a) => {
            let a = simplify(a);
            match &a {
                Const(x) => Const(-x),
                Neg(inner) => (**inner).clone(),
                _ => Neg(Arc::new(a)),
            }
        }
        Pow(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                _ if is_const(&b, 1.0) => a,
                _ if is_const(&b, 0.0) => Const(Complex64::new(1.0, 0.0)),
                _ => Pow(Arc::new(a), Arc::new(b)),
            }
        }
        Exp(a) => Exp(Arc::new(simplify(a))),
        Sin(a) => Sin(Arc::new(simplify(a))),
        Cos(a) => Cos(Arc::new(simplify(a))),
        Log(a) => Log(Arc::new(simplify(a))),
        Abs(a) => Abs(Arc::new(simplify(a))),
        Bump(a) => Bump(Arc::new(simplify(a))),
        FiniteDiff { inner, order } => FiniteDiff {
            inner: Arc::new(simplify(inner)),
            order: *order,
        },
    }
}

/// Replaces every occurrence of the free variable with `inner`; used by the
/// partition module to build window expressions in a second variable.
pub(crate) fn substitute_public(e: &Expr, inner: &Expr) -> Expr {
    substitute(e, inner)
}

/// Replaces every occurrence of the free variable with `inner`.
fn substitute(e: &Expr, inner: &Expr) -> Expr {
    use Expr::*;
    match e {
        Var => inner.clone(),
        Const(_) => e.clone(),
        Add(a, b) => Add(Arc::new(substitute(a, inner)), Arc::new(substitute(b, inner))),
        Sub(a, b) => Sub(Arc::new(substitute(a, inner)), Arc::new(substitute(b, inner))),
        Mul(a, b) => Mul(Arc::new(substitute(a, inner)), Arc::new(substitute(b, inner))),
        Div(a, b) => Div(Arc::new(substitute(a, inner)), Arc::new(substitute(b, inner))),
        Pow(a, b) => Pow(Arc::new(substitute(a, inner)), Arc::new(substitute(b, inner))),
        Neg(a) => Neg(Arc::new(substitute(a, inner))),
        Exp(a) => Exp(Arc::new(substitute(a, inner))),
        Sin(a) => Sin(Arc::new(substitute(a, inner))),
        Cos(a) => Cos(Arc::new(substitute(a, inner))),
        Log(a) => Log(Arc::new(substitute(a, inner))),
        Abs(a) => Abs(Arc::new(substitute(a, inner))),
        Bump(a) => Bump(Arc::new(substitute(a, inner))),
        FiniteDiff { inner: f, order } => FiniteDiff {
            inner: Arc::new(substitute(f, inner)),
            order: *order,
        },
    }
}

fn write_const(c: Complex64, out: &mut dyn fmt::Write) -> fmt::Result {
    if c.im == 0.0 {
        write!(out, "{}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(out, "i")
        } else {
            write!(out, "({}*i)", c.im)
        }
    } else {
        write!(out, "({}+{}*i)", c.re, c.im)
    }
}

fn write_infix(e: &Expr, out: &mut dyn fmt::Write) -> fmt::Result {
    use Expr::*;
    match e {
        Const(c) => write_const(*c, out),
        Var => write!(out, "x"),
        Add(a, b) => {
            write!(out, "(")?;
            write_infix(a, out)?;
            write!(out, "+")?;
            write_infix(b, out)?;
            write!(out, ")")
        }
        Sub(a, b) => {
            write!(out, "(")?;
            write_infix(a, out)?;
            write!(out, "-")?;
            write_infix(b, out)?;
            write!(out, ")")
        }
        Mul(a, b) => {
            write!(out, "(")?;
            write_infix(a, out)?;
            write!(out, "*")?;
            write_infix(b, out)?;
            write!(out, ")")
        }
        Div(a, b) => {
            write!(out, "(")?;
            write_infix(a, out)?;
            write!(out, "/")?;
            write_infix(b, out)?;
            write!(out, ")")
        }
        Neg(a) => {
            write!(out, "(-")?;
            write_infix(a, out)?;
            write!(out, ")")
        }
        Pow(a, b) => {
            write!(out, "(")?;
            write_infix(a, out)?;
            write!(out, "^")?;
            write_infix(b, out)?;
            write!(out, ")")
        }
        Exp(a) | Sin(a) | Cos(a) | Log(a) | Abs(a) | Bump(a) => {
            let name = match e {
                Exp(_) => "exp",
                Sin(_) => "sin",
                Cos(_) => "cos",
                Log(_) => "log",
                Abs(_) => "abs",
                Bump(_) => "bump",
                _ => unreachable!(),
            };
            write!(out, "{name}(")?;
            write_infix(a, out)?;
            write!(out, ")")
        }
        FiniteDiff { inner, order } => {
            // diagnostic form; not re-parseable
            write!(out, "fd{order}(")?;
            write_infix(inner, out)?;
            write!(out, ")")
        }
    }
}

fn write_prefix(e: &Expr, out: &mut String) {
    use core::fmt::Write;
    use Expr::*;
    let binary = |op: &str, a: &Expr, b: &Expr, out: &mut String| {
        out.push('(');
        out.push_str(op);
        out.push(' ');
        write_prefix(a, out);
        out.push(' ');
        write_prefix(b, out);
        out.push(')');
    };
    match e {
        Const(c) => {
            let _ = write!(out, "(const {} {})", c.re, c.im);
        }
        Var => out.push('x'),
        Add(a, b) => binary("+", a, b, out),
        Sub(a, b) => binary("-", a, b, out),
        Mul(a, b) => binary("*", a, b, out),
        Div(a, b) => binary("/", a, b, out),
        Pow(a, b) => binary("pow", a, b, out),
        Neg(a) => {
            out.push_str("(neg ");
            write_prefix(a, out);
            out.push(')');
        }
        Exp(a) | Sin(a) | Cos(a) | Log(a) | Abs(a) | Bump(a) => {
            let name = match e {
                Exp(_) => "exp",
                Sin(_) => "sin",
                Cos(_) => "cos",
                Log(_) => "log",
                Abs(_) => "abs",
                Bump(_) => "bump",
                _ => unreachable!(),
            };
            out.push('(');
            out.push_str(name);
            out.push(' ');
            write_prefix(a, out);
            out.push(')');
        }
        FiniteDiff { inner, order } => {
            let _ = write!(out, "(fd {order} ");
            write_prefix(inner, out);
            out.push(')');
        }
    }
}

/// Built-in function constructors.
pub mod builtins {
    use super::*;

    /// The wave multiplier f_alpha(x) = (1+x)^(-alpha) * exp(i t x) on
    /// [0, inf), with closed-form derivatives of all orders.
    pub fn f_alpha(alpha: f64, t: f64) -> Result<FuncExpr, DerivError> {
        if !(alpha > 0.0) {
            return Err(DerivError::BadParameter(alpha));
        }
        let one_plus_x = Expr::Add(
            Arc::new(Expr::Const(Complex64::new(1.0, 0.0))),
            Arc::new(Expr::Var),
        );
        let decay = Expr::Pow(
            Arc::new(one_plus_x),
            Arc::new(Expr::Const(Complex64::new(-alpha, 0.0))),
        );
        let phase = Expr::Exp(Arc::new(Expr::Mul(
            Arc::new(Expr::Const(Complex64::new(0.0, t))),
            Arc::new(Expr::Var),
        )));
        Ok(FuncExpr::from_root(
            Expr::Mul(Arc::new(decay), Arc::new(phase)),
            Domain::NonnegativeHalfLine,
            FuncKind::Builtin {
                name: String::from("f_alpha"),
                params: alloc::vec![alpha, t],
            },
        ))
    }

    /// The standard bump exp(-1/(1-x^2)) on (-1,1), zero outside.
    pub fn bump() -> FuncExpr {
        FuncExpr::from_root(
            Expr::Bump(Arc::new(Expr::Var)),
            Domain::RealLine,
            FuncKind::Builtin {
                name: String::from("bump"),
                params: Vec::new(),
            },
        )
    }

    /// exp(-x^2).
    pub fn gaussian() -> FuncExpr {
        FuncExpr::from_root(
            Expr::Exp(Arc::new(Expr::Neg(Arc::new(Expr::Mul(
                Arc::new(Expr::Var),
                Arc::new(Expr::Var),
            ))))),
            Domain::Entire,
            FuncKind::Builtin {
                name: String::from("gaussian"),
                params: Vec::new(),
            },
        )
    }

    /// x^c on (0, inf) for a complex exponent (houses the imaginary powers
    /// x^(i s)).
    pub fn power(c: Complex64) -> FuncExpr {
        FuncExpr::from_root(
            Expr::Pow(Arc::new(Expr::Var), Arc::new(Expr::Const(c))),
            Domain::PositiveHalfLine,
            FuncKind::Builtin {
                name: String::from("power"),
                params: alloc::vec![c.re, c.im],
            },
        )
    }
}
