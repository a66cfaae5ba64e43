//! Scalar expressions over an ordered list of named real variables.
//!
//! An [`Expression`] is an immutable tree (children are shared through `Arc`,
//! so substitution never deep-copies). Literals that are rational stay exact;
//! only constants injected by builders (for example `π`) are floating.

mod diff;
mod eval;
mod parse;
mod poly;
mod print;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use diff::{grad, grad_numeric, grad_symbolic, partial, DiffError, GradMode, Gradient};
pub use eval::{EvalError, ExactEvalError};
pub use parse::{parse_expression, ParseError};
pub use poly::{poly_canonical, CanonError, FloatPoly, Monomial, Polynomial};

/// Shared, ordered variable names.
pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// A numeric literal. `exact` is present whenever the value is rational.
#[derive(Clone, Debug)]
pub struct Constant {
    exact: Option<BigRational>,
    value: f64,
}

impl Constant {
    pub fn rational(q: BigRational) -> Self {
        let value = rational_to_f64(&q);
        Self {
            exact: Some(q),
            value,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn float(value: f64) -> Self {
        Self { exact: None, value }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_zero(),
            None => self.value == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_one(),
            None => self.value == 1.0,
        }
    }
}

impl PartialEq for Constant {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.value.to_bits() == other.value.to_bits(),
            _ => false,
        }
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Tan,
    Sin,
    Cos,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Tan => "tan",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "tan" => Func::Tan,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Tan => x.tan(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Abs => x.abs(),
        }
    }
}

/// Comparison used by a piecewise guard `guard <op> threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
        }
    }
}

/// Two-way piecewise node. The guard splits the real line at `threshold`
/// into the set where `guard <cmp> threshold` holds and its complement, so
/// the branches always partition the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub guard: Arc<Node>,
    pub cmp: Cmp,
    pub threshold: Constant,
    pub then: Arc<Node>,
    pub otherwise: Arc<Node>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Constant),
    Var(usize),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, u32),
    Neg(Arc<Node>),
    Func(Func, Arc<Node>),
    Piece(Box<Piece>),
}

impl Node {
    pub(crate) fn max_var(&self) -> Option<usize> {
        match self {
            Node::Const(_) => None,
            Node::Var(i) => Some(*i),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => a.max_var(),
            Node::Piece(p) => p
                .guard
                .max_var()
                .max(p.then.max_var())
                .max(p.otherwise.max_var()),
        }
    }

    /// True when the tree only uses constants, variables, `+ - *`, integer
    /// powers, negation and division by exact constants.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Node::Const(c) => c.exact.is_some(),
            Node::Var(_) => true,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
                a.is_polynomial() && b.is_polynomial()
            }
            Node::Div(a, b) => {
                a.is_polynomial()
                    && matches!(&**b, Node::Const(c) if c.exact.as_ref().is_some_and(|q| !q.is_zero()))
            }
            Node::Pow(a, _) | Node::Neg(a) => a.is_polynomial(),
            Node::Func(..) | Node::Piece(_) => false,
        }
    }

    fn substitute(self: &Arc<Node>, inner: &[Arc<Node>]) -> Arc<Node> {
        match &**self {
            Node::Const(_) => Arc::clone(self),
            Node::Var(i) => Arc::clone(&inner[*i]),
            Node::Add(a, b) => Arc::new(Node::Add(a.substitute(inner), b.substitute(inner))),
            Node::Sub(a, b) => Arc::new(Node::Sub(a.substitute(inner), b.substitute(inner))),
            Node::Mul(a, b) => Arc::new(Node::Mul(a.substitute(inner), b.substitute(inner))),
            Node::Div(a, b) => Arc::new(Node::Div(a.substitute(inner), b.substitute(inner))),
            Node::Pow(a, n) => Arc::new(Node::Pow(a.substitute(inner), *n)),
            Node::Neg(a) => Arc::new(Node::Neg(a.substitute(inner))),
            Node::Func(f, a) => Arc::new(Node::Func(*f, a.substitute(inner))),
            Node::Piece(p) => Arc::new(Node::Piece(Box::new(Piece {
                guard: p.guard.substitute(inner),
                cmp: p.cmp,
                threshold: p.threshold.clone(),
                then: p.then.substitute(inner),
                otherwise: p.otherwise.substitute(inner),
            }))),
        }
    }
}

/// Small folding constructors used by differentiation and builders.
pub(crate) mod build {
    use super::*;

    pub fn konst(c: Constant) -> Arc<Node> {
        Arc::new(Node::Const(c))
    }

    pub fn int(n: i64) -> Arc<Node> {
        konst(Constant::integer(n))
    }

    fn as_const(n: &Node) -> Option<&Constant> {
        match n {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn fold(
        a: &Constant,
        b: &Constant,
        op: fn(&BigRational, &BigRational) -> BigRational,
    ) -> Option<Arc<Node>> {
        match (a.exact(), b.exact()) {
            (Some(x), Some(y)) => Some(konst(Constant::rational(op(x, y)))),
            _ => None,
        }
    }

    pub fn add(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (as_const(&a), as_const(&b)) {
            (Some(x), _) if x.is_zero() => b,
            (_, Some(y)) if y.is_zero() => a,
            (Some(x), Some(y)) => {
                fold(x, y, |p, q| p + q).unwrap_or_else(|| Arc::new(Node::Add(a, b)))
            }
            _ => Arc::new(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (as_const(&a), as_const(&b)) {
            (_, Some(y)) if y.is_zero() => a,
            (Some(x), _) if x.is_zero() => neg(b),
            (Some(x), Some(y)) => {
                fold(x, y, |p, q| p - q).unwrap_or_else(|| Arc::new(Node::Sub(a, b)))
            }
            _ => Arc::new(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (as_const(&a), as_const(&b)) {
            (Some(x), _) if x.is_zero() && x.exact().is_some() => a,
            (_, Some(y)) if y.is_zero() && y.exact().is_some() => b,
            (Some(x), _) if x.is_one() => b,
            (_, Some(y)) if y.is_one() => a,
            (Some(x), Some(y)) => {
                fold(x, y, |p, q| p * q).unwrap_or_else(|| Arc::new(Node::Mul(a, b)))
            }
            _ => Arc::new(Node::Mul(a, b)),
        }
    }

    pub fn div(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
        match (as_const(&a), as_const(&b)) {
            (Some(x), _) if x.is_zero() && x.exact().is_some() => a,
            (_, Some(y)) if y.is_one() => a,
            _ => Arc::new(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Arc<Node>, n: u32) -> Arc<Node> {
        match n {
            0 => int(1),
            1 => a,
            _ => Arc::new(Node::Pow(a, n)),
        }
    }

    pub fn neg(a: Arc<Node>) -> Arc<Node> {
        match &*a {
            Node::Const(c) => match c.exact() {
                Some(q) => konst(Constant::rational(-q)),
                None => konst(Constant::float(-c.value())),
            },
            Node::Neg(inner) => Arc::clone(inner),
            _ => Arc::new(Node::Neg(a)),
        }
    }

    pub fn func(f: Func, a: Arc<Node>) -> Arc<Node> {
        Arc::new(Node::Func(f, a))
    }
}

/// An expression together with the ordered variable list it is written in.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    node: Arc<Node>,
    vars: Vars,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("variable index {index} outside of the {len} declared variables")]
    VariableOutOfRange { index: usize, len: usize },
    #[error("expected {expected} inner expressions, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("inner expressions use different variable lists")]
    MixedVariables,
    #[error("piecewise threshold must be finite")]
    NonFiniteThreshold,
}

impl Expression {
    pub fn new(node: Arc<Node>, vars: Vars) -> Result<Self, ExprError> {
        if let Some(index) = node.max_var() {
            if index >= vars.len() {
                return Err(ExprError::VariableOutOfRange {
                    index,
                    len: vars.len(),
                });
            }
        }
        check_thresholds(&node)?;
        Ok(Self { node, vars })
    }

    pub(crate) fn from_parts(node: Arc<Node>, vars: Vars) -> Self {
        debug_assert!(node.max_var().is_none_or(|i| i < vars.len()));
        Self { node, vars }
    }

    pub fn constant(value: Constant, vars: Vars) -> Self {
        Self::from_parts(build::konst(value), vars)
    }

    pub fn zero(vars: Vars) -> Self {
        Self::from_parts(build::int(0), vars)
    }

    pub fn var(index: usize, vars: Vars) -> Result<Self, ExprError> {
        Self::new(Arc::new(Node::Var(index)), vars)
    }

    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self, ParseError> {
        parse_expression(text, vars)
    }

    pub fn node(&self) -> &Arc<Node> {
        &self.node
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn is_polynomial(&self) -> bool {
        self.node.is_polynomial()
    }

    /// Re-labels the expression with a different (same-length) variable list.
    pub fn with_vars(&self, vars: Vars) -> Result<Self, ExprError> {
        Self::new(Arc::clone(&self.node), vars)
    }

    /// Substitutes `inner[i]` for variable `i`. The result is written in the
    /// inner expressions' variables.
    pub fn compose(&self, inner: &[Expression]) -> Result<Expression, ExprError> {
        compose_symbolic(self, inner)
    }
}

fn check_thresholds(node: &Node) -> Result<(), ExprError> {
    match node {
        Node::Const(_) | Node::Var(_) => Ok(()),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            check_thresholds(a)?;
            check_thresholds(b)
        }
        Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => check_thresholds(a),
        Node::Piece(p) => {
            if !p.threshold.value().is_finite() {
                return Err(ExprError::NonFiniteThreshold);
            }
            check_thresholds(&p.guard)?;
            check_thresholds(&p.then)?;
            check_thresholds(&p.otherwise)
        }
    }
}

/// AST substitution `outer(inner_1, ..., inner_m)`.
pub fn compose_symbolic(outer: &Expression, inner: &[Expression]) -> Result<Expression, ExprError> {
    if inner.len() != outer.arity() {
        return Err(ExprError::ArityMismatch {
            expected: outer.arity(),
            got: inner.len(),
        });
    }
    let vars = match inner.first() {
        Some(first) => Arc::clone(&first.vars),
        // a constant outer with no variables: keep its (empty) list
        None => Arc::clone(&outer.vars),
    };
    if inner.iter().any(|e| e.vars != vars) {
        return Err(ExprError::MixedVariables);
    }
    let nodes: Vec<Arc<Node>> = inner.iter().map(|e| Arc::clone(&e.node)).collect();
    Ok(Expression::from_parts(outer.node.substitute(&nodes), vars))
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_node(f, &self.node, &self.vars, 0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $ctor:path) => {
        impl std::ops::$trait for Expression {
            type Output = Expression;
            fn $method(self, rhs: Expression) -> Expression {
                assert_eq!(self.vars, rhs.vars, "operands use different variable lists");
                Expression::from_parts($ctor(self.node, rhs.node), self.vars)
            }
        }
        impl std::ops::$trait for &Expression {
            type Output = Expression;
            fn $method(self, rhs: &Expression) -> Expression {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

binop!(Add, add, build::add);
binop!(Sub, sub, build::sub);
binop!(Mul, mul, build::mul);
binop!(Div, div, build::div);

impl std::ops::Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::from_parts(build::neg(self.node), self.vars)
    }
}

impl Expression {
    pub fn pow(&self, n: u32) -> Expression {
        Expression::from_parts(
            build::pow(Arc::clone(&self.node), n),
            Arc::clone(&self.vars),
        )
    }

    pub fn apply(&self, func: Func) -> Expression {
        Expression::from_parts(
            build::func(func, Arc::clone(&self.node)),
            Arc::clone(&self.vars),
        )
    }
}
