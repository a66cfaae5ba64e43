use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{Cmp, Expression, Node};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("point has {got} coordinates, expression expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func} produced a non-finite value")]
    NonFinite { func: &'static str },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactEvalError {
    #[error("point has {got} coordinates, expression expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} cannot be evaluated exactly")]
    NotExact(&'static str),
}

impl Expression {
    /// Double-precision evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if point.len() != self.arity() {
            return Err(EvalError::DimensionMismatch {
                expected: self.arity(),
                got: point.len(),
            });
        }
        eval_node(&self.node, point)
    }

    /// Exact rational evaluation; only polynomial nodes, division and
    /// piecewise nodes with exact thresholds are supported.
    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational, ExactEvalError> {
        if point.len() != self.arity() {
            return Err(ExactEvalError::DimensionMismatch {
                expected: self.arity(),
                got: point.len(),
            });
        }
        eval_exact_node(&self.node, point)
    }
}

pub(crate) fn eval_node(node: &Node, x: &[f64]) -> Result<f64, EvalError> {
    Ok(match node {
        Node::Const(c) => c.value(),
        Node::Var(i) => x[*i],
        Node::Add(a, b) => eval_node(a, x)? + eval_node(b, x)?,
        Node::Sub(a, b) => eval_node(a, x)? - eval_node(b, x)?,
        Node::Mul(a, b) => eval_node(a, x)? * eval_node(b, x)?,
        Node::Div(a, b) => {
            let den = eval_node(b, x)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_node(a, x)? / den
        }
        Node::Pow(a, n) => powi(eval_node(a, x)?, *n),
        Node::Neg(a) => -eval_node(a, x)?,
        Node::Func(f, a) => {
            let v = f.apply(eval_node(a, x)?);
            if !v.is_finite() {
                return Err(EvalError::NonFinite { func: f.name() });
            }
            v
        }
        Node::Piece(p) => {
            let g = eval_node(&p.guard, x)?;
            if p.cmp.holds(g, p.threshold.value()) {
                eval_node(&p.then, x)?
            } else {
                eval_node(&p.otherwise, x)?
            }
        }
    })
}

fn powi(base: f64, n: u32) -> f64 {
    match i32::try_from(n) {
        Ok(n) => base.powi(n),
        Err(_) => base.powf(n as f64),
    }
}

fn eval_exact_node(node: &Node, x: &[BigRational]) -> Result<BigRational, ExactEvalError> {
    Ok(match node {
        Node::Const(c) => c
            .exact()
            .cloned()
            .ok_or(ExactEvalError::NotExact("floating constant"))?,
        Node::Var(i) => x[*i].clone(),
        Node::Add(a, b) => eval_exact_node(a, x)? + eval_exact_node(b, x)?,
        Node::Sub(a, b) => eval_exact_node(a, x)? - eval_exact_node(b, x)?,
        Node::Mul(a, b) => eval_exact_node(a, x)? * eval_exact_node(b, x)?,
        Node::Div(a, b) => {
            let den = eval_exact_node(b, x)?;
            if den.is_zero() {
                return Err(ExactEvalError::DivisionByZero);
            }
            eval_exact_node(a, x)? / den
        }
        Node::Pow(a, n) => num_traits::pow(eval_exact_node(a, x)?, *n as usize),
        Node::Neg(a) => -eval_exact_node(a, x)?,
        Node::Func(f, a) => match f {
            super::Func::Abs => eval_exact_node(a, x)?.abs(),
            other => return Err(ExactEvalError::NotExact(other.name())),
        },
        Node::Piece(p) => {
            let g = eval_exact_node(&p.guard, x)?;
            let t = p
                .threshold
                .exact()
                .ok_or(ExactEvalError::NotExact("floating threshold"))?;
            let holds = match p.cmp {
                Cmp::Lt => &g < t,
                Cmp::Le => &g <= t,
                Cmp::Gt => &g > t,
                Cmp::Ge => &g >= t,
            };
            if holds {
                eval_exact_node(&p.then, x)?
            } else {
                eval_exact_node(&p.otherwise, x)?
            }
        }
    })
}
