//! Symbolic and central-difference gradients.
//!
//! `abs` and piecewise nodes are rejected in symbolic mode. The numeric mode
//! accepts them, but a difference quotient straddling a kink or a guard
//! threshold is meaningless; that is the caller's risk.

use std::sync::Arc;

use super::{build, EvalError, Expression, Func, Node};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffError {
    #[error("cannot differentiate `{0}` symbolically")]
    NonDifferentiable(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GradMode {
    Symbolic,
    /// Central differences with the given step.
    Numeric(f64),
}

/// A gradient ready for evaluation.
#[derive(Clone, Debug)]
pub enum Gradient {
    Symbolic(Vec<Expression>),
    Numeric { expr: Expression, step: f64 },
}

impl Gradient {
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        match self {
            Gradient::Symbolic(parts) => parts.iter().map(|p| p.eval(point)).collect(),
            Gradient::Numeric { expr, step } => grad_numeric(expr, point, *step),
        }
    }

    pub fn symbolic(&self) -> Option<&[Expression]> {
        match self {
            Gradient::Symbolic(parts) => Some(parts),
            Gradient::Numeric { .. } => None,
        }
    }
}

pub fn grad(e: &Expression, mode: GradMode) -> Result<Gradient, DiffError> {
    Ok(match mode {
        GradMode::Symbolic => Gradient::Symbolic(grad_symbolic(e)?),
        GradMode::Numeric(step) => Gradient::Numeric {
            expr: e.clone(),
            step,
        },
    })
}

pub fn grad_symbolic(e: &Expression) -> Result<Vec<Expression>, DiffError> {
    (0..e.arity())
        .map(|i| {
            Ok(Expression::from_parts(
                derivative(e.node(), i)?,
                e.vars().clone(),
            ))
        })
        .collect()
}

/// Partial derivative with respect to variable `var`.
pub fn partial(e: &Expression, var: usize) -> Result<Expression, DiffError> {
    Ok(Expression::from_parts(
        derivative(e.node(), var)?,
        e.vars().clone(),
    ))
}

pub fn grad_numeric(e: &Expression, point: &[f64], step: f64) -> Result<Vec<f64>, EvalError> {
    let mut x = point.to_vec();
    let mut out = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let xi = x[i];
        x[i] = xi + step;
        let up = e.eval(&x)?;
        x[i] = xi - step;
        let down = e.eval(&x)?;
        x[i] = xi;
        out.push((up - down) / (2.0 * step));
    }
    Ok(out)
}

fn derivative(node: &Arc<Node>, var: usize) -> Result<Arc<Node>, DiffError> {
    use build::*;
    Ok(match &**node {
        Node::Const(_) => int(0),
        Node::Var(i) => int(i64::from(*i == var)),
        Node::Add(a, b) => add(derivative(a, var)?, derivative(b, var)?),
        Node::Sub(a, b) => sub(derivative(a, var)?, derivative(b, var)?),
        Node::Mul(a, b) => add(
            mul(derivative(a, var)?, Arc::clone(b)),
            mul(Arc::clone(a), derivative(b, var)?),
        ),
        Node::Div(a, b) => {
            let da = derivative(a, var)?;
            let db = derivative(b, var)?;
            if matches!(&*db, Node::Const(c) if c.is_zero()) {
                div(da, Arc::clone(b))
            } else {
                div(
                    sub(mul(da, Arc::clone(b)), mul(Arc::clone(a), db)),
                    pow(Arc::clone(b), 2),
                )
            }
        }
        Node::Pow(a, n) => match n {
            0 => int(0),
            _ => mul(
                mul(int(i64::from(*n)), pow(Arc::clone(a), n - 1)),
                derivative(a, var)?,
            ),
        },
        Node::Neg(a) => neg(derivative(a, var)?),
        Node::Func(f, a) => {
            let da = derivative(a, var)?;
            let outer = match f {
                Func::Exp => Arc::clone(node),
                Func::Sin => func(Func::Cos, Arc::clone(a)),
                Func::Cos => neg(func(Func::Sin, Arc::clone(a))),
                Func::Tan => add(int(1), pow(Arc::clone(node), 2)),
                Func::Abs => return Err(DiffError::NonDifferentiable("abs")),
            };
            mul(outer, da)
        }
        Node::Piece(_) => return Err(DiffError::NonDifferentiable("piece")),
    })
}
