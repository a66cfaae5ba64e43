//! Self-maps of ℝ^m given by component expressions.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::builtin::BuiltinParams;
use crate::expr::{
    grad_symbolic, parse_expression, poly_canonical, vars_from, EvalError, ExactEvalError,
    Expression, FloatPoly, ParseError, Polynomial, Vars,
};
use crate::sampling::{Window, WindowError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("dimension {dim} but {components} components")]
    ComponentCount { dim: usize, components: usize },
    #[error("map needs at least one variable")]
    NoVariables,
    #[error("component {index} is written in different variables")]
    VariableMismatch { index: usize },
    #[error("window has {got} axes, map has dimension {dim}")]
    WindowDimension { dim: usize, got: usize },
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error("component {index}: {source}")]
    Parse { index: usize, source: ParseError },
    #[error("unknown builtin family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParameter { family: String, reason: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A self-map `f = (f_1, …, f_m)` of ℝ^m.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    vars: Vars,
    components: Vec<Expression>,
    window: Option<Window>,
    family: Option<BuiltinParams>,
}

impl MapSpec {
    pub fn new(vars: Vars, components: Vec<Expression>) -> Result<Self, MapError> {
        if vars.is_empty() {
            return Err(MapError::NoVariables);
        }
        if components.len() != vars.len() {
            return Err(MapError::ComponentCount {
                dim: vars.len(),
                components: components.len(),
            });
        }
        if let Some(index) = components.iter().position(|c| c.vars() != &vars) {
            return Err(MapError::VariableMismatch { index });
        }
        Ok(Self {
            vars,
            components,
            window: None,
            family: None,
        })
    }

    /// Parses one expression per component.
    pub fn parse<S: AsRef<str>, T: AsRef<str>>(
        vars: &[S],
        components: &[T],
    ) -> Result<Self, MapError> {
        let vars = vars_from(vars);
        if components.len() != vars.len() {
            return Err(MapError::ComponentCount {
                dim: vars.len(),
                components: components.len(),
            });
        }
        let comps = components
            .iter()
            .enumerate()
            .map(|(index, text)| {
                parse_expression(text.as_ref(), &vars)
                    .map_err(|source| MapError::Parse { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vars, comps)
    }

    pub fn identity(vars: Vars) -> Self {
        let comps = (0..vars.len())
            .map(|i| Expression::var(i, Arc::clone(&vars)).expect("index in range"))
            .collect();
        Self::new(vars, comps).expect("identity is well formed")
    }

    pub fn with_window(mut self, window: Window) -> Result<Self, MapError> {
        if window.dim() != self.dim() {
            return Err(MapError::WindowDimension {
                dim: self.dim(),
                got: window.dim(),
            });
        }
        self.window = Some(window);
        Ok(self)
    }

    pub(crate) fn with_family(mut self, family: BuiltinParams) -> Self {
        self.family = Some(family);
        self
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn family(&self) -> Option<&BuiltinParams> {
        self.family.as_ref()
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(Expression::is_polynomial)
    }

    /// Exact canonical components, when every component is polynomial.
    pub fn polynomials(&self) -> Option<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| poly_canonical(c).ok())
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn apply_exact(&self, x: &[BigRational]) -> Result<Vec<BigRational>, ExactEvalError> {
        self.components.iter().map(|c| c.eval_exact(x)).collect()
    }

    pub fn iterate(&self, x: &[f64], n: usize) -> Result<Vec<f64>, EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut cur = x.to_vec();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn iterate_exact(
        &self,
        x: &[BigRational],
        n: usize,
    ) -> Result<Vec<BigRational>, ExactEvalError> {
        if x.len() != self.dim() {
            return Err(ExactEvalError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut cur = x.to_vec();
        for _ in 0..n {
            cur = self.apply_exact(&cur)?;
        }
        Ok(cur)
    }

    /// `self ∘ inner`, by AST substitution.
    pub fn compose(&self, inner: &MapSpec) -> Result<MapSpec, MapError> {
        if inner.dim() != self.dim() {
            return Err(MapError::DimensionMismatch {
                left: self.dim(),
                right: inner.dim(),
            });
        }
        let comps = self
            .components
            .iter()
            .map(|c| c.compose(&inner.components).expect("arity checked"))
            .collect();
        let mut out = MapSpec::new(Arc::clone(&inner.vars), comps)?;
        out.window = inner.window.clone().or_else(|| self.window.clone());
        Ok(out)
    }

    /// `self^n` as a composed map; polynomial maps are expanded exactly.
    pub fn power(&self, n: usize) -> MapSpec {
        let mut out = MapSpec::identity(Arc::clone(&self.vars));
        out.window = self.window.clone();
        if n == 0 {
            return out;
        }
        if let Some(polys) = self.polynomials() {
            let mut cur = polys.clone();
            for _ in 1..n {
                cur = polys.iter().map(|p| p.compose(&cur)).collect();
            }
            let comps = cur.iter().map(Polynomial::to_expression).collect();
            let mut m = MapSpec::new(Arc::clone(&self.vars), comps).expect("same variables");
            m.window = self.window.clone();
            return m;
        }
        for _ in 0..n {
            out = self.compose(&out).expect("same dimension");
        }
        out
    }

    /// Evaluator specialised for repeated float evaluation.
    pub fn compile(&self) -> CompiledMap {
        match self.polynomials() {
            Some(polys) => {
                let jac = polys
                    .iter()
                    .map(|p| {
                        (0..self.dim())
                            .map(|j| p.derivative(j).to_float())
                            .collect()
                    })
                    .collect();
                CompiledMap::Poly {
                    comps: polys.iter().map(Polynomial::to_float).collect(),
                    jac,
                }
            }
            None => CompiledMap::Tree {
                jac: self
                    .components
                    .iter()
                    .map(|c| grad_symbolic(c).ok())
                    .collect(),
                comps: self.components.clone(),
            },
        }
    }
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MapSpec", 4)?;
        st.serialize_field("vars", &*self.vars)?;
        let comps: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        st.serialize_field("components", &comps)?;
        st.serialize_field("window", &self.window.as_ref().map(|w| w.axes().to_vec()))?;
        st.serialize_field("builtin", &self.family.as_ref().map(ToString::to_string))?;
        st.end()
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Componentwise evaluation of `f` at `x`.
pub fn apply_map(f: &MapSpec, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    if x.len() != f.dim() {
        return Err(EvalError::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    f.apply(x)
}

/// `f^n(x)`, with `f^0 = Id`.
pub fn iterate_map(f: &MapSpec, x: &[f64], n: usize) -> Result<Vec<f64>, EvalError> {
    f.iterate(x, n)
}

const NUMERIC_JACOBIAN_STEP: f64 = 1e-6;

/// Float evaluator plus Jacobian. Polynomial maps evaluate from flattened
/// coefficient lists; other maps walk their expression trees and use
/// symbolic partials where available, central differences otherwise.
#[derive(Clone, Debug)]
pub enum CompiledMap {
    Poly {
        comps: Vec<FloatPoly>,
        jac: Vec<Vec<FloatPoly>>,
    },
    Tree {
        comps: Vec<Expression>,
        jac: Vec<Option<Vec<Expression>>>,
    },
}

impl CompiledMap {
    pub fn dim(&self) -> usize {
        match self {
            CompiledMap::Poly { comps, .. } => comps.len(),
            CompiledMap::Tree { comps, .. } => comps.len(),
        }
    }

    pub fn component(&self, i: usize, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            CompiledMap::Poly { comps, .. } => Ok(comps[i].eval(x)),
            CompiledMap::Tree { comps, .. } => comps[i].eval(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        (0..self.dim()).map(|i| self.component(i, x)).collect()
    }

    /// Gradient of component `i` at `x`.
    pub fn gradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        match self {
            CompiledMap::Poly { jac, .. } => Ok(jac[i].iter().map(|p| p.eval(x)).collect()),
            CompiledMap::Tree { comps, jac } => match &jac[i] {
                Some(parts) => parts.iter().map(|p| p.eval(x)).collect(),
                None => crate::expr::grad_numeric(&comps[i], x, NUMERIC_JACOBIAN_STEP),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn component_count_checked() {
        let err = MapSpec::parse(&["x", "y"], &["x"]).unwrap_err();
        assert_eq!(
            err,
            MapError::ComponentCount {
                dim: 2,
                components: 1
            }
        );
    }

    #[test]
    fn iterate_zero_is_identity() {
        let f = MapSpec::parse(&["x", "y"], &["x*y + 1", "y^2"]).unwrap();
        assert_eq!(f.iterate(&[3.0, 4.0], 0).unwrap(), vec![3.0, 4.0]);
        assert_eq!(iterate_map(&f, &[3.0, 4.0], 1).unwrap(), vec![13.0, 16.0]);
    }

    #[test]
    fn iterate_splits_exactly() {
        let f = MapSpec::parse(&["x", "y"], &["x/2 + y^2", "x - y/3"]).unwrap();
        let x = [q(1, 3), q(-2, 5)];
        for (a, b) in [(1, 2), (2, 1), (0, 3)] {
            let whole = f.iterate_exact(&x, a + b).unwrap();
            let split = f
                .iterate_exact(&f.iterate_exact(&x, b).unwrap(), a)
                .unwrap();
            assert_eq!(whole, split);
        }
    }

    #[test]
    fn power_matches_pointwise_iteration() {
        let f = MapSpec::parse(&["x", "y"], &["x*(1-y)", "x + y/2"]).unwrap();
        let f3 = f.power(3);
        let p = [0.3, -0.7];
        let a = f3.apply(&p).unwrap();
        let b = f.iterate(&p, 3).unwrap();
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));

        let g = MapSpec::parse(&["x"], &["piece(x <= 0 : 0 ; else : -exp(-1/x))"]).unwrap();
        let g2 = g.power(2);
        assert_eq!(g2.apply(&[1.0]).unwrap(), g.iterate(&[1.0], 2).unwrap());
    }

    #[test]
    fn compiled_jacobian_matches_symbolic() {
        let f = MapSpec::parse(&["x", "y"], &["x + y*x^2", "sin(x*y)"]).unwrap();
        let c = f.compile();
        assert_eq!(c.gradient(0, &[2.0, 3.0]).unwrap(), vec![13.0, 4.0]);
        let g = c.gradient(1, &[0.5, 2.0]).unwrap();
        assert!((g[0] - 2.0 * 1f64.cos()).abs() < 1e-12);
        let poly = MapSpec::parse(&["x", "y"], &["x + y*x^2", "0"])
            .unwrap()
            .compile();
        assert!(matches!(poly, CompiledMap::Poly { .. }));
        assert_eq!(poly.eval(&[2.0, 3.0]).unwrap(), vec![14.0, 0.0]);
    }
}
