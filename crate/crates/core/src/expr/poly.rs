//! Exact multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{build, rational_to_f64, Constant, Expression, Node, Vars};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Canonical polynomial: no stored zero coefficients, so equal polynomials
/// have identical term maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, BigRational>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CanonError {
    #[error("non-polynomial node: {0}")]
    NonPolynomial(&'static str),
    #[error("division by a non-constant or zero expression")]
    NonConstantDivisor,
}

impl Polynomial {
    pub fn zero(vars: Vars) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational, vars: Vars) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn var(index: usize, vars: Vars) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(exps, BigRational::one());
        p
    }

    pub fn from_terms(
        vars: Vars,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), p.vars.len());
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True if every term has total degree exactly one.
    pub fn is_linear_homogeneous(&self) -> bool {
        self.terms.keys().all(|m| m.iter().sum::<u32>() == 1)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(Arc::clone(&self.vars));
        }
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = Polynomial::zero(Arc::clone(&self.vars));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut result = Polynomial::constant(BigRational::one(), Arc::clone(&self.vars));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `self(inner_1, ..., inner_m)`; result is in the inner polynomials' variables.
    pub fn compose(&self, inner: &[Polynomial]) -> Polynomial {
        assert_eq!(inner.len(), self.vars.len(), "composition arity");
        let vars = inner
            .first()
            .map(|p| Arc::clone(&p.vars))
            .unwrap_or_else(|| Arc::clone(&self.vars));
        // cache of inner[i]^e
        let mut powers: Vec<Vec<Polynomial>> = inner
            .iter()
            .map(|p| {
                vec![
                    Polynomial::constant(BigRational::one(), Arc::clone(&vars)),
                    p.clone(),
                ]
            })
            .collect();
        let mut out = Polynomial::zero(Arc::clone(&vars));
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone(), Arc::clone(&vars));
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&inner[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(Arc::clone(&self.vars));
        for (m, c) in &self.terms {
            if m[var] == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[var] -= 1;
            out.add_term(dm, c * BigRational::from_integer(m[var].into()));
        }
        out
    }

    /// Splits `self = var * quotient + remainder`, where the remainder
    /// collects the terms free of `var`.
    pub fn div_rem_var(&self, var: usize) -> (Polynomial, Polynomial) {
        let mut q = Polynomial::zero(Arc::clone(&self.vars));
        let mut r = Polynomial::zero(Arc::clone(&self.vars));
        for (m, c) in &self.terms {
            if m[var] == 0 {
                r.add_term(m.clone(), c.clone());
            } else {
                let mut qm = m.clone();
                qm[var] -= 1;
                q.add_term(qm, c.clone());
            }
        }
        (q, r)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(rational_to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, point: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, x) in m.iter().zip(point) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (rational_to_f64(c), m.clone()))
                .collect(),
        }
    }

    /// Sum-of-monomials expression, terms in descending monomial order.
    pub fn to_expression(&self) -> Expression {
        let mut acc: Option<Arc<Node>> = None;
        for (m, c) in self.terms.iter().rev() {
            let mut mono: Option<Arc<Node>> = None;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = build::pow(Arc::new(Node::Var(i)), e);
                mono = Some(match mono {
                    Some(prev) => Arc::new(Node::Mul(prev, factor)),
                    None => factor,
                });
            }
            let mag = c.abs();
            let term = match mono {
                None => build::konst(Constant::rational(mag)),
                Some(mono) if mag.is_one() => mono,
                Some(mono) => Arc::new(Node::Mul(build::konst(Constant::rational(mag)), mono)),
            };
            acc = Some(match acc {
                None if c.is_negative() => build::neg(term),
                None => term,
                Some(prev) if c.is_negative() => Arc::new(Node::Sub(prev, term)),
                Some(prev) => Arc::new(Node::Add(prev, term)),
            });
        }
        Expression::from_parts(acc.unwrap_or_else(|| build::int(0)), Arc::clone(&self.vars))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

/// Double-precision copy of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(f64, Monomial)>,
}

impl FloatPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, m) in &self.terms {
            let mut t = *c;
            for (&e, &xi) in m.iter().zip(x) {
                match e {
                    0 => {}
                    1 => t *= xi,
                    2 => t *= xi * xi,
                    _ => t *= xi.powi(e as i32),
                }
            }
            total += t;
        }
        total
    }
}

/// Exact canonical form of a polynomial expression.
pub fn poly_canonical(e: &Expression) -> Result<Polynomial, CanonError> {
    canon(e.node(), e.vars())
}

fn canon(node: &Node, vars: &Vars) -> Result<Polynomial, CanonError> {
    Ok(match node {
        Node::Const(c) => match c.exact() {
            Some(q) => Polynomial::constant(q.clone(), Arc::clone(vars)),
            None => return Err(CanonError::NonPolynomial("floating constant")),
        },
        Node::Var(i) => Polynomial::var(*i, Arc::clone(vars)),
        Node::Add(a, b) => canon(a, vars)?.add(&canon(b, vars)?),
        Node::Sub(a, b) => canon(a, vars)?.sub(&canon(b, vars)?),
        Node::Mul(a, b) => canon(a, vars)?.mul(&canon(b, vars)?),
        Node::Div(a, b) => {
            let den = canon(b, vars)?;
            let is_const =
                den.terms.len() == 1 && den.terms.keys().all(|m| m.iter().all(|&e| e == 0));
            if !is_const {
                return Err(CanonError::NonConstantDivisor);
            }
            let d = den.terms.values().next().unwrap().clone();
            canon(a, vars)?.scale(&d.recip())
        }
        Node::Pow(a, n) => canon(a, vars)?.pow(*n),
        Node::Neg(a) => canon(a, vars)?.neg(),
        Node::Func(f, _) => return Err(CanonError::NonPolynomial(f.name())),
        Node::Piece(_) => return Err(CanonError::NonPolynomial("piece")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn canon_of(text: &str) -> Polynomial {
        poly_canonical(&parse_expression(text, &["x", "y"]).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_family_member_two() {
        let p = canon_of("x*((y-1)/1)*((y-2)/2)");
        let expected = Polynomial::from_terms(
            p.vars().clone(),
            [
                (vec![1, 2], q(1, 2)),
                (vec![1, 1], q(-3, 2)),
                (vec![1, 0], q(1, 1)),
            ],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_polynomial_has_no_terms() {
        assert!(canon_of("0*x + 0").terms().is_empty());
    }

    #[test]
    fn binomial_cancellation() {
        let p = canon_of("(x+y)^2 - x^2 - 2*x*y");
        assert_eq!(p, canon_of("y^2"));
        assert_eq!(p.terms().len(), 1);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let p = canon_of("(x - 2*y)^3 / 7 + x*y");
        let again = poly_canonical(&p.to_expression()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn non_polynomial_nodes_rejected() {
        let e = parse_expression("exp(x)", &["x"]).unwrap();
        assert_eq!(poly_canonical(&e), Err(CanonError::NonPolynomial("exp")));
        let e = parse_expression("x/y", &["x", "y"]).unwrap();
        assert_eq!(poly_canonical(&e), Err(CanonError::NonConstantDivisor));
    }

    #[test]
    fn compose_and_derivative() {
        let vars = crate::expr::vars_from(&["x", "y"]);
        let p = canon_of("x + y*x^2");
        let id = [
            Polynomial::var(0, vars.clone()),
            Polynomial::var(1, vars.clone()),
        ];
        assert_eq!(p.compose(&id), p);
        assert_eq!(p.derivative(0), canon_of("1 + 2*x*y"));
        assert_eq!(p.derivative(1), canon_of("x^2"));
        let (quot, rem) = p.div_rem_var(1);
        assert_eq!(quot, canon_of("x^2"));
        assert_eq!(rem, canon_of("x"));
        assert_eq!(p.total_degree(), 3);
    }

    #[test]
    fn float_and_exact_evaluation_agree() {
        let p = canon_of("x^3/3 - x*y + 5/4");
        let fp = p.to_float();
        assert!((fp.eval(&[1.5, -2.0]) - p.eval(&[1.5, -2.0])).abs() < 1e-14);
        assert_eq!(
            p.eval_exact(&[q(3, 2), q(-2, 1)]),
            q(9, 8) + q(3, 1) + q(5, 4)
        );
    }
}
