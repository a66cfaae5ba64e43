//! Printer producing text that re-parses to the same tree.

use std::fmt::{self, Write};

use num_traits::Signed;

use super::{Constant, Node};

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn const_prec(c: &Constant) -> u8 {
    match c.exact() {
        Some(q) if q.is_integer() && !q.is_negative() => ATOM,
        Some(q) if q.is_integer() => UNARY,
        Some(_) => MUL,
        None if c.value() < 0.0 => UNARY,
        None => ATOM,
    }
}

fn prec(node: &Node) -> u8 {
    match node {
        Node::Const(c) => const_prec(c),
        Node::Var(_) | Node::Func(..) | Node::Piece(_) => ATOM,
        Node::Add(..) | Node::Sub(..) => ADD,
        Node::Mul(..) | Node::Div(..) => MUL,
        Node::Neg(_) => UNARY,
        Node::Pow(..) => 4,
    }
}

pub(crate) fn write_constant(f: &mut impl Write, c: &Constant) -> fmt::Result {
    match c.exact() {
        Some(q) if q.is_integer() => write!(f, "{}", q.numer()),
        Some(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        None => write!(f, "{:?}", c.value()),
    }
}

pub(crate) fn write_node(f: &mut impl Write, node: &Node, vars: &[String], min: u8) -> fmt::Result {
    let p = prec(node);
    if p < min {
        f.write_char('(')?;
        write_node(f, node, vars, 0)?;
        return f.write_char(')');
    }
    match node {
        Node::Const(c) => write_constant(f, c),
        Node::Var(i) => f.write_str(&vars[*i]),
        Node::Add(a, b) => {
            write_node(f, a, vars, ADD)?;
            f.write_str(" + ")?;
            write_node(f, b, vars, MUL)
        }
        Node::Sub(a, b) => {
            write_node(f, a, vars, ADD)?;
            f.write_str(" - ")?;
            write_node(f, b, vars, MUL)
        }
        Node::Mul(a, b) => {
            write_node(f, a, vars, MUL)?;
            f.write_char('*')?;
            write_node(f, b, vars, UNARY)
        }
        Node::Div(a, b) => {
            write_node(f, a, vars, MUL)?;
            f.write_char('/')?;
            write_node(f, b, vars, UNARY)
        }
        Node::Pow(a, n) => {
            write_node(f, a, vars, ATOM)?;
            write!(f, "^{n}")
        }
        Node::Neg(a) => {
            f.write_char('-')?;
            write_node(f, a, vars, UNARY)
        }
        Node::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, vars, 0)?;
            f.write_char(')')
        }
        Node::Piece(piece) => {
            f.write_str("piece(")?;
            write_node(f, &piece.guard, vars, 0)?;
            write!(f, " {} ", piece.cmp.symbol())?;
            write_constant(f, &piece.threshold)?;
            f.write_str(" : ")?;
            write_node(f, &piece.then, vars, 0)?;
            f.write_str(" ; else : ")?;
            write_node(f, &piece.otherwise, vars, 0)?;
            f.write_char(')')
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse_expression;

    fn roundtrip(text: &str, vars: &[&str]) -> String {
        let e = parse_expression(text, vars).unwrap();
        let printed = e.to_string();
        let again = parse_expression(&printed, vars).unwrap();
        assert_eq!(e, again, "{text} printed as {printed}");
        printed
    }

    #[test]
    fn prints_readable_forms() {
        assert_eq!(roundtrip("x + y*x^2", &["x", "y"]), "x + y*x^2");
        assert_eq!(
            roundtrip("(x+y)^2 - x^2 - 2*x*y", &["x", "y"]),
            "(x + y)^2 - x^2 - 2*x*y"
        );
        assert_eq!(roundtrip("x*(1/2)", &["x"]), "x*(1/2)");
        assert_eq!(roundtrip("(-3)^2", &["x"]), "(-3)^2");
        assert_eq!(roundtrip("-(x/2)", &["x"]), "-(x/2)");
        assert_eq!(
            roundtrip("piece(x <= -1/2 : 0 ; else : -exp(-1/x))", &["x"]),
            "piece(x <= -1/2 : 0 ; else : -exp(-1/x))"
        );
    }

    #[test]
    fn associativity_preserved() {
        roundtrip("x - (y - x)", &["x", "y"]);
        roundtrip("x/(y/x)", &["x", "y"]);
        roundtrip("x - -3", &["x"]);
        roundtrip("x/-3*y", &["x", "y"]);
        roundtrip("1/2/x + -1/2*x", &["x"]);
        roundtrip("1/0", &["x"]);
    }
}
