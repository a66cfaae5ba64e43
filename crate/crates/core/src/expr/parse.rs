//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INTEGER)?
//! primary := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//!          | 'piece' '(' expr CMP NUMBER ':' expr ';' 'else' ':' expr ')'
//! ```
//!
//! Numeric literals are exact rationals. A quotient of two exact constants and
//! the negation of an exact constant are folded into a single constant, which
//! makes `a/b` a rational literal.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{build, Cmp, Constant, Expression, Func, Node, Piece, Vars};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("malformed piecewise guard at byte {pos}: {msg}")]
    MalformedGuard { pos: usize, msg: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownVariable { pos, .. }
            | ParseError::MalformedGuard { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Colon,
    Semi,
    Cmp(Cmp),
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(q) => format!("number {q}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::End => "end of input".to_string(),
        Tok::Cmp(c) => format!("`{}`", c.symbol()),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b':' => Tok::Colon,
            b';' => Tok::Semi,
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                if eq {
                    i += 1;
                }
                Tok::Cmp(match (c, eq) {
                    (b'<', false) => Cmp::Lt,
                    (b'<', true) => Cmp::Le,
                    (b'>', false) => Cmp::Gt,
                    _ => Cmp::Ge,
                })
            }
            b'0'..=b'9' | b'.' => {
                let (q, len) = lex_number(&text[i..]).ok_or_else(|| ParseError::Syntax {
                    pos: start,
                    msg: "malformed number".into(),
                })?;
                i += len;
                out.push((Tok::Num(q), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = bytes[i..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                out.push((Tok::Ident(text[i..i + len].to_string()), start));
                i += len;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Parses `digits [. digits] [e [+-] digits]` exactly.
fn lex_number(s: &str) -> Option<(BigRational, usize)> {
    let b = s.as_bytes();
    let mut i = 0;
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_part = &s[int_start..i];
    let mut frac_part = "";
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let fs = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_part = &s[fs..i];
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut exponent: i64 = 0;
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        let mut sign = 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            if b[j] == b'-' {
                sign = -1;
            }
            j += 1;
        }
        let es = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > es {
            exponent = sign * s[es..j].parse::<i64>().ok()?;
            i = j;
        }
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    };
    Some((q, i))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                msg: format!("expected {what}, found {}", describe(self.peek())),
            })
        }
    }

    fn expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Arc::new(Node::Add(lhs, rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Arc::new(Node::Sub(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Arc::new(Node::Mul(lhs, rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = match (exact_const(&lhs), exact_const(&rhs)) {
                        (Some(a), Some(b)) if !b.is_zero() => {
                            build::konst(Constant::rational(a / b))
                        }
                        _ => Arc::new(Node::Div(lhs, rhs)),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Arc<Node>, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(match exact_const(&inner) {
                Some(q) => build::konst(Constant::rational(-q)),
                None => Arc::new(Node::Neg(inner)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Arc<Node>, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(q) if q.is_integer() => {
                let n = u32::try_from(q.to_integer()).map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                Ok(Arc::new(Node::Pow(base, n)))
            }
            other => Err(ParseError::Syntax {
                pos,
                msg: format!(
                    "exponent must be a non-negative integer literal, found {}",
                    describe(&other)
                ),
            }),
        }
    }

    fn primary(&mut self) -> Result<Arc<Node>, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(q) => Ok(build::konst(Constant::rational(q))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "piece" => self.piece(),
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Arc::new(Node::Func(func, arg)));
                }
                if name == "else" {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "`else` outside of a piecewise expression".into(),
                    });
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Arc::new(Node::Var(i))),
                    None => Err(ParseError::UnknownVariable { name, pos }),
                }
            }
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn piece(&mut self) -> Result<Arc<Node>, ParseError> {
        self.expect(Tok::LParen, "`(` after `piece`")?;
        let guard_pos = self.pos();
        let guard = self.expr()?;
        let cmp = match self.bump() {
            Tok::Cmp(c) => c,
            other => {
                return Err(ParseError::MalformedGuard {
                    pos: guard_pos,
                    msg: format!("expected a comparison, found {}", describe(&other)),
                })
            }
        };
        let threshold = self.threshold()?;
        if *self.peek() != Tok::Colon {
            return Err(ParseError::MalformedGuard {
                pos: self.pos(),
                msg: format!(
                    "expected `:` after the guard, found {}",
                    describe(self.peek())
                ),
            });
        }
        self.bump();
        let then = self.expr()?;
        self.expect(Tok::Semi, "`;`")?;
        match self.bump() {
            Tok::Ident(e) if e == "else" => {}
            other => {
                return Err(ParseError::Syntax {
                    pos: self.toks[self.at.saturating_sub(1)].1,
                    msg: format!("expected `else`, found {}", describe(&other)),
                })
            }
        }
        self.expect(Tok::Colon, "`:` after `else`")?;
        let otherwise = self.expr()?;
        self.expect(Tok::RParen, "`)` closing `piece`")?;
        Ok(Arc::new(Node::Piece(Box::new(Piece {
            guard,
            cmp,
            threshold,
            then,
            otherwise,
        }))))
    }

    /// `[-] NUMBER [/ NUMBER]`
    fn threshold(&mut self) -> Result<Constant, ParseError> {
        let pos = self.pos();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut q = match self.bump() {
            Tok::Num(q) => q,
            other => {
                return Err(ParseError::MalformedGuard {
                    pos,
                    msg: format!(
                        "threshold must be a numeric constant, found {}",
                        describe(&other)
                    ),
                })
            }
        };
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.bump() {
                Tok::Num(d) if !d.is_zero() => q /= d,
                other => {
                    return Err(ParseError::MalformedGuard {
                        pos,
                        msg: format!("bad threshold denominator {}", describe(&other)),
                    })
                }
            }
        }
        if neg {
            q = -q;
        }
        Ok(Constant::rational(q))
    }
}

fn exact_const(n: &Node) -> Option<BigRational> {
    match n {
        Node::Const(c) => c.exact().cloned(),
        _ => None,
    }
}

/// Parses `text` over the ordered variable names `vars`.
pub fn parse_expression<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Expression, ParseError> {
    let vars: Vars = super::vars_from(vars);
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        vars: &vars,
    };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: format!("unexpected {}", describe(p.peek())),
        });
    }
    Ok(Expression::from_parts(node, vars))
}
