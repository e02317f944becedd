//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' unary)?          right associative
//! base   := number | ident | func '(' args ')' | '(' expr ')'
//! func   := sqrt | exp | log | sin | cos | neg | abspow(expr, number)
//! ```
//!
//! Coordinates are `x1..xd` (or another single-letter prefix); parameters are
//! bare identifiers declared by the caller; `pi` is a built-in constant.

use super::{BinaryOp, Expression, UnaryOp};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParseOptions<'a> {
    pub dim: usize,
    pub coord_prefix: char,
    pub params: &'a [&'a str],
}

/// Parses `text` with coordinates `x1..x{dim}` and the given parameter names.
pub fn parse(text: &str, dim: usize, params: &[&str]) -> Result<Expression> {
    parse_with(
        text,
        &ParseOptions {
            dim,
            coord_prefix: 'x',
            params,
        },
    )
}

pub fn parse_with(text: &str, options: &ParseOptions<'_>) -> Result<Expression> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        options,
        end: text.len(),
    };
    let e = parser.expr()?;
    match parser.peek() {
        None => Ok(e),
        Some(t) => Err(Error::Syntax {
            pos: t.pos,
            message: format!("unexpected {}", t.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number(f64),
    Ident(String),
    Op(char),
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number(v) => format!("number {v}"),
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::Op(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal = &text[start..i];
            let value = literal.parse::<f64>().map_err(|_| Error::Syntax {
                pos: start,
                message: format!("malformed number `{literal}`"),
            })?;
            out.push(Token {
                kind: Kind::Number(value),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: Kind::Ident(text[start..i].to_string()),
                pos: start,
            });
        } else if "+-*/^(),".contains(c) {
            out.push(Token {
                kind: Kind::Op(c),
                pos: i,
            });
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    options: &'a ParseOptions<'a>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: Kind::Op(c), ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |t| t.kind.describe());
            Err(Error::Syntax {
                pos: self.here(),
                message: format!("expected `{op}`, found {found}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' {
                BinaryOp::Add
            } else {
                BinaryOp::Sub
            };
            lhs = Expression::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' {
                BinaryOp::Mul
            } else {
                BinaryOp::Div
            };
            lhs = Expression::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expression::unary(UnaryOp::Neg, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.base()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expression::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expression> {
        let Some(token) = self.peek().cloned() else {
            return Err(Error::Syntax {
                pos: self.end,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match token.kind {
            Kind::Number(v) => Ok(Expression::constant(v)),
            Kind::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Kind::Op(c) => Err(Error::Syntax {
                pos: token.pos,
                message: format!("unexpected `{c}`"),
            }),
            Kind::Ident(name) => {
                if self.peek_op() == Some('(') {
                    self.call(&name, token.pos)
                } else {
                    self.identifier(&name, token.pos)
                }
            }
        }
    }

    fn identifier(&self, name: &str, pos: usize) -> Result<Expression> {
        if self.options.params.contains(&name) {
            return Ok(Expression::param(name));
        }
        if let Some(rest) = name.strip_prefix(self.options.coord_prefix) {
            if let Ok(k) = rest.parse::<usize>() {
                if k >= 1 && k <= self.options.dim && !rest.starts_with('0') {
                    return Ok(Expression::coord(k - 1));
                }
            }
        }
        if name == "pi" {
            return Ok(Expression::constant(std::f64::consts::PI));
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            pos,
        })
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Expression> {
        let op = match name {
            "sqrt" => Some(UnaryOp::Sqrt),
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "neg" => Some(UnaryOp::Neg),
            "abspow" => None,
            _ => {
                return Err(Error::UnknownIdentifier {
                    name: name.to_string(),
                    pos,
                })
            }
        };
        self.expect_op('(')?;
        let mut args = vec![self.expr()?];
        while self.peek_op() == Some(',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect_op(')')?;
        let expected = if op.is_some() { 1 } else { 2 };
        if args.len() != expected {
            return Err(Error::Arity {
                func: name.to_string(),
                expected,
                found: args.len(),
                pos,
            });
        }
        match op {
            Some(op) => Ok(Expression::unary(op, args.remove(0))),
            None => {
                let q = args[1].as_constant().ok_or_else(|| Error::Syntax {
                    pos,
                    message: "abspow exponent must be a numeric constant".into(),
                })?;
                Ok(Expression::unary(UnaryOp::AbsPow(q), args.remove(0)))
            }
        }
    }
}
