//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! The parser builds nodes verbatim (no folding), so `parse(print(e)) == e`
//! holds structurally for every parsed `e`.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use super::expr::{Expr, Func, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= bytes.len() {
            return Ok((Tok::End, start));
        }
        let c = bytes[self.pos];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end < bytes.len() && bytes[end] == b'.' {
                end += 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.pos = end;
            return Ok((Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax { offset: start, message: format!("unexpected character `{ch}`") })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { offset: self.at, message: message.to_string() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.tok == t {
            self.bump()
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = Expr::raw(Node::Add(lhs, rhs));
                }
                Tok::Minus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = Expr::raw(Node::Add(lhs, Expr::raw(Node::Neg(rhs))));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = Expr::raw(Node::Mul(lhs, rhs));
                }
                Tok::Slash => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = Expr::raw(Node::Div(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.factor()?;
            return Ok(Expr::raw(Node::Pow(base, exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Tok::Minus {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(Expr::raw(Node::Neg(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::raw(Node::Const(v)))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if self.tok == Tok::LParen {
                    let f = Func::from_name(&name)
                        .ok_or(Error::UnknownFunction { name: name.clone(), offset: at })?;
                    self.bump()?;
                    let mut args = vec![self.expr()?];
                    while self.tok == Tok::Comma {
                        self.bump()?;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    let (lo, hi) = f.arity();
                    if args.len() < lo || args.len() > hi {
                        return Err(Error::Syntax {
                            offset: at,
                            message: format!("`{name}` called with {} arguments", args.len()),
                        });
                    }
                    return Ok(Expr::raw(Node::Call(f, args)));
                }
                Ok(match name.as_str() {
                    "pi" => Expr::raw(Node::Const(PI)),
                    "e" => Expr::raw(Node::Const(E)),
                    _ => Expr::raw(Node::Var(Arc::from(name.as_str()))),
                })
            }
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a number, identifier or `(`"),
        }
    }
}

/// Parse an expression; errors carry the byte offset of the offending token.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { lex: Lexer { src: text, pos: 0 }, tok: Tok::End, at: 0 };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    fn c(x: f64) -> Expr {
        Expr::raw(Node::Const(x))
    }

    #[test]
    fn precedence() {
        let e = parse("x + 2*k^2").unwrap();
        let want = Expr::raw(Node::Add(
            v("x"),
            Expr::raw(Node::Mul(c(2.0), Expr::raw(Node::Pow(v("k"), c(2.0))))),
        ));
        assert_eq!(e, want);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("x^2^3").unwrap();
        let want = Expr::raw(Node::Pow(v("x"), Expr::raw(Node::Pow(c(2.0), c(3.0)))));
        assert_eq!(e, want);
    }

    #[test]
    fn unary_minus_binds_tighter_than_power() {
        let e = parse("-x^2").unwrap();
        let want = Expr::raw(Node::Pow(Expr::raw(Node::Neg(v("x"))), c(2.0)));
        assert_eq!(e, want);
    }

    #[test]
    fn subtraction_is_left_associative() {
        let e = parse("a - b - c").unwrap();
        let ab = Expr::raw(Node::Add(v("a"), Expr::raw(Node::Neg(v("b")))));
        let want = Expr::raw(Node::Add(ab, Expr::raw(Node::Neg(v("c")))));
        assert_eq!(e, want);
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(parse("1.5e-3").unwrap(), c(1.5e-3));
        assert_eq!(parse(".25").unwrap(), c(0.25));
        assert_eq!(parse("pi").unwrap(), c(PI));
        assert_eq!(parse("e").unwrap(), c(E));
    }

    #[test]
    fn error_offsets() {
        match parse("x + * 2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse("1 + foo(x)") {
            Err(Error::UnknownFunction { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x $"), Err(Error::Syntax { offset: 2, .. })));
        assert!(parse("sin()").is_err());
        assert!(parse("sin(x, y)").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn multi_argument_bracket() {
        let e = parse("jb(k1, k2)").unwrap();
        assert!(matches!(e.node(), Node::Call(Func::Jb, a) if a.len() == 2));
    }
}
