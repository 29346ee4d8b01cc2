//! Printer with minimal parentheses; output re-parses to the same tree.

use std::fmt::{self, Write};

use super::expr::{Expr, Node};

// Binding strength of the printed form.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => UNARY,
        Node::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn write_num(out: &mut String, c: f64) {
    if c.is_nan() {
        out.push_str("(0/0)");
    } else if c.is_infinite() {
        out.push_str(if c > 0.0 { "(1/0)" } else { "(-1/0)" });
    } else {
        let _ = write!(out, "{}", c.abs());
    }
}

fn wrapped(out: &mut String, e: &Expr, paren: bool) {
    if paren {
        out.push('(');
        go(out, e);
        out.push(')');
    } else {
        go(out, e);
    }
}

fn go(out: &mut String, e: &Expr) {
    match e.node() {
        Node::Const(c) => {
            if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                out.push('-');
            }
            write_num(out, *c);
        }
        Node::Var(name) => out.push_str(name),
        Node::Add(a, b) => {
            go(out, a);
            match b.node() {
                Node::Neg(inner) => {
                    out.push_str(" - ");
                    wrapped(out, inner, level(inner) <= SUM);
                }
                Node::Const(c) if *c < 0.0 => {
                    out.push_str(" - ");
                    write_num(out, *c);
                }
                _ => {
                    out.push_str(" + ");
                    wrapped(out, b, level(b) <= SUM);
                }
            }
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            wrapped(out, a, level(a) < PRODUCT);
            out.push_str(if matches!(e.node(), Node::Mul(..)) { "*" } else { "/" });
            wrapped(out, b, level(b) <= PRODUCT);
        }
        Node::Neg(a) => {
            out.push('-');
            wrapped(out, a, level(a) < UNARY || level(a) == POWER);
        }
        Node::Pow(b, x) => {
            wrapped(out, b, level(b) < ATOM);
            out.push('^');
            wrapped(out, x, level(x) < UNARY);
        }
        Node::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                go(out, a);
            }
            out.push(')');
        }
    }
}

pub fn print(e: &Expr) -> String {
    let mut s = String::new();
    go(&mut s, e);
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "x + 2*k^2",
            "a - (b - c)",
            "a - b - c",
            "a/(b*c)",
            "a*(b/c)",
            "(a + b)^2",
            "x^2^3",
            "(x^2)^3",
            "-x^2",
            "-(x^2)",
            "2^-x",
            "a*-b",
            "--x",
            "-(a + b)*c",
            "jb(k1, k2)/sqrt(1 + x^2)",
            "exp(-(k^2))*sin(x)",
            "0.1*sin(w) + w/2",
            "ramp1(k - 2, 1/k)",
        ] {
            let e = parse(s).unwrap();
            let p = print(&e);
            assert_eq!(parse(&p).unwrap(), e, "{s} printed as {p}");
        }
    }

    #[test]
    fn prints_minimally() {
        assert_eq!(print(&parse("x + 2*k^2").unwrap()), "x + 2*k^2");
        assert_eq!(print(&parse("((a))*(b)").unwrap()), "a*b");
        assert_eq!(print(&parse("a - (b + c)").unwrap()), "a - (b + c)");
    }

    #[test]
    fn negative_constants_print_as_subtraction() {
        let e = Expr::add(Expr::var("x"), Expr::constant(-2.0));
        assert_eq!(print(&e), "x - 2");
        let e = Expr::pow(Expr::constant(-2.0), Expr::var("x"));
        assert_eq!(print(&e), "(-2)^x");
    }
}
