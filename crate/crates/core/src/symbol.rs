//! Complex-valued symbols and amplitudes as pairs of real expressions.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::symexpr::{parse, Binding, Expr, Program};
use crate::vars;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSymbol {
    pub re: Expr,
    pub im: Expr,
}

impl ComplexSymbol {
    pub fn new(re: Expr, im: Expr) -> ComplexSymbol {
        ComplexSymbol { re, im }
    }

    pub fn real(re: Expr) -> ComplexSymbol {
        ComplexSymbol { re, im: Expr::zero() }
    }

    pub fn one() -> ComplexSymbol {
        ComplexSymbol::real(Expr::one())
    }

    pub fn zero() -> ComplexSymbol {
        ComplexSymbol::real(Expr::zero())
    }

    /// Parse a symbol `σ(x, k)` of dimension `n`; the imaginary part defaults to 0.
    pub fn parse_symbol(re: &str, im: Option<&str>, n: usize) -> Result<ComplexSymbol> {
        let s = ComplexSymbol::parse_raw(re, im, n)?;
        s.check(n, &['x', 'k'], "symbol")?;
        Ok(s)
    }

    /// Parse an amplitude `a(x, y, k)`; `w` may be used for the periodic difference `x − y`.
    pub fn parse_amplitude(re: &str, im: Option<&str>, n: usize) -> Result<ComplexSymbol> {
        let s = ComplexSymbol::parse_raw(re, im, n)?;
        s.check(n, &['x', 'y', 'k', 'w'], "amplitude")?;
        Ok(s)
    }

    fn parse_raw(re: &str, im: Option<&str>, n: usize) -> Result<ComplexSymbol> {
        let re = vars::canonicalize(&parse(re)?, n);
        let im = match im {
            Some(t) if !t.trim().is_empty() => vars::canonicalize(&parse(t)?, n),
            _ => Expr::zero(),
        };
        Ok(ComplexSymbol { re, im })
    }

    pub fn check(&self, n: usize, prefixes: &[char], what: &str) -> Result<()> {
        vars::check_vocabulary(&self.re, n, prefixes, what)?;
        vars::check_vocabulary(&self.im, n, prefixes, what)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &ComplexSymbol) -> ComplexSymbol {
        ComplexSymbol::new(Expr::add(self.re.clone(), o.re.clone()), Expr::add(self.im.clone(), o.im.clone()))
    }

    pub fn sub(&self, o: &ComplexSymbol) -> ComplexSymbol {
        ComplexSymbol::new(Expr::sub(self.re.clone(), o.re.clone()), Expr::sub(self.im.clone(), o.im.clone()))
    }

    pub fn neg(&self) -> ComplexSymbol {
        ComplexSymbol::new(Expr::neg(self.re.clone()), Expr::neg(self.im.clone()))
    }

    pub fn mul(&self, o: &ComplexSymbol) -> ComplexSymbol {
        let (a, b, c, d) = (&self.re, &self.im, &o.re, &o.im);
        ComplexSymbol::new(
            Expr::sub(Expr::mul(a.clone(), c.clone()), Expr::mul(b.clone(), d.clone())),
            Expr::add(Expr::mul(a.clone(), d.clone()), Expr::mul(b.clone(), c.clone())),
        )
    }

    pub fn scale(&self, c: Complex64) -> ComplexSymbol {
        let (a, b) = (&self.re, &self.im);
        let (cr, ci) = (Expr::constant(c.re), Expr::constant(c.im));
        ComplexSymbol::new(
            Expr::sub(Expr::mul(cr.clone(), a.clone()), Expr::mul(ci.clone(), b.clone())),
            Expr::add(Expr::mul(ci, a.clone()), Expr::mul(cr, b.clone())),
        )
    }

    pub fn scale_real(&self, c: Expr) -> ComplexSymbol {
        ComplexSymbol::new(Expr::mul(c.clone(), self.re.clone()), Expr::mul(c, self.im.clone()))
    }

    /// Multiplication by `i^k`, exact (no floating constants introduced).
    pub fn times_i_pow(&self, k: i64) -> ComplexSymbol {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => ComplexSymbol::new(Expr::neg(self.im.clone()), self.re.clone()),
            2 => self.neg(),
            _ => ComplexSymbol::new(self.im.clone(), Expr::neg(self.re.clone())),
        }
    }

    pub fn conj(&self) -> ComplexSymbol {
        ComplexSymbol::new(self.re.clone(), Expr::neg(self.im.clone()))
    }

    /// Complex reciprocal `1/(a+ib) = (a − ib)/(a² + b²)`.
    pub fn recip(&self) -> ComplexSymbol {
        if self.im.is_zero() {
            return ComplexSymbol::real(Expr::div(Expr::one(), self.re.clone()));
        }
        let den = Expr::add(Expr::powi(self.re.clone(), 2), Expr::powi(self.im.clone(), 2));
        ComplexSymbol::new(
            Expr::div(self.re.clone(), den.clone()),
            Expr::neg(Expr::div(self.im.clone(), den)),
        )
    }

    pub fn diff(&self, var: &str) -> Result<ComplexSymbol> {
        Ok(ComplexSymbol::new(self.re.diff(var)?, self.im.diff(var)?))
    }

    pub fn diff_multi(&self, vars: &[String], orders: &[u32]) -> Result<ComplexSymbol> {
        Ok(ComplexSymbol::new(self.re.diff_multi(vars, orders)?, self.im.diff_multi(vars, orders)?))
    }

    pub fn substitute(&self, map: &HashMap<String, Expr>) -> ComplexSymbol {
        ComplexSymbol::new(self.re.substitute(map), self.im.substitute(map))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> ComplexSymbol {
        ComplexSymbol::new(f(&self.re), f(&self.im))
    }

    pub fn eval(&self, b: &Binding) -> Result<Complex64> {
        Ok(Complex64::new(self.re.eval(b)?, self.im.eval(b)?))
    }

    pub fn eval_at(&self, pairs: &[(&str, f64)]) -> Result<Complex64> {
        self.eval(&crate::symexpr::binding(pairs))
    }

    /// Compile both parts into one program with outputs `[re, im]`.
    pub fn compile(&self, vars: &[&str]) -> Result<Program> {
        Program::compile(&[&self.re, &self.im], vars)
    }

    pub fn node_count(&self) -> usize {
        self.re.node_count() + self.im.node_count()
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.re.depends_on(var) || self.im.depends_on(var)
    }

    pub fn to_text(&self) -> String {
        if self.im.is_zero() {
            self.re.to_string()
        } else {
            format!("({}) + i*({})", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_algebra_matches_numbers() {
        let s = ComplexSymbol::parse_symbol("x + k", Some("x*k"), 1).unwrap();
        let t = ComplexSymbol::parse_symbol("sin(x)", Some("2"), 1).unwrap();
        let at = [("x1", 0.3), ("k1", -1.2)];
        let (a, b) = (s.eval_at(&at).unwrap(), t.eval_at(&at).unwrap());
        assert!((s.mul(&t).eval_at(&at).unwrap() - a * b).norm() < 1e-14);
        assert!((s.recip().eval_at(&at).unwrap() - 1.0 / a).norm() < 1e-14);
        assert!((s.times_i_pow(3).eval_at(&at).unwrap() - a * Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert_eq!(s.conj().eval_at(&at).unwrap(), a.conj());
    }

    #[test]
    fn vocabulary_is_checked() {
        assert!(ComplexSymbol::parse_symbol("x*y", None, 1).is_err());
        assert!(ComplexSymbol::parse_amplitude("x*y*k", None, 1).is_ok());
        assert!(ComplexSymbol::parse_symbol("x1*k2", None, 2).is_ok());
    }
}
