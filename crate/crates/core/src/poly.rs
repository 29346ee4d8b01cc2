//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::symexpr::{Expr, Node};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Q::one())
    }

    /// The variable `w_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Poly::monomial(m, Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Poly {
        let mut p = Poly::zero(m.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> Q {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars])
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).copied(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).min().unwrap_or(0)
    }

    fn insert_add(&mut self, m: Monomial, c: Q) -> Result<()> {
        let entry = self.terms.entry(m).or_default();
        *entry = entry.add(c)?;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn add(&self, o: &Poly) -> Result<Poly> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.insert_add(m.clone(), *c)?;
        }
        Ok(r)
    }

    pub fn scale(&self, c: Q) -> Result<Poly> {
        if c.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        let mut r = Poly::zero(self.nvars);
        for (m, v) in &self.terms {
            r.terms.insert(m.clone(), v.mul(c)?);
        }
        Ok(r)
    }

    pub fn neg(&self) -> Result<Poly> {
        self.scale(Q::int(-1))
    }

    pub fn sub(&self, o: &Poly) -> Result<Poly> {
        self.add(&o.neg()?)
    }

    pub fn mul(&self, o: &Poly) -> Result<Poly> {
        let mut r = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.insert_add(m, c1.mul(*c2)?)?;
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Result<Poly> {
        let mut r = Poly::one(self.nvars);
        for _ in 0..e {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Substitute `w_i -> -w_i`.
    pub fn reflect(&self) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let odd = m.iter().sum::<u32>() % 2 == 1;
            r.terms.insert(m.clone(), if odd { Q(-c.0) } else { *c });
        }
        r
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64() * m.iter().zip(w).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_exact(&self, w: &[Q]) -> Result<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = *c;
            for (&e, &x) in m.iter().zip(w) {
                t = t.mul(x.pow(e)?)?;
            }
            acc = acc.add(t)?;
        }
        Ok(acc)
    }

    /// Convert an expression in the named variables into a polynomial.
    /// Constants must be exactly representable by small rationals.
    pub fn from_expr(e: &Expr, vars: &[&str]) -> Result<Poly> {
        let n = vars.len();
        let fail = |why: &str| Error::NonPolynomial(format!("{why} in `{e}`"));
        Ok(match e.node() {
            Node::Const(c) => {
                Poly::constant(n, Q::from_f64(*c).ok_or_else(|| fail("irrational constant"))?)
            }
            Node::Var(name) => {
                let i = vars.iter().position(|v| *v == &**name).ok_or_else(|| fail("foreign variable"))?;
                Poly::var(n, i)
            }
            Node::Add(a, b) => Poly::from_expr(a, vars)?.add(&Poly::from_expr(b, vars)?)?,
            Node::Mul(a, b) => Poly::from_expr(a, vars)?.mul(&Poly::from_expr(b, vars)?)?,
            Node::Neg(a) => Poly::from_expr(a, vars)?.neg()?,
            Node::Div(a, b) => {
                let den = Poly::from_expr(b, vars)?
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| fail("division by a non-constant"))?;
                Poly::from_expr(a, vars)?.scale(Q::one().div(den)?)?
            }
            Node::Pow(a, b) => {
                let k = b
                    .as_const()
                    .filter(|k| k.fract() == 0.0 && *k >= 0.0 && *k <= 64.0)
                    .ok_or_else(|| fail("non-integer power"))?;
                Poly::from_expr(a, vars)?.pow(k as u32)?
            }
            Node::Call(..) => return Err(fail("function call")),
        })
    }

    pub fn to_expr(&self, vars: &[&str]) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut t = Expr::constant(c.to_f64());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = Expr::mul(t, Expr::powi(Expr::var(vars[i]), e as i32));
                }
            }
            out = Expr::add(out, t);
        }
        out
    }

    /// Text form using `w1..wn` and exact coefficients.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            if m.iter().all(|&e| e == 0) || *c != Q::one() {
                factors.push(if c.denom() == 1 { c.to_string() } else { format!("({c})") });
            }
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("w{}", i + 1)),
                    _ => factors.push(format!("w{}^{}", i + 1, e)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d).unwrap()
    }

    #[test]
    fn detects_polynomials() {
        let p = Poly::from_expr(&parse("w1/2 + w2/2 + w1*w2/6").unwrap(), &["w1", "w2"]).unwrap();
        assert_eq!(p.coeff(&[1, 0]), q(1, 2));
        assert_eq!(p.coeff(&[1, 1]), q(1, 6));
        assert_eq!(p.degree(), 2);
        assert!(Poly::from_expr(&parse("sin(w1)").unwrap(), &["w1"]).is_err());
        assert!(Poly::from_expr(&parse("w1/w1").unwrap(), &["w1"]).is_err());
        assert!(Poly::from_expr(&parse("w1 + x").unwrap(), &["w1"]).is_err());
    }

    #[test]
    fn exact_algebra() {
        let w = Poly::var(1, 0);
        let a = w.add(&Poly::one(1)).unwrap();
        let b = w.sub(&Poly::one(1)).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, w.pow(2).unwrap().sub(&Poly::one(1)).unwrap());
        assert_eq!(prod.reflect(), prod);
    }

    #[test]
    fn expression_round_trip() {
        let p = Poly::from_expr(&parse("3*w1^2 - w1/4").unwrap(), &["w1"]).unwrap();
        let e = p.to_expr(&["w1"]);
        assert_eq!(Poly::from_expr(&e, &["w1"]).unwrap(), p);
        assert_eq!(p.eval_exact(&[Q::int(2)]).unwrap(), q(23, 2));
    }
}
