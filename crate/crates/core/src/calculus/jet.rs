//! Polynomials in the derivatives of a symbol `s`, of the cutoff `χ` and in `1/s`.
//!
//! Repeated symbolic differentiation of quotients grows expression trees
//! exponentially; here the product and quotient rules act on monomials and a
//! symbol is only built once at the end.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::Result;
use crate::symbol::ComplexSymbol;
use crate::symexpr::{Expr, Func, Node};
use crate::vars;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Var {
    X(usize),
    K(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Factor {
    /// `∂_x^a ∂_ξ^b s`, stored as `a` followed by `b`.
    S(Vec<u32>),
    /// `∂_ξ^b χ`.
    C(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Mono {
    /// Power of `1/s`.
    r: u32,
    f: Vec<Factor>,
}

impl Mono {
    fn normalize(mut self, n: usize) -> Mono {
        self.f.sort();
        let plain = Factor::S(vec![0; 2 * n]);
        while self.r > 0 {
            match self.f.iter().position(|g| *g == plain) {
                Some(i) => {
                    self.f.remove(i);
                    self.r -= 1;
                }
                None => break,
            }
        }
        self
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Jet {
    n: usize,
    terms: BTreeMap<Mono, Complex64>,
}

impl Jet {
    pub fn zero(n: usize) -> Jet {
        Jet { n, terms: BTreeMap::new() }
    }

    fn mono(n: usize, m: Mono) -> Jet {
        let mut j = Jet::zero(n);
        j.push(m, Complex64::new(1.0, 0.0));
        j
    }

    pub fn recip(n: usize) -> Jet {
        Jet::mono(n, Mono { r: 1, f: vec![] })
    }

    pub fn factor(n: usize, f: Factor) -> Jet {
        Jet::mono(n, Mono { r: 0, f: vec![f] })
    }

    fn push(&mut self, m: Mono, c: Complex64) {
        let m = m.normalize(self.n);
        let v = self.terms.get(&m).copied().unwrap_or_default() + c;
        if v == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add_scaled(&mut self, o: &Jet, c: Complex64) {
        for (m, v) in &o.terms {
            self.push(m.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: Complex64) -> Jet {
        let mut out = Jet::zero(self.n);
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut out = Jet::zero(self.n);
        for (a, u) in &self.terms {
            for (b, v) in &o.terms {
                let mut f = a.f.clone();
                f.extend(b.f.iter().cloned());
                out.push(Mono { r: a.r + b.r, f }, u * v);
            }
        }
        out
    }

    pub fn diff(&self, v: Var) -> Jet {
        let n = self.n;
        let slot = match v {
            Var::X(i) => i,
            Var::K(i) => n + i,
        };
        let mut out = Jet::zero(n);
        for (m, c) in &self.terms {
            if m.r > 0 {
                let mut unit = vec![0; 2 * n];
                unit[slot] = 1;
                let mut f = m.f.clone();
                f.push(Factor::S(unit));
                out.push(Mono { r: m.r + 1, f }, c * -(m.r as f64));
            }
            for (i, g) in m.f.iter().enumerate() {
                let dg = match (g, v) {
                    (Factor::S(a), _) => {
                        let mut a = a.clone();
                        a[slot] += 1;
                        Factor::S(a)
                    }
                    (Factor::C(b), Var::K(j)) => {
                        let mut b = b.clone();
                        b[j] += 1;
                        Factor::C(b)
                    }
                    (Factor::C(_), Var::X(_)) => continue,
                };
                let mut f = m.f.clone();
                f[i] = dg;
                out.push(Mono { r: m.r, f }, *c);
            }
        }
        out
    }

    pub fn diff_multi(&self, x: &[u32], k: &[u32]) -> Jet {
        let mut out = self.clone();
        for (i, &a) in x.iter().enumerate() {
            for _ in 0..a {
                out = out.diff(Var::X(i));
            }
        }
        for (i, &b) in k.iter().enumerate() {
            for _ in 0..b {
                out = out.diff(Var::K(i));
            }
        }
        out
    }
}

/// Builds symbols from jets of a fixed `s` and cutoff `χ`.
pub(crate) struct Atoms {
    n: usize,
    s: ComplexSymbol,
    chi: Option<Expr>,
    s_cache: HashMap<Vec<u32>, ComplexSymbol>,
    c_cache: HashMap<Vec<u32>, Expr>,
    r_pows: Vec<ComplexSymbol>,
}

impl Atoms {
    pub fn new(n: usize, s: ComplexSymbol, chi: Option<Expr>) -> Atoms {
        let r = s.recip();
        Atoms { n, s, chi, s_cache: HashMap::new(), c_cache: HashMap::new(), r_pows: vec![ComplexSymbol::one(), r] }
    }

    fn s_jet(&mut self, a: &[u32]) -> Result<ComplexSymbol> {
        if let Some(v) = self.s_cache.get(a) {
            return Ok(v.clone());
        }
        let mut names = vars::names('x', self.n);
        names.extend(vars::names('k', self.n));
        let v = self.s.diff_multi(&names, a)?;
        self.s_cache.insert(a.to_vec(), v.clone());
        Ok(v)
    }

    fn c_jet(&mut self, b: &[u32]) -> Result<Expr> {
        if let Some(v) = self.c_cache.get(b) {
            return Ok(v.clone());
        }
        let chi = self.chi.clone().expect("cutoff factor without a cutoff");
        let mut v = chi;
        for (i, name) in vars::names('k', self.n).iter().enumerate() {
            for _ in 0..b[i] {
                v = v.diff(name)?;
            }
        }
        self.c_cache.insert(b.to_vec(), v.clone());
        Ok(v)
    }

    fn r_pow(&mut self, p: u32) -> ComplexSymbol {
        while self.r_pows.len() <= p as usize {
            let next = self.r_pows.last().unwrap().mul(&self.r_pows[1]);
            self.r_pows.push(next);
        }
        self.r_pows[p as usize].clone()
    }

    pub fn build(&mut self, jet: &Jet) -> Result<ComplexSymbol> {
        let mut acc = ComplexSymbol::zero();
        for (m, c) in &jet.terms {
            let mut rest = self.r_pow(m.r).scale(*c);
            let mut guard = None;
            for g in &m.f {
                match g {
                    Factor::S(a) => rest = rest.mul(&self.s_jet(a)?),
                    Factor::C(b) => {
                        let e = self.c_jet(b)?;
                        match guard {
                            None => guard = Some(e),
                            Some(_) => rest = rest.scale_real(e),
                        }
                    }
                }
            }
            let term = match guard {
                Some(e) => push_into(&e, &rest),
                None => rest,
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

/// `e · rest`, moving `rest` inside ramp calls so that values of `rest` where
/// the ramp weight vanishes are never evaluated.
fn push_into(e: &Expr, rest: &ComplexSymbol) -> ComplexSymbol {
    match e.node() {
        Node::Add(a, b) => push_into(a, rest).add(&push_into(b, rest)),
        Node::Neg(a) => push_into(a, rest).neg(),
        Node::Call(Func::Ramp(k), args) => {
            let wrap = |p: &Expr| Expr::call(Func::Ramp(*k), vec![args[0].clone(), Expr::mul(args[1].clone(), p.clone())]);
            ComplexSymbol::new(wrap(&rest.re), wrap(&rest.im))
        }
        _ => rest.scale_real(e.clone()),
    }
}
