use std::collections::HashMap;

use super::expr::{key, Expr, Func, Node};
use crate::error::{Error, Result};

struct Differ<'a> {
    var: &'a str,
    memo: HashMap<usize, Expr>,
}

impl Differ<'_> {
    fn d(&mut self, e: &Expr) -> Result<Expr> {
        if let Some(r) = self.memo.get(&key(e)) {
            return Ok(r.clone());
        }
        let r = self.rule(e)?;
        self.memo.insert(key(e), r.clone());
        Ok(r)
    }

    fn rule(&mut self, e: &Expr) -> Result<Expr> {
        Ok(match e.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(name) => {
                if &**name == self.var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => Expr::add(self.d(a)?, self.d(b)?),
            Node::Neg(a) => Expr::neg(self.d(a)?),
            Node::Mul(a, b) => {
                let (da, db) = (self.d(a)?, self.d(b)?);
                Expr::add(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db))
            }
            Node::Div(a, b) => {
                let (da, db) = (self.d(a)?, self.d(b)?);
                let first = Expr::div(da, b.clone());
                if db.is_zero() {
                    first
                } else {
                    // u/v * v'/v keeps the denominator from squaring at every level.
                    let second = Expr::mul(Expr::div(a.clone(), b.clone()), Expr::div(db, b.clone()));
                    Expr::sub(first, second)
                }
            }
            Node::Pow(b, x) => {
                if x.depends_on(self.var) {
                    return Err(Error::NonConstantExponent(self.var.to_string()));
                }
                let db = self.d(b)?;
                if db.is_zero() {
                    return Ok(Expr::zero());
                }
                let lowered = match x.as_const() {
                    Some(c) => Expr::constant(c - 1.0),
                    None => Expr::sub(x.clone(), Expr::one()),
                };
                Expr::mul(Expr::mul(x.clone(), Expr::pow(b.clone(), lowered)), db)
            }
            Node::Call(Func::Jb, args) => {
                let mut num = Expr::zero();
                for a in args {
                    let da = self.d(a)?;
                    num = Expr::add(num, Expr::mul(a.clone(), da));
                }
                Expr::div(num, e.clone())
            }
            Node::Call(Func::Ramp(k), args) => {
                let (t, p) = (&args[0], &args[1]);
                let (dt, dp) = (self.d(t)?, self.d(p)?);
                let moved = if *k >= 3 {
                    Expr::zero()
                } else {
                    Expr::call(Func::Ramp(k + 1), vec![t.clone(), Expr::mul(dt, p.clone())])
                };
                let kept = Expr::call(Func::Ramp(*k), vec![t.clone(), dp]);
                Expr::add(moved, kept)
            }
            Node::Call(f, args) => {
                let u = &args[0];
                let du = self.d(u)?;
                if du.is_zero() {
                    return Ok(Expr::zero());
                }
                let outer = match f {
                    Func::Sin => Expr::call1(Func::Cos, u.clone()),
                    Func::Cos => Expr::neg(Expr::call1(Func::Sin, u.clone())),
                    Func::Tan => Expr::div(Expr::one(), Expr::powi(Expr::call1(Func::Cos, u.clone()), 2)),
                    Func::Exp => e.clone(),
                    Func::Log => Expr::div(Expr::one(), u.clone()),
                    Func::Sqrt => Expr::div(Expr::constant(0.5), e.clone()),
                    Func::Atan => Expr::div(Expr::one(), Expr::add(Expr::one(), Expr::powi(u.clone(), 2))),
                    Func::Tanh => Expr::sub(Expr::one(), Expr::powi(e.clone(), 2)),
                    Func::Jb | Func::Ramp(_) => unreachable!(),
                };
                Expr::mul(outer, du)
            }
        })
    }
}

impl Expr {
    /// Exact symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Result<Expr> {
        Differ { var, memo: HashMap::new() }.d(self)
    }

    /// Repeated derivative `d^n/dvar^n`.
    pub fn diff_n(&self, var: &str, n: u32) -> Result<Expr> {
        let mut e = self.clone();
        for _ in 0..n {
            if e.is_zero() {
                break;
            }
            e = e.diff(var)?;
        }
        Ok(e)
    }

    /// Mixed derivative over several variables with per-variable orders.
    pub fn diff_multi(&self, vars: &[String], orders: &[u32]) -> Result<Expr> {
        let mut e = self.clone();
        for (v, &n) in vars.iter().zip(orders) {
            e = e.diff_n(v, n)?;
        }
        Ok(e)
    }
}
