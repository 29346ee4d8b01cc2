//! Flat straight-line programs for fast repeated evaluation.
//!
//! Common subexpressions are merged structurally. Domain violations yield NaN
//! instead of an error so that evaluation stays branch-free; a ramp gate whose
//! weight is zero discards a NaN payload.

use std::collections::HashMap;

use super::eval::apply_pow;
use super::expr::{key, ramp_weight, Expr, Func, Node};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Op {
    Const(u64),
    Var(usize),
    Add(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, usize),
    PowI(usize, i32),
    Neg(usize),
    Call(Func, Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    n_vars: usize,
}

struct Builder<'a> {
    vars: &'a [&'a str],
    ops: Vec<Op>,
    interned: HashMap<Op, usize>,
    by_ptr: HashMap<usize, usize>,
}

impl Builder<'_> {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.interned.get(&op) {
            return i;
        }
        let i = self.ops.len();
        self.ops.push(op.clone());
        self.interned.insert(op, i);
        i
    }

    fn build(&mut self, e: &Expr) -> Result<usize> {
        if let Some(&i) = self.by_ptr.get(&key(e)) {
            return Ok(i);
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(c.to_bits()),
            Node::Var(name) => {
                let slot = self
                    .vars
                    .iter()
                    .position(|v| *v == &**name)
                    .ok_or_else(|| Error::UnboundVariable(name.to_string()))?;
                Op::Var(slot)
            }
            Node::Add(a, b) => Op::Add(self.build(a)?, self.build(b)?),
            Node::Mul(a, b) => Op::Mul(self.build(a)?, self.build(b)?),
            Node::Div(a, b) => Op::Div(self.build(a)?, self.build(b)?),
            Node::Pow(a, b) => {
                let base = self.build(a)?;
                match b.as_const() {
                    Some(c) if c.fract() == 0.0 && c.abs() <= 64.0 => Op::PowI(base, c as i32),
                    _ => Op::Pow(base, self.build(b)?),
                }
            }
            Node::Neg(a) => Op::Neg(self.build(a)?),
            Node::Call(f, args) => {
                let slots = args.iter().map(|a| self.build(a)).collect::<Result<Vec<_>>>()?;
                Op::Call(*f, slots)
            }
        };
        let i = self.push(op);
        self.by_ptr.insert(key(e), i);
        Ok(i)
    }
}

impl Program {
    /// Compile several outputs sharing one instruction list. Every free
    /// variable must appear in `vars`; its position is its input slot.
    pub fn compile(exprs: &[&Expr], vars: &[&str]) -> Result<Program> {
        let mut b = Builder { vars, ops: Vec::new(), interned: HashMap::new(), by_ptr: HashMap::new() };
        let outputs = exprs.iter().map(|e| b.build(e)).collect::<Result<Vec<_>>>()?;
        Ok(Program { ops: b.ops, outputs, n_vars: vars.len() })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluate every output. `scratch` is reused between calls.
    pub fn run(&self, inputs: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        debug_assert_eq!(inputs.len(), self.n_vars);
        scratch.clear();
        scratch.reserve(self.ops.len());
        for op in &self.ops {
            let r = |i: &usize| scratch[*i];
            let v = match op {
                Op::Const(bits) => f64::from_bits(*bits),
                Op::Var(s) => inputs[*s],
                Op::Add(a, b) => r(a) + r(b),
                Op::Mul(a, b) => r(a) * r(b),
                Op::Div(a, b) => {
                    let d = r(b);
                    if d == 0.0 {
                        f64::NAN
                    } else {
                        r(a) / d
                    }
                }
                Op::PowI(a, n) => {
                    let x = r(a);
                    if x == 0.0 && *n < 0 {
                        f64::NAN
                    } else {
                        x.powi(*n)
                    }
                }
                Op::Pow(a, b) => apply_pow(r(a), r(b)).unwrap_or(f64::NAN),
                Op::Neg(a) => -r(a),
                Op::Call(Func::Ramp(k), args) => {
                    let g = ramp_weight(*k, r(&args[0]));
                    if g == 0.0 {
                        0.0
                    } else {
                        g * r(&args[1])
                    }
                }
                Op::Call(Func::Jb, args) => (1.0 + args.iter().map(|i| r(i) * r(i)).sum::<f64>()).sqrt(),
                Op::Call(f, args) => {
                    let x = r(&args[0]);
                    match f {
                        Func::Sin => x.sin(),
                        Func::Cos => x.cos(),
                        Func::Tan => x.tan(),
                        Func::Exp => x.exp(),
                        Func::Log => {
                            if x <= 0.0 {
                                f64::NAN
                            } else {
                                x.ln()
                            }
                        }
                        Func::Sqrt => {
                            if x < 0.0 {
                                f64::NAN
                            } else {
                                x.sqrt()
                            }
                        }
                        Func::Atan => x.atan(),
                        Func::Tanh => x.tanh(),
                        Func::Jb | Func::Ramp(_) => unreachable!(),
                    }
                }
            };
            scratch.push(v);
        }
        for (o, &i) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[i];
        }
    }

    /// Single-output convenience; non-finite results become domain errors.
    pub fn eval1(&self, inputs: &[f64]) -> Result<f64> {
        let mut scratch = Vec::new();
        let mut out = [0.0];
        self.run(inputs, &mut scratch, &mut out);
        if out[0].is_finite() {
            Ok(out[0])
        } else {
            Err(Error::Domain(format!("non-finite value at {inputs:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;

    #[test]
    fn matches_tree_evaluation() {
        let e = parse("sin(x)*exp(-(k^2)) + jb(x, k)/(1 + x^2) - x^0.5*ramp(k, 3)").unwrap();
        let p = Program::compile(&[&e], &["x", "k"]).unwrap();
        for &(x, k) in &[(0.3, 0.1), (2.0, 0.7), (1.0, 4.0)] {
            let want = e.eval_at(&[("x", x), ("k", k)]).unwrap();
            assert_eq!(p.eval1(&[x, k]).unwrap(), want);
        }
    }

    #[test]
    fn shares_common_subexpressions() {
        let e = parse("sin(x + 1)*sin(x + 1) + sin(x + 1)").unwrap();
        let p = Program::compile(&[&e], &["x"]).unwrap();
        // x, 1, x+1, sin, product, sum
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn unbound_variables_fail_at_compile_time() {
        let e = parse("x + y").unwrap();
        assert!(matches!(Program::compile(&[&e], &["x"]), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn domain_errors_surface_as_errors() {
        let e = parse("log(x)").unwrap();
        let p = Program::compile(&[&e], &["x"]).unwrap();
        assert!(p.eval1(&[-1.0]).is_err());
    }
}
