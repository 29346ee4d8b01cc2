use std::collections::HashMap;

use super::expr::{key, ramp_weight, Expr, Func, Node};
use crate::error::{Error, Result};

/// Variable name to value.
pub type Binding = HashMap<String, f64>;

pub fn binding(pairs: &[(&str, f64)]) -> Binding {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub(crate) fn apply_func(f: Func, a: &[f64]) -> Result<f64> {
    let x = a[0];
    Ok(match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("log of non-positive value {x}")));
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(Error::Domain(format!("sqrt of negative value {x}")));
            }
            x.sqrt()
        }
        Func::Atan => x.atan(),
        Func::Tanh => x.tanh(),
        Func::Jb => (1.0 + a.iter().map(|v| v * v).sum::<f64>()).sqrt(),
        Func::Ramp(k) => ramp_weight(k, x) * a[1],
    })
}

pub(crate) fn apply_pow(b: f64, e: f64) -> Result<f64> {
    if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        if b == 0.0 && e < 0.0 {
            return Err(Error::Domain("zero raised to a negative power".into()));
        }
        return Ok(b.powi(e as i32));
    }
    if b < 0.0 {
        return Err(Error::Domain(format!("negative base {b} with non-integer exponent {e}")));
    }
    if b == 0.0 && e < 0.0 {
        return Err(Error::Domain("zero raised to a negative power".into()));
    }
    Ok(b.powf(e))
}

fn eval_rec(e: &Expr, b: &Binding, memo: &mut HashMap<usize, f64>) -> Result<f64> {
    if let Some(v) = memo.get(&key(e)) {
        return Ok(*v);
    }
    let v = match e.node() {
        Node::Const(c) => *c,
        Node::Var(name) => *b.get(&**name).ok_or_else(|| Error::UnboundVariable(name.to_string()))?,
        Node::Add(x, y) => eval_rec(x, b, memo)? + eval_rec(y, b, memo)?,
        Node::Mul(x, y) => eval_rec(x, b, memo)? * eval_rec(y, b, memo)?,
        Node::Div(x, y) => {
            let num = eval_rec(x, b, memo)?;
            let den = eval_rec(y, b, memo)?;
            if den == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            num / den
        }
        Node::Pow(x, y) => {
            let base = eval_rec(x, b, memo)?;
            let exp = eval_rec(y, b, memo)?;
            apply_pow(base, exp)?
        }
        Node::Neg(x) => -eval_rec(x, b, memo)?,
        Node::Call(Func::Ramp(k), args) => {
            let g = ramp_weight(*k, eval_rec(&args[0], b, memo)?);
            if g == 0.0 {
                0.0
            } else {
                g * eval_rec(&args[1], b, memo)?
            }
        }
        Node::Call(f, args) => {
            let vals = args.iter().map(|a| eval_rec(a, b, memo)).collect::<Result<Vec<_>>>()?;
            apply_func(*f, &vals)?
        }
    };
    memo.insert(key(e), v);
    Ok(v)
}

impl Expr {
    /// Evaluate under a binding. Unbound variables and domain violations are errors.
    pub fn eval(&self, b: &Binding) -> Result<f64> {
        let mut memo = HashMap::new();
        eval_rec(self, b, &mut memo)
    }

    pub fn eval_at(&self, pairs: &[(&str, f64)]) -> Result<f64> {
        self.eval(&binding(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;
    use std::f64::consts::PI;

    fn ev(s: &str, pairs: &[(&str, f64)]) -> Result<f64> {
        parse(s).unwrap().eval_at(pairs)
    }

    #[test]
    fn documented_values() {
        assert_eq!(ev("k^2", &[("k", 3.0)]).unwrap(), 9.0);
        assert_eq!(ev("jb(k1,k2)", &[("k1", 0.0), ("k2", 0.0)]).unwrap(), 1.0);
        assert_eq!(ev("exp(x)-1", &[("x", 0.0)]).unwrap(), 0.0);
        assert_eq!(ev("jb(k)", &[("k", 0.0)]).unwrap(), 1.0);
        assert_eq!(ev("sin(x)*cos(k)", &[("x", PI / 2.0), ("k", 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(ev("x + y", &[("x", 1.0)]), Err(Error::UnboundVariable("y".into())));
        assert!(matches!(ev("log(x)", &[("x", 0.0)]), Err(Error::Domain(_))));
        assert!(matches!(ev("sqrt(x)", &[("x", -1.0)]), Err(Error::Domain(_))));
        assert!(matches!(ev("1/x", &[("x", 0.0)]), Err(Error::Domain(_))));
        assert!(matches!(ev("x^0.5", &[("x", -2.0)]), Err(Error::Domain(_))));
        assert_eq!(ev("x^3", &[("x", -2.0)]).unwrap(), -8.0);
    }

    #[test]
    fn ramp_skips_its_payload_when_gated_off() {
        assert_eq!(ev("ramp(t, log(x))", &[("t", -1.0), ("x", -1.0)]).unwrap(), 0.0);
        assert!(ev("ramp(t, log(x))", &[("t", 0.5), ("x", -1.0)]).is_err());
    }
}
