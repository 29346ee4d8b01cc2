use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Built-in functions. `Ramp(k)` is the k-th derivative of the smooth step
/// `3t^2 - 2t^3` (clamped to 0 and 1 outside `[0,1]`) multiplying its second
/// argument; the second argument is never evaluated where the gate is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
    Tanh,
    Jb,
    Ramp(u8),
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
            Func::Tanh => "tanh",
            Func::Jb => "jb",
            Func::Ramp(0) => "ramp",
            Func::Ramp(1) => "ramp1",
            Func::Ramp(2) => "ramp2",
            Func::Ramp(_) => "ramp3",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "atan" => Func::Atan,
            "tanh" => Func::Tanh,
            "jb" => Func::Jb,
            "ramp" => Func::Ramp(0),
            "ramp1" => Func::Ramp(1),
            "ramp2" => Func::Ramp(2),
            "ramp3" => Func::Ramp(3),
            _ => return None,
        })
    }

    /// `(min, max)` argument count.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Func::Jb => (1, usize::MAX),
            Func::Ramp(_) => (2, 2),
            _ => (1, 1),
        }
    }
}

/// k-th derivative of the smooth step, evaluated pointwise.
pub fn ramp_weight(k: u8, t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    match k {
        0 => t * t * (3.0 - 2.0 * t),
        1 => 6.0 * t * (1.0 - t),
        2 => 6.0 - 12.0 * t,
        3 => -12.0,
        _ => 0.0,
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Arc<str>),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Neg(Expr),
    Call(Func, Vec<Expr>),
}

/// Immutable, cheaply clonable expression DAG.
#[derive(Clone)]
pub struct Expr(pub(crate) Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self)
    }
}

pub(crate) fn key(e: &Expr) -> usize {
    Arc::as_ptr(&e.0) as usize
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn raw(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::raw(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(name: &str) -> Expr {
        Expr::raw(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::raw(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(a, Expr::neg(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::zero(),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::raw(Node::Mul(a, b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(x), _) if x == 0.0 => Expr::zero(),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::raw(Node::Div(a, b)),
        }
    }

    pub fn pow(b: Expr, e: Expr) -> Expr {
        match (b.as_const(), e.as_const()) {
            (_, Some(y)) if y == 0.0 => Expr::one(),
            (_, Some(y)) if y == 1.0 => b,
            (Some(x), Some(y)) => {
                let v = x.powf(y);
                if v.is_finite() {
                    Expr::constant(v)
                } else {
                    Expr::raw(Node::Pow(b, e))
                }
            }
            _ => Expr::raw(Node::Pow(b, e)),
        }
    }

    pub fn powi(b: Expr, n: i32) -> Expr {
        Expr::pow(b, Expr::constant(n as f64))
    }

    pub fn neg(a: Expr) -> Expr {
        match &*a.0 {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::raw(Node::Neg(a)),
        }
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        if let Func::Ramp(k) = f {
            if k > 3 {
                return Expr::zero();
            }
            if args[1].is_zero() {
                return Expr::zero();
            }
            if let Some(t) = args[0].as_const() {
                let g = ramp_weight(k, t);
                return Expr::mul(Expr::constant(g), args[1].clone());
            }
            return Expr::raw(Node::Call(f, args));
        }
        if args.iter().all(|a| a.as_const().is_some()) {
            let vals: Vec<f64> = args.iter().map(|a| a.as_const().unwrap()).collect();
            if let Ok(v) = super::eval::apply_func(f, &vals) {
                if v.is_finite() {
                    return Expr::constant(v);
                }
            }
        }
        Expr::raw(Node::Call(f, args))
    }

    pub fn call1(f: Func, a: Expr) -> Expr {
        Expr::call(f, vec![a])
    }

    /// Sum of a list (0 when empty), folded left to right.
    pub fn sum<I: IntoIterator<Item = Expr>>(it: I) -> Expr {
        it.into_iter().fold(Expr::zero(), Expr::add)
    }

    pub fn product<I: IntoIterator<Item = Expr>>(it: I) -> Expr {
        it.into_iter().fold(Expr::one(), Expr::mul)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => vec![a, b],
            Node::Neg(a) => vec![a],
            Node::Call(_, args) => args.iter().collect(),
        }
    }

    /// Free variable names, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(key(e)) {
                continue;
            }
            if let Node::Var(name) = &*e.0 {
                out.insert(name.to_string());
            }
            stack.extend(e.children());
        }
        out
    }

    pub fn depends_on(&self, var: &str) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(key(e)) {
                continue;
            }
            if let Node::Var(name) = &*e.0 {
                if &**name == var {
                    return true;
                }
            }
            stack.extend(e.children());
        }
        false
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if seen.insert(key(e)) {
                stack.extend(e.children());
            }
        }
        seen.len()
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        subst_rec(self, map, &mut memo)
    }

    pub fn substitute_pairs(&self, pairs: &[(&str, Expr)]) -> Expr {
        let map: HashMap<String, Expr> =
            pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self.substitute(&map)
    }

    /// Rename variables (a substitution by variables).
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Expr {
        let map: HashMap<String, Expr> =
            pairs.iter().map(|(k, v)| (k.to_string(), Expr::var(v))).collect();
        self.substitute(&map)
    }

    /// Rebuild bottom-up through the smart constructors (constant folding, 0/1 elimination).
    pub fn fold(&self) -> Expr {
        self.substitute(&HashMap::new())
    }
}

fn subst_rec(e: &Expr, map: &HashMap<String, Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(r) = memo.get(&key(e)) {
        return r.clone();
    }
    let r = match &*e.0 {
        Node::Const(c) => Expr::constant(*c),
        Node::Var(name) => map.get(&**name).cloned().unwrap_or_else(|| e.clone()),
        Node::Add(a, b) => Expr::add(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Mul(a, b) => Expr::mul(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Div(a, b) => Expr::div(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Pow(a, b) => Expr::pow(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Neg(a) => Expr::neg(subst_rec(a, map, memo)),
        Node::Call(f, args) => {
            Expr::call(*f, args.iter().map(|a| subst_rec(a, map, memo)).collect())
        }
    };
    memo.insert(key(e), r.clone());
    r
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::add(self, o)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::sub(self, o)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::mul(self, o)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        Expr::div(self, o)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_fold() {
        let x = Expr::var("x");
        assert_eq!(Expr::add(Expr::zero(), x.clone()), x);
        assert!(Expr::mul(Expr::zero(), x.clone()).is_zero());
        assert_eq!(Expr::mul(Expr::one(), x.clone()), x);
        assert_eq!(Expr::add(2.0.into(), 3.0.into()).as_const(), Some(5.0));
        assert_eq!(Expr::neg(Expr::neg(x.clone())), x);
    }

    #[test]
    fn ramp_gate_is_lazy_on_constants() {
        let e = Expr::call(Func::Ramp(0), vec![Expr::constant(-1.0), Expr::var("q")]);
        assert!(e.is_zero());
        let e = Expr::call(Func::Ramp(1), vec![Expr::constant(2.0), Expr::var("q")]);
        assert!(e.is_zero());
    }

    #[test]
    fn variables_and_counts() {
        let x = Expr::var("x");
        let e = Expr::mul(Expr::add(x.clone(), Expr::var("k")), Expr::add(x.clone(), Expr::var("k")));
        let vars: Vec<String> = e.variables().into_iter().collect();
        assert_eq!(vars, vec!["k", "x"]);
        assert!(e.depends_on("k"));
        assert!(!e.depends_on("y"));
    }

    #[test]
    fn ramp_weights() {
        assert_eq!(ramp_weight(0, 0.5), 0.5);
        assert_eq!(ramp_weight(0, 3.0), 1.0);
        assert_eq!(ramp_weight(1, 0.5), 1.5);
        assert_eq!(ramp_weight(3, -0.5), 0.0);
    }
}
