//! Canonical variable names: `x1..xn`, `y1..yn`, `k1..kn`, `w1..wn`.

use crate::error::{Error, Result};
use crate::symexpr::Expr;

pub fn names(prefix: char, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Rewrite the one-dimensional aliases `x, y, k, w` to `x1, y1, k1, w1`.
pub fn canonicalize(e: &Expr, n: usize) -> Expr {
    if n != 1 {
        return e.clone();
    }
    e.rename(&[("x", "x1"), ("y", "y1"), ("k", "k1"), ("w", "w1")])
}

/// Check that every free variable of `e` is one of the allowed prefixed names.
pub fn check_vocabulary(e: &Expr, n: usize, prefixes: &[char], what: &str) -> Result<()> {
    for v in e.variables() {
        let ok = prefixes.iter().any(|&p| names(p, n).contains(&v));
        if !ok {
            let allowed: Vec<String> = prefixes.iter().flat_map(|&p| names(p, n)).collect();
            return Err(Error::DimensionMismatch(format!(
                "{what} uses variable `{v}`; expected only {}",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    #[test]
    fn aliases() {
        let e = canonicalize(&parse("x*k + w").unwrap(), 1);
        assert_eq!(e.to_string(), "x1*k1 + w1");
        assert!(check_vocabulary(&e, 1, &['x', 'k', 'w'], "symbol").is_ok());
        assert!(check_vocabulary(&e, 1, &['x', 'k'], "symbol").is_err());
    }
}
