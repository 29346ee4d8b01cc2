//! Amplitude reduction by integration by parts in the frequency variable.

use crate::error::{Error, Result};
use crate::symbol::ComplexSymbol;
use crate::symexpr::Expr;
use crate::vars;

use super::expansion::NODE_LIMIT;

/// `(1 − Δ_ξ)^N a / (1 + |w|²)^N`, with `w` the periodic difference `x − y`.
///
/// Both amplitudes define the same operator up to the frequency cutoff of the grid.
pub fn reduce_amplitude(a: &ComplexSymbol, n_red: u32, dim: usize) -> Result<ComplexSymbol> {
    if n_red == 0 {
        return Err(Error::Precondition("reduction order must be at least 1".into()));
    }
    a.check(dim, &['x', 'y', 'k', 'w'], "amplitude")?;
    let ks = vars::names('k', dim);
    let ws = vars::names('w', dim);
    let mut cur = a.clone();
    for _ in 0..n_red {
        let mut lap = ComplexSymbol::zero();
        for k in &ks {
            lap = lap.add(&cur.diff(k)?.diff(k)?);
        }
        cur = cur.sub(&lap);
        if cur.node_count() > NODE_LIMIT {
            return Err(Error::ExpressionTooLarge { limit: NODE_LIMIT });
        }
    }
    let bracket = ws
        .iter()
        .fold(Expr::one(), |acc, w| Expr::add(acc, Expr::powi(Expr::var(w), 2)));
    Ok(cur.scale_real(Expr::div(Expr::one(), Expr::powi(bracket, n_red as i32))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::Grid;
    use crate::quantize::op_amplitude;

    #[test]
    fn trivial_cases() {
        let one = ComplexSymbol::one();
        let r = reduce_amplitude(&one, 1, 1).unwrap();
        assert_eq!(r.re.to_string(), "1/(1 + w1^2)");
        let k = ComplexSymbol::parse_amplitude("k", None, 1).unwrap();
        let r = reduce_amplitude(&k, 1, 1).unwrap();
        let v = r.eval_at(&[("k1", 2.0), ("w1", 0.5)]).unwrap();
        assert!((v.re - 2.0 / 1.25).abs() < 1e-15);
        assert!(reduce_amplitude(&one, 0, 1).is_err());
    }

    #[test]
    fn reduced_amplitude_gives_same_operator() {
        let g = Grid::new(1, 64, std::f64::consts::PI).unwrap();
        let a = ComplexSymbol::parse_amplitude("cos(x)*sin(y)*exp(-((k/4)^2))", Some("k*exp(-((k/4)^2))/8"), 1).unwrap();
        let r = reduce_amplitude(&a, 2, 1).unwrap();
        let d = op_amplitude(&a, &g).unwrap().max_diff(&op_amplitude(&r, &g).unwrap());
        assert!(d < 1e-10, "{d}");
    }
}
