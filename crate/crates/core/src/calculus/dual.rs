//! Transpose and adjoint of a quantized operator as a quantization with the dual function.

use std::collections::HashMap;

use crate::symbol::ComplexSymbol;
use crate::symexpr::Expr;
use crate::tau::QuantizingFunction;
use crate::vars;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualKind {
    Transpose,
    Adjoint,
}

/// `(σ(x, −ξ), τ*)` for the transpose and `(conj σ, τ*)` for the adjoint,
/// where `τ*(z) = z + τ(−z)`.
pub fn dual_quantization(
    sigma: &ComplexSymbol,
    tau: &QuantizingFunction,
    kind: DualKind,
) -> (ComplexSymbol, QuantizingFunction) {
    let s = match kind {
        DualKind::Adjoint => sigma.conj(),
        DualKind::Transpose => {
            let flip: HashMap<String, Expr> =
                vars::names('k', tau.dim()).into_iter().map(|k| (k.clone(), Expr::neg(Expr::var(&k)))).collect();
            sigma.substitute(&flip)
        }
    };
    (s, tau.dual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::Grid;
    use crate::quantize::{op_symbol, symbol1};

    #[test]
    fn dual_pairs() {
        let s = symbol1("x*k").unwrap();
        let kn = QuantizingFunction::preset("kn", 1).unwrap();
        let (a, t) = dual_quantization(&s, &kn, DualKind::Adjoint);
        assert_eq!(a, s);
        assert_eq!(t.name(), "akn");
        let weyl = QuantizingFunction::preset("weyl", 1).unwrap();
        assert_eq!(dual_quantization(&s, &weyl, DualKind::Adjoint).1.name(), "weyl");
    }

    #[test]
    fn matrices_match() {
        let g = Grid::new(1, 64, std::f64::consts::PI).unwrap();
        let s = ComplexSymbol::parse_symbol("cos(2*x)*exp(-((k/5)^2))", Some("sin(x)*k*exp(-((k/5)^2))/4"), 1).unwrap();
        let tau = QuantizingFunction::from_spec("w/2 + 0.1*sin(w)", 1).unwrap();
        let a = op_symbol(&s, &tau, &g).unwrap();
        let (sa, ta) = dual_quantization(&s, &tau, DualKind::Adjoint);
        assert!(op_symbol(&sa, &ta, &g).unwrap().max_diff(&a.adjoint()) < 1e-10);
        let (st, tt) = dual_quantization(&s, &tau, DualKind::Transpose);
        assert!(op_symbol(&st, &tt, &g).unwrap().max_diff(&a.transpose()) < 1e-10);
        // twice returns the original operator
        let (s2, t2) = dual_quantization(&sa, &ta, DualKind::Adjoint);
        assert!(op_symbol(&s2, &t2, &g).unwrap().max_diff(&a) < 1e-10);
    }
}
