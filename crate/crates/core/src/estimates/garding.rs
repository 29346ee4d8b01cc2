use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::discretize::{fourier_matrix, Grid};
use crate::error::{Error, Result};
use crate::quantize::op_symbol;
use crate::symbol::ComplexSymbol;
use crate::tau::QuantizingFunction;
use crate::vars;

#[derive(Clone, Debug, Serialize)]
pub struct GardingReport {
    pub m: f64,
    pub s: f64,
    /// Smallest lattice radius with `Re σ > 0` on the grid nodes for all `|ξ| ≥ r`.
    pub r: f64,
    /// `inf Re σ / (1+|ξ|)^{2m}` over the nodes with `|ξ| ≥ r`.
    pub hypothesis_constant: f64,
    pub c1: f64,
    pub c2: f64,
    pub fit_ok: bool,
    /// Smallest eigenvalue of `Λ_{2s}^{-1/2}(H − C₁Λ_{2m} + C₂Λ_{2s})Λ_{2s}^{-1/2}`.
    pub min_eigenvalue: f64,
    pub verified: bool,
}

fn min_eig(h: &DMatrix<Complex64>) -> f64 {
    // symmetrize against rounding before the Hermitian solver
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn sandwich(h: &DMatrix<Complex64>, d: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * (d[i] * d[j]))
}

/// Fit `C₁ > 0`, `C₂ ≥ 0` with `Re⟨Au,u⟩ ≥ C₁‖u‖²_{H^m} − C₂‖u‖²_{H^s}` on the grid.
pub fn garding_check(sigma: &ComplexSymbol, tau: &QuantizingFunction, m: f64, s: f64, g: &Grid) -> Result<GardingReport> {
    if !(s < m) {
        return Err(Error::Precondition(format!("need s < m, got s = {s}, m = {m}")));
    }
    let n = tau.dim();
    let a = op_symbol(sigma, tau, g)?;
    let f = fourier_matrix(g);
    let h = &f * ((&a.matrix + a.matrix.adjoint()) * Complex64::new(0.5, 0.0)) * f.adjoint();
    let size = g.size();
    let radius: Vec<f64> = (0..size).map(|q| g.freq(q).iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let bracket = |q: usize, p: f64| (1.0 + radius[q] * radius[q]).powf(p);

    // hypothesis probe on the lattice
    let mut names = vars::names('x', n);
    names.extend(vars::names('k', n));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let prog = sigma.compile(&refs)?;
    let mut scratch = Vec::new();
    let mut out = [0.0; 2];
    let mut shells: Vec<f64> = radius.clone();
    shells.sort_by(|a, b| a.partial_cmp(b).unwrap());
    shells.dedup();
    // worst ratio per lattice radius
    let mut worst = vec![f64::INFINITY; shells.len()];
    for q in 0..size {
        let si = shells.partition_point(|r| *r < radius[q]);
        for j in 0..size {
            let mut p = g.node(j);
            p.extend(g.freq(q));
            prog.run(&p, &mut scratch, &mut out);
            let v = out[0] / (1.0 + radius[q]).powf(2.0 * m);
            worst[si] = worst[si].min(if v.is_nan() { f64::NEG_INFINITY } else { v });
        }
    }
    let mut start = shells.len();
    while start > 0 && worst[start - 1] > 0.0 {
        start -= 1;
    }
    let (r, hyp) = if start < shells.len() {
        (shells[start], worst[start..].iter().cloned().fold(f64::INFINITY, f64::min))
    } else {
        (f64::INFINITY, 0.0)
    };

    let high: Vec<usize> = (0..size).filter(|&q| radius[q] >= r).collect();
    let c1 = if high.is_empty() {
        0.0
    } else {
        let d: Vec<f64> = high.iter().map(|&q| bracket(q, -m / 2.0)).collect();
        let sub = DMatrix::from_fn(high.len(), high.len(), |i, j| h[(high[i], high[j])] * (d[i] * d[j]));
        0.5 * min_eig(&sub)
    };
    let fit_ok = c1 > 0.0;
    let ds: Vec<f64> = (0..size).map(|q| bracket(q, -s / 2.0)).collect();
    let mut shifted = h.clone();
    for q in 0..size {
        shifted[(q, q)] -= Complex64::new(c1 * bracket(q, m), 0.0);
    }
    let c2 = (-min_eig(&sandwich(&shifted, &ds))).max(0.0);
    for q in 0..size {
        shifted[(q, q)] += Complex64::new(c2 * bracket(q, s), 0.0);
    }
    let min_eigenvalue = min_eig(&sandwich(&shifted, &ds));
    let scale = (0..size).map(|q| h[(q, q)].norm() * ds[q] * ds[q]).fold(1.0, f64::max);
    Ok(GardingReport {
        m,
        s,
        r,
        hypothesis_constant: hyp,
        c1,
        c2,
        fit_ok,
        min_eigenvalue,
        verified: fit_ok && min_eigenvalue >= -1e-9 * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::symbol1;

    #[test]
    fn identity_symbol() {
        let g = Grid::new(1, 32, std::f64::consts::PI).unwrap();
        let weyl = QuantizingFunction::preset("weyl", 1).unwrap();
        let r = garding_check(&ComplexSymbol::one(), &weyl, 0.0, -1.0, &g).unwrap();
        assert!((r.c1 - 0.5).abs() < 1e-12 && r.c2 == 0.0 && r.verified);
    }

    #[test]
    fn multiplier() {
        let g = Grid::new(1, 32, std::f64::consts::PI).unwrap();
        let weyl = QuantizingFunction::preset("weyl", 1).unwrap();
        let r = garding_check(&symbol1("1+k^2").unwrap(), &weyl, 1.0, 0.0, &g).unwrap();
        assert!((r.c1 - 0.5).abs() < 1e-10, "{}", r.c1);
        assert_eq!(r.c2, 0.0);
        assert!(r.verified);
        assert!(garding_check(&ComplexSymbol::one(), &weyl, 0.0, 0.0, &g).is_err());
    }

    #[test]
    fn non_positive_symbol_fails_fit() {
        let g = Grid::new(1, 16, std::f64::consts::PI).unwrap();
        let kn = QuantizingFunction::preset("kn", 1).unwrap();
        let r = garding_check(&symbol1("-1-k^2").unwrap(), &kn, 1.0, 0.0, &g).unwrap();
        assert!(!r.fit_ok && !r.verified);
    }
}
