//! Leading symbol of a τ-quantized operator written as a Kohn–Nirenberg
//! operator composed with the change of variables `y ↦ τ_x⁻¹(y)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::discretize::{dft, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::quantize::{apply, op_symbol};
use crate::symbol::ComplexSymbol;
use crate::symexpr::Expr;
use crate::tau::QuantizingFunction;
use crate::vars;

#[derive(Clone, Debug, Serialize)]
pub struct ChangevarReport {
    pub tau: String,
    /// `L_xx`, the inverse Jacobian of τ at the origin.
    pub l_matrix: Vec<Vec<f64>>,
    /// `|det ∂τ_x⁻¹/∂w| · |det L_xx⁻¹|`.
    pub det_factor: f64,
    pub test_functions: usize,
    pub max_relative_mismatch: f64,
    pub mismatches: Vec<f64>,
}

/// `b₀(x, ξ) = σ(x, L′ξ)` with `L′ = (L_xx⁻¹)ᵀ = Jτ(0)ᵀ`.
pub fn leading_symbol(sigma: &ComplexSymbol, tau: &QuantizingFunction) -> Result<(ComplexSymbol, DMatrix<f64>)> {
    let n = tau.dim();
    sigma.check(n, &['x', 'k'], "symbol")?;
    let j0 = tau.jacobian(&vec![0.0; n])?;
    let det = j0.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::SingularJacobian(det.abs()));
    }
    let ks = vars::names('k', n);
    let map: HashMap<String, Expr> = ks
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let e = Expr::sum((0..n).map(|j| Expr::mul(Expr::constant(j0[(j, i)]), Expr::var(&ks[j]))));
            (k.clone(), e)
        })
        .collect();
    let l = j0.try_inverse().ok_or(Error::SingularJacobian(det.abs()))?;
    Ok((sigma.substitute(&map), l))
}

/// Leading symbol plus a numerical comparison of `A_{σ,τ}u` against
/// `Cu(x) = Σ_y b₀-kernel(x, y) u(τ_x⁻¹(y))` on band-limited bumps.
pub fn changevar_leading(sigma: &ComplexSymbol, tau: &QuantizingFunction, g: &Grid) -> Result<(ComplexSymbol, ChangevarReport)> {
    let n = tau.dim();
    if g.n != n {
        return Err(Error::DimensionMismatch("grid dimension differs from τ".into()));
    }
    let adm = tau.check_admissible(1.0, 256)?;
    if !adm.hadamard_ok || !adm.bounded_derivatives {
        return Err(Error::Precondition(format!("quantizing function {} fails the admissibility probe", tau.name())));
    }
    let (b0, l) = leading_symbol(sigma, tau)?;
    let a = op_symbol(sigma, tau, g)?;
    let b = op_symbol(&b0, &QuantizingFunction::preset("kn", n)?, g)?;

    // source points τ_x⁻¹(y) for every pair, shared by all test functions
    let size = g.size();
    let mut sources = Vec::with_capacity(size * size);
    for j in 0..size {
        let x = g.node(j);
        for l_idx in 0..size {
            let y = g.node(l_idx);
            let w: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| xi + g.min_image(yi - xi)).collect();
            sources.push(tau.invert_tau_x(&x, &w, 1e-13)?);
        }
    }

    let mut mismatches = Vec::new();
    for (c, width) in [(0.0, 0.5), (0.3, 0.7), (-0.4, 1.0)] {
        let u = GridFunction::from_fn(*g, |p| {
            let r2: f64 = p.iter().map(|v| (v - c) * (v - c)).sum();
            Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
        });
        let spec = dft(&u);
        let scale = (g.dxi() / (2.0 * std::f64::consts::PI)).powi(n as i32);
        let interp = |z: &[f64]| -> Complex64 {
            let mut s = Complex64::new(0.0, 0.0);
            for (q, v) in spec.values.iter().enumerate() {
                let phase: f64 = g.freq(q).iter().zip(z).map(|(a, b)| a * b).sum();
                s += v * Complex64::from_polar(1.0, phase);
            }
            s * scale
        };
        let au = apply(&a, &u)?;
        let mut cu = vec![Complex64::new(0.0, 0.0); size];
        for j in 0..size {
            for l_idx in 0..size {
                cu[j] += b.matrix[(j, l_idx)] * interp(&sources[j * size + l_idx]);
            }
        }
        let num: f64 = au.values.iter().zip(&cu).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = au.values.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
        mismatches.push(if den > 0.0 { num / den } else { num });
    }
    let j0 = tau.jacobian(&vec![0.0; n])?;
    let det_factor = (l.determinant().abs()) * j0.determinant().abs();
    let report = ChangevarReport {
        tau: tau.name(),
        l_matrix: (0..n).map(|i| (0..n).map(|j| l[(i, j)]).collect()).collect(),
        det_factor,
        test_functions: mismatches.len(),
        max_relative_mismatch: mismatches.iter().cloned().fold(0.0, f64::max),
        mismatches,
    };
    Ok((b0, report))
}
