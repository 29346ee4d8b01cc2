//! Parametrix of an elliptic symbol.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::discretize::{fourier_matrix, Grid};
use crate::quantize::op_symbol;

use crate::error::{Error, Result};
use crate::estimates::{ellipticity, SymbolBox};
use crate::symbol::ComplexSymbol;
use crate::symexpr::{Expr, Func, Program};
use crate::tau::QuantizingFunction;
use crate::vars;

use super::expansion::{convert_quantization, kn_to_linear, NODE_LIMIT};
use super::jet::{Atoms, Factor, Jet};
use super::MultiIndex;

#[derive(Clone, Debug)]
pub struct Parametrix {
    /// The parametrix as a symbol in the requested quantization.
    pub kappa: ComplexSymbol,
    /// The same parametrix as a Kohn–Nirenberg symbol.
    pub kappa_kn: ComplexSymbol,
    pub report: ParametrixReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParametrixReport {
    pub tau: String,
    pub m: f64,
    pub order: u32,
    pub r0: f64,
    pub ellipticity_constant: f64,
    pub min_kn_symbol: f64,
}

/// `χ_{R₀}(ξ) e` with `χ_{R₀}(ξ) = ψ((|ξ| − R₀)/R₀)`; no cutoff for `R₀ = 0`.
pub fn cutoff(e: &ComplexSymbol, n: usize, r0: f64) -> ComplexSymbol {
    if r0 <= 0.0 {
        return e.clone();
    }
    let sq = vars::names('k', n)
        .iter()
        .fold(Expr::zero(), |acc, k| Expr::add(acc, Expr::powi(Expr::var(k), 2)));
    let t = Expr::div(Expr::sub(Expr::call1(Func::Sqrt, sq), Expr::constant(r0)), Expr::constant(r0));
    e.map(|p| Expr::call(Func::Ramp(0), vec![t.clone(), p.clone()]))
}

/// Left parametrix `κ` with `A_κ A_σ = I + R` in the quantization `τ`.
///
/// The recursion runs on the Kohn–Nirenberg symbol of `σ`; returning to `τ`
/// needs a linear `τ`.
pub fn parametrix(sigma: &ComplexSymbol, tau: &QuantizingFunction, m: f64, order: u32, r0: f64) -> Result<Parametrix> {
    parametrix_in(sigma, tau, m, order, r0, &SymbolBox::default())
}

pub fn parametrix_in(
    sigma: &ComplexSymbol,
    tau: &QuantizingFunction,
    m: f64,
    order: u32,
    r0: f64,
    bx: &SymbolBox,
) -> Result<Parametrix> {
    let n = tau.dim();
    if order == 0 {
        return Err(Error::Precondition("parametrix order must be at least 1".into()));
    }
    if !(r0 >= 0.0) {
        return Err(Error::Precondition("cutoff radius must be non-negative".into()));
    }
    if !tau.is_linear() {
        return Err(Error::Unsupported(format!(
            "parametrix needs a linear quantizing function, got {}",
            tau.name()
        )));
    }
    let c = ellipticity(sigma, n, m, r0, bx)?
        .ok_or_else(|| Error::NotElliptic(format!("|σ|/(1+|ξ|)^{m} has no positive lower bound for |ξ| ≥ {r0}")))?;
    let kn = QuantizingFunction::preset("kn", n)?;
    let s1 = convert_quantization(sigma, tau, &kn, order, 1)?.symbol_sum()?;

    let min_s1 = min_modulus(&s1, n, r0, bx)?;
    if !(min_s1 >= 1e-12) {
        return Err(Error::Domain(format!("Kohn–Nirenberg symbol drops to {min_s1:e} where the parametrix divides by it")));
    }

    // κ_j as jets in the derivatives of σ₁ and 1/σ₁
    let r = Jet::recip(n);
    let zero = vec![0; n];
    let mut parts: Vec<Jet> = vec![r.clone()];
    for j in 1..order {
        let mut acc = Jet::zero(n);
        for (k, kappa_k) in parts.iter().enumerate() {
            for alpha in MultiIndex::of_order(n, j - k as u32) {
                let coef = Complex64::i().powi(-(alpha.abs() as i32)) / alpha.factorial()? as f64;
                let mut s_idx = alpha.0.clone();
                s_idx.extend(&zero);
                let term = kappa_k.diff_multi(&zero, &alpha.0).mul(&Jet::factor(n, Factor::S(s_idx)));
                acc.add_scaled(&term, coef);
            }
        }
        parts.push(r.mul(&acc).scaled(Complex64::new(-1.0, 0.0)));
    }
    let chi = (r0 > 0.0).then(|| cutoff(&ComplexSymbol::one(), n, r0).re);
    let with_cutoff = |j: &Jet| match chi {
        Some(_) => j.mul(&Jet::factor(n, Factor::C(zero.clone()))),
        None => j.clone(),
    };
    let parts: Vec<Jet> = parts.iter().map(with_cutoff).collect();
    let mut total = Jet::zero(n);
    for p in &parts {
        total.add_scaled(p, Complex64::new(1.0, 0.0));
    }
    // back to τ, keeping κ_j's corrections of order below M − j
    let mut back = Jet::zero(n);
    for (alpha, delta, c) in kn_to_linear(tau, order)? {
        for (j, p) in parts.iter().enumerate() {
            if j as u32 + alpha.abs() < order {
                back.add_scaled(&p.diff_multi(&alpha.0, &delta.0), c);
            }
        }
    }
    let mut atoms = Atoms::new(n, s1, chi);
    let kappa_kn = atoms.build(&total)?;
    let kappa = atoms.build(&back)?;
    if kappa.node_count() > NODE_LIMIT {
        return Err(Error::ExpressionTooLarge { limit: NODE_LIMIT });
    }
    Ok(Parametrix {
        kappa,
        kappa_kn,
        report: ParametrixReport {
            tau: tau.name(),
            m,
            order,
            r0,
            ellipticity_constant: c,
            min_kn_symbol: min_s1,
        },
    })
}

/// `‖(A_κ A_σ − I)P‖` with `P` the projector onto modes `lo ≤ |ξ| ≤ hi`.
pub fn band_residual(
    kappa: &ComplexSymbol,
    sigma: &ComplexSymbol,
    tau: &QuantizingFunction,
    g: &Grid,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let prod = op_symbol(kappa, tau, g)?.matrix * op_symbol(sigma, tau, g)?.matrix;
    let r = prod - DMatrix::<Complex64>::identity(g.size(), g.size());
    let modes: Vec<usize> = (0..g.size())
        .filter(|&q| {
            let x = g.freq(q).iter().map(|v| v * v).sum::<f64>().sqrt();
            x >= lo && x <= hi
        })
        .collect();
    if modes.is_empty() {
        return Err(Error::Precondition(format!("no grid modes with {lo} ≤ |ξ| ≤ {hi}")));
    }
    let f = fourier_matrix(g).adjoint();
    let v = DMatrix::from_fn(g.size(), modes.len(), |j, c| f[(j, modes[c])]);
    Ok((r * v).svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max))
}

fn min_modulus(s: &ComplexSymbol, n: usize, r0: f64, bx: &SymbolBox) -> Result<f64> {
    let mut names = vars::names('x', n);
    names.extend(vars::names('k', n));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let prog: Program = s.compile(&refs)?;
    let mut scratch = Vec::new();
    let mut out = [0.0; 2];
    let mut lo = f64::INFINITY;
    for p in bx.points(n, r0) {
        prog.run(&p, &mut scratch, &mut out);
        let v = out[0].hypot(out[1]);
        lo = lo.min(if v.is_nan() { 0.0 } else { v });
    }
    Ok(lo)
}
