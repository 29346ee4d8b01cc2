use std::collections::HashMap;

use serde::Serialize;

use crate::calculus::MultiIndex;
use crate::error::{Error, Result};
use crate::quantize::amplitude_of;
use crate::sampling::halton_box;
use crate::symbol::ComplexSymbol;
use crate::symexpr::{Expr, Program};
use crate::tau::QuantizingFunction;
use crate::vars;

/// Half-widths of the sampling box `|x_i| ≤ x`, `|y_i| ≤ y`, `|ξ_i| ≤ k`.
#[derive(Clone, Debug, Serialize)]
pub struct CvBox {
    pub x: f64,
    pub y: f64,
    pub k: f64,
}

impl Default for CvBox {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        CvBox { x: pi, y: pi, k: pi }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CvEntry {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub gamma: MultiIndex,
    pub sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TauSup {
    pub order: u32,
    pub sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CvReport {
    pub m_val: f64,
    pub table: Vec<CvEntry>,
    pub sample_box: CvBox,
    pub samples: usize,
    pub tau_sups: Option<Vec<TauSup>>,
}

/// Sampled `M = max sup |∂_x^α ∂_y^β ∂_ξ^γ a|` over `|α|, |β|, |γ| ≤ 2n+1`.
///
/// The amplitude may use `w`, read here as `x − y`. Each sup is taken over
/// Halton samples and then refined by a compass search from the best sample.
pub fn cv_bound(a: &ComplexSymbol, n: usize, bx: &CvBox, samples: usize) -> Result<CvReport> {
    a.check(n, &['x', 'y', 'k', 'w'], "amplitude")?;
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    let xs = vars::names('x', n);
    let ys = vars::names('y', n);
    let ks = vars::names('k', n);
    let unwrap_w: HashMap<String, Expr> = vars::names('w', n)
        .into_iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| (w, Expr::sub(Expr::var(x), Expr::var(y))))
        .collect();
    let a = a.substitute(&unwrap_w);

    let top = 2 * n as u32 + 1;
    let idx = MultiIndex::up_to(n, top);
    let mut exprs = Vec::new();
    let mut labels = Vec::new();
    for alpha in &idx {
        let da = a.diff_multi(&xs, &alpha.0)?;
        for beta in &idx {
            let db = da.diff_multi(&ys, &beta.0)?;
            for gamma in &idx {
                let dg = db.diff_multi(&ks, &gamma.0)?;
                labels.push((alpha.clone(), beta.clone(), gamma.clone()));
                exprs.push(dg);
            }
        }
    }
    let mut names = xs.clone();
    names.extend(ys.iter().cloned());
    names.extend(ks.iter().cloned());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let flat: Vec<&Expr> = exprs.iter().flat_map(|s| [&s.re, &s.im]).collect();
    let prog = Program::compile(&flat, &refs)?;

    let mut lo = vec![-bx.x; n];
    lo.extend(vec![-bx.y; n]);
    lo.extend(vec![-bx.k; n]);
    let hi: Vec<f64> = lo.iter().map(|v| -v).collect();
    let mut scratch = Vec::new();
    let mut out = vec![0.0; flat.len()];
    let mut best = vec![0.0f64; exprs.len()];
    let mut arg = vec![Vec::new(); exprs.len()];
    for p in halton_box(&lo, &hi, samples) {
        prog.run(&p, &mut scratch, &mut out);
        for i in 0..exprs.len() {
            let v = out[2 * i].hypot(out[2 * i + 1]);
            if !v.is_finite() {
                return Err(Error::Domain(format!("derivative {} is not finite at {:?}", i, p)));
            }
            if v > best[i] || arg[i].is_empty() {
                best[i] = v;
                arg[i] = p.clone();
            }
        }
    }
    for i in 0..exprs.len() {
        if best[i] > 0.0 {
            best[i] = refine(&prog, i, &arg[i], best[i], &lo, &hi, &mut scratch, &mut out);
        }
    }
    let table: Vec<CvEntry> = labels
        .into_iter()
        .zip(&best)
        .map(|((alpha, beta, gamma), &sup)| CvEntry { alpha, beta, gamma, sup })
        .collect();
    let m_val = best.iter().cloned().fold(0.0, f64::max);
    Ok(CvReport { m_val, table, sample_box: bx.clone(), samples, tau_sups: None })
}

/// Compass search for a larger `|output i|` starting from `p`.
#[allow(clippy::too_many_arguments)]
fn refine(
    prog: &Program,
    i: usize,
    p: &[f64],
    mut val: f64,
    lo: &[f64],
    hi: &[f64],
    scratch: &mut Vec<f64>,
    out: &mut [f64],
) -> f64 {
    let mut p = p.to_vec();
    let mut steps: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / 64.0).collect();
    while steps.iter().any(|s| *s > 1e-7) {
        let mut moved = false;
        for d in 0..p.len() {
            for sgn in [1.0, -1.0] {
                let mut q = p.clone();
                q[d] = (q[d] + sgn * steps[d]).clamp(lo[d], hi[d]);
                prog.run(&q, scratch, out);
                let v = out[2 * i].hypot(out[2 * i + 1]);
                if v.is_finite() && v > val {
                    val = v;
                    p = q;
                    moved = true;
                }
            }
        }
        if !moved {
            steps.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    val
}

/// CV bound for the amplitude of `(σ, τ)`, with τ derivative sups up to order `4n+2`.
pub fn cv_bound_symbol(
    sigma: &ComplexSymbol,
    tau: &QuantizingFunction,
    bx: &CvBox,
    samples: usize,
) -> Result<CvReport> {
    let n = tau.dim();
    sigma.check(n, &['x', 'k'], "symbol")?;
    let mut rep = cv_bound(&amplitude_of(sigma, tau), n, bx, samples)?;
    rep.tau_sups = Some(tau_derivative_sups(tau, bx.x + bx.y, samples)?);
    Ok(rep)
}

fn tau_derivative_sups(tau: &QuantizingFunction, half: f64, samples: usize) -> Result<Vec<TauSup>> {
    let n = tau.dim();
    let ws = vars::names('w', n);
    let refs: Vec<&str> = ws.iter().map(String::as_str).collect();
    let pts = halton_box(&vec![-half; n], &vec![half; n], samples);
    let mut out = Vec::new();
    for order in 1..=(4 * n as u32 + 2) {
        let mut exprs = Vec::new();
        for c in tau.components() {
            for g in MultiIndex::of_order(n, order) {
                exprs.push(c.diff_multi(&ws, &g.0)?);
            }
        }
        let flat: Vec<&Expr> = exprs.iter().collect();
        let prog = Program::compile(&flat, &refs)?;
        let mut scratch = Vec::new();
        let mut vals = vec![0.0; flat.len()];
        let mut sup = 0.0f64;
        for p in &pts {
            prog.run(p, &mut scratch, &mut vals);
            for v in &vals {
                sup = sup.max(v.abs());
            }
        }
        out.push(TauSup { order, sup });
    }
    Ok(out)
}
