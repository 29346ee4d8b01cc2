//! Amplitude-to-symbol expansion.
//!
//! Amplitudes are expressions in `x, y, k` and `w`, where `w` is the periodic
//! difference `x − y`. Total derivatives therefore act as
//! `∂_x = ∂/∂x + ∂/∂w` and `∂_y = ∂/∂y − ∂/∂w`, and the diagonal `x = y = v`
//! means `x, y → v, w → 0`.
//!
//! For a target τ the term of order `(α, β)` is
//! `(1/α!β!) [∂_x^α ∂_y^β a](v, v, ξ) [−τ(−w)]^α [−w − τ(−w)]^β` with
//! `v = x + τ(−w)`. Under the oscillatory integral `w^δ` acts as `i^{|δ|} ∂_ξ^δ`,
//! which turns polynomial factors into closed forms.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::MultiIndex;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Q;
use crate::symbol::ComplexSymbol;
use crate::symexpr::Expr;
use crate::tau::QuantizingFunction;
use crate::vars;

/// Expansions whose expressions grow beyond this many nodes are rejected.
pub const NODE_LIMIT: usize = 1_000_000;

/// `E_δ` polynomials with `[τ(w)]^α [w − τ(w)]^β = Σ_δ E_δ(w) w^δ`.
///
/// Monomials of degree below `N(|α|+|β|)` give constant `E_δ`; higher ones are
/// charged to a `δ` of degree exactly `N(|α|+|β|)` (first coordinates first).
pub fn factor_expansion(
    tau: &QuantizingFunction,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    n_taylor: u32,
) -> Result<Vec<(MultiIndex, Poly)>> {
    let polys = tau
        .polys()
        .ok_or_else(|| Error::NonPolynomial(format!("quantizing function {}", tau.name())))?;
    factor_expansion_polys(polys, alpha, beta, n_taylor)
}

pub(crate) fn factor_expansion_polys(
    polys: &[Poly],
    alpha: &MultiIndex,
    beta: &MultiIndex,
    n_taylor: u32,
) -> Result<Vec<(MultiIndex, Poly)>> {
    let n = polys.len();
    let order = alpha.abs() + beta.abs();
    if order > 8 {
        return Err(Error::Precondition(format!("|α|+|β| = {order} exceeds 8")));
    }
    if n_taylor == 0 {
        return Err(Error::Precondition("Taylor depth must be at least 1".into()));
    }
    let mut prod = Poly::one(n);
    for i in 0..n {
        prod = prod.mul(&polys[i].pow(alpha.0[i])?)?;
        let rest = Poly::var(n, i).sub(&polys[i])?;
        prod = prod.mul(&rest.pow(beta.0[i])?)?;
    }
    let cap = n_taylor * order;
    let mut out: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
    for (m, c) in prod.terms() {
        let deg: u32 = m.iter().sum();
        let (delta, rest) = if deg < cap {
            (m.clone(), vec![0; n])
        } else {
            let mut left = cap;
            let mut d = vec![0; n];
            for i in 0..n {
                d[i] = m[i].min(left);
                left -= d[i];
            }
            let r = m.iter().zip(&d).map(|(a, b)| a - b).collect();
            (d, r)
        };
        let entry = out.entry(MultiIndex(delta)).or_insert_with(|| Poly::zero(n));
        *entry = entry.add(&Poly::monomial(rest, *c))?;
    }
    Ok(out.into_iter().filter(|(_, p)| !p.is_zero()).collect())
}

/// One closed-form piece: `k_δ(w) = i^{i_power} · k(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedPiece {
    pub delta: MultiIndex,
    pub i_power: u8,
    pub k: Poly,
}

#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    /// Pre-integration-by-parts amplitude in `x, w, k`.
    pub amplitude: ComplexSymbol,
    /// `(1/α!β!)`-free diagonal derivative `[∂_x^α ∂_y^β a](z, z, ξ)` as a function of `(x, k)`.
    pub base: ComplexSymbol,
    pub closed_form: Option<Vec<ClosedPiece>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Remainder {
    pub order: String,
    pub growth: String,
}

#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub target: QuantizingFunction,
    pub m: u32,
    pub n_taylor: u32,
    pub terms: Vec<ExpansionTerm>,
    pub remainder: Remainder,
}

/// Total derivative in `x_i` (`upper = true`) or `y_i` of an amplitude.
fn total_diff(a: &ComplexSymbol, i: usize, upper: bool) -> Result<ComplexSymbol> {
    let w = format!("w{}", i + 1);
    let main = a.diff(&format!("{}{}", if upper { 'x' } else { 'y' }, i + 1))?;
    let dw = a.diff(&w)?;
    Ok(if upper { main.add(&dw) } else { main.sub(&dw) })
}

fn guard(s: &ComplexSymbol) -> Result<()> {
    if s.node_count() > NODE_LIMIT {
        return Err(Error::ExpressionTooLarge { limit: NODE_LIMIT });
    }
    Ok(())
}

/// Pairs `(α, β)` with `|α| + |β| < m`, ordered by `(|α|+|β|, α, β)`.
pub fn index_pairs(n: usize, m: u32) -> Vec<(MultiIndex, MultiIndex)> {
    let mut out = Vec::new();
    for total in 0..m {
        let mut level = Vec::new();
        for ka in 0..=total {
            for a in MultiIndex::of_order(n, ka) {
                for b in MultiIndex::of_order(n, total - ka) {
                    level.push((a.clone(), b));
                }
            }
        }
        level.sort();
        out.extend(level);
    }
    out
}

/// `ξ`-derivative `∂_ξ^δ` of a symbol or amplitude.
pub fn diff_xi(s: &ComplexSymbol, delta: &MultiIndex) -> Result<ComplexSymbol> {
    s.diff_multi(&vars::names('k', delta.dim()), &delta.0)
}

/// Coefficients `(α, δ, c)` of the change from Kohn–Nirenberg to a linear `τ`:
/// the `τ`-symbol is `Σ c ∂_ξ^δ ∂_x^α b` over `|α| < m`.
pub(crate) fn kn_to_linear(tau: &QuantizingFunction, m: u32) -> Result<Vec<(MultiIndex, MultiIndex, Complex64)>> {
    let polys = tau
        .polys()
        .filter(|_| tau.is_linear())
        .ok_or_else(|| Error::Unsupported(format!("{} is not linear", tau.name())))?;
    let tilde = polys.iter().map(|p| p.reflect().neg()).collect::<Result<Vec<_>>>()?;
    let zero = MultiIndex::zero(tau.dim());
    let mut out = Vec::new();
    for ord in 0..m {
        for alpha in MultiIndex::of_order(tau.dim(), ord) {
            let scale = 1.0 / alpha.factorial()? as f64;
            for (delta, k) in factor_expansion_polys(&tilde, &alpha, &zero, 1)? {
                let k = k.as_constant().expect("linear τ gives constant coefficients").to_f64();
                if k != 0.0 {
                    let c = Complex64::i().powu(delta.abs()) * (k * scale);
                    out.push((alpha.clone(), delta, c));
                }
            }
        }
    }
    Ok(out)
}

/// Expand the amplitude `a` into `τ`-symbol terms of order below `m`.
pub fn amplitude_to_symbol_terms(
    a: &ComplexSymbol,
    tau: &QuantizingFunction,
    m: u32,
    n_taylor: u32,
) -> Result<ExpansionResult> {
    if m == 0 || n_taylor == 0 {
        return Err(Error::Precondition("expansion order and Taylor depth must be at least 1".into()));
    }
    let n = tau.dim();
    a.check(n, &['x', 'y', 'k', 'w'], "amplitude")?;
    let xs = vars::names('x', n);
    let ys = vars::names('y', n);
    let ws = vars::names('w', n);

    // τ(−w), the shifted point v = x + τ(−w) and the polynomial factors.
    let refl: HashMap<String, Expr> = ws.iter().map(|v| (v.clone(), Expr::neg(Expr::var(v)))).collect();
    let tau_neg: Vec<Expr> = tau.components().iter().map(|c| c.substitute(&refl)).collect();
    let to_v: HashMap<String, Expr> = xs
        .iter()
        .zip(&tau_neg)
        .map(|(x, t)| (x.clone(), Expr::add(Expr::var(x), t.clone())))
        .collect();
    let diag: HashMap<String, Expr> = ys
        .iter()
        .zip(&xs)
        .map(|(y, x)| (y.clone(), Expr::var(x)))
        .chain(ws.iter().map(|w| (w.clone(), Expr::zero())))
        .collect();
    // τ̃(w) = −τ(−w), so [−τ(−w)]^α [−w − τ(−w)]^β = (−1)^{|β|} [τ̃]^α [w − τ̃]^β
    let tilde: Option<Vec<Poly>> = tau.polys().map(|ps| ps.iter().map(|p| p.reflect().neg()).collect::<Result<Vec<_>>>()).transpose()?;

    let mut x_derivs: HashMap<MultiIndex, ComplexSymbol> = HashMap::new();
    x_derivs.insert(MultiIndex::zero(n), a.clone());
    let mut terms = Vec::new();
    for (alpha, beta) in index_pairs(n, m) {
        // ∂_x^α a, built incrementally and cached
        let dxa = x_deriv(&mut x_derivs, &alpha)?;
        let mut d = dxa;
        for i in 0..n {
            for _ in 0..beta.0[i] {
                d = total_diff(&d, i, false)?;
            }
        }
        guard(&d)?;
        let base = d.substitute(&diag);
        let coeff = (alpha.factorial()? * beta.factorial()?) as f64;
        let mut factor = Expr::one();
        for i in 0..n {
            let minus_tau = Expr::neg(tau_neg[i].clone());
            let second = Expr::sub(Expr::neg(Expr::var(&ws[i])), tau_neg[i].clone());
            factor = Expr::mul(factor, Expr::powi(minus_tau, alpha.0[i] as i32));
            factor = Expr::mul(factor, Expr::powi(second, beta.0[i] as i32));
        }
        let amplitude = if base.is_zero() || factor.is_zero() {
            ComplexSymbol::zero()
        } else {
            base.substitute(&to_v).scale_real(Expr::div(factor, Expr::constant(coeff)))
        };
        guard(&amplitude)?;
        let closed_form = match &tilde {
            Some(t) => {
                let pieces = factor_expansion_polys(t, &alpha, &beta, n_taylor)?;
                let sign = if beta.abs() % 2 == 1 { -1 } else { 1 };
                let scale = Q::new(sign, (alpha.factorial()? * beta.factorial()?) as i128)?;
                let mut out = Vec::new();
                for (delta, e) in pieces {
                    let i_power = (delta.abs() % 4) as u8;
                    out.push(ClosedPiece { delta, i_power, k: e.scale(scale)? });
                }
                Some(out)
            }
            None => None,
        };
        terms.push(ExpansionTerm { alpha, beta, amplitude, base, closed_form });
    }
    Ok(ExpansionResult {
        target: tau.clone(),
        m,
        n_taylor,
        terms,
        remainder: Remainder { order: format!("m-{m}"), growth: format!("(mu+d)*{m}") },
    })
}

fn x_deriv(cache: &mut HashMap<MultiIndex, ComplexSymbol>, alpha: &MultiIndex) -> Result<ComplexSymbol> {
    if let Some(s) = cache.get(alpha) {
        return Ok(s.clone());
    }
    // peel one unit off the last nonzero component
    let i = alpha.0.iter().rposition(|&v| v > 0).expect("nonzero multi-index");
    let mut lower = alpha.clone();
    lower.0[i] -= 1;
    let prev = x_deriv(cache, &lower)?;
    let d = total_diff(&prev, i, true)?;
    guard(&d)?;
    cache.insert(alpha.clone(), d.clone());
    Ok(d)
}

impl ExpansionTerm {
    /// Closed-form amplitude `Σ_δ k_δ(w) ∂_ξ^δ D(x + τ(−w), ξ)`.
    pub fn closed_amplitude(&self, target: &QuantizingFunction) -> Result<ComplexSymbol> {
        let pieces = self
            .closed_form
            .as_ref()
            .ok_or_else(|| Error::NonPolynomial(format!("quantizing function {}", target.name())))?;
        let n = target.dim();
        let ws = vars::names('w', n);
        let wr: Vec<&str> = ws.iter().map(String::as_str).collect();
        let refl: HashMap<String, Expr> = ws.iter().map(|v| (v.clone(), Expr::neg(Expr::var(v)))).collect();
        let to_v: HashMap<String, Expr> = vars::names('x', n)
            .into_iter()
            .zip(target.components())
            .map(|(x, t)| (x.clone(), Expr::add(Expr::var(&x), t.substitute(&refl))))
            .collect();
        let mut acc = ComplexSymbol::zero();
        for p in pieces {
            let d = diff_xi(&self.base, &p.delta)?.substitute(&to_v);
            let piece = d.scale_real(p.k.to_expr(&wr)).times_i_pow(p.i_power as i64);
            acc = acc.add(&piece);
        }
        guard(&acc)?;
        Ok(acc)
    }

    /// Symbol `Σ_δ k_δ ∂_ξ^δ D(x, ξ)`; requires every `k_δ` to be constant.
    pub fn symbol(&self) -> Result<ComplexSymbol> {
        let pieces = self
            .closed_form
            .as_ref()
            .ok_or_else(|| Error::Unsupported("closed forms need a polynomial quantizing function".into()))?;
        let mut acc = ComplexSymbol::zero();
        for p in pieces {
            let k = p.k.as_constant().ok_or_else(|| {
                Error::Unsupported("closed-form coefficient depends on w; use the amplitude form".into())
            })?;
            let d = diff_xi(&self.base, &p.delta)?;
            acc = acc.add(&d.scale_real(Expr::constant(k.to_f64())).times_i_pow(p.i_power as i64));
        }
        guard(&acc)?;
        Ok(acc)
    }
}

impl ExpansionResult {
    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// Sum of the pre-integration-by-parts amplitudes.
    pub fn amplitude_sum(&self) -> ComplexSymbol {
        self.terms.iter().fold(ComplexSymbol::zero(), |acc, t| acc.add(&t.amplitude))
    }

    /// Sum of the closed-form amplitudes (polynomial target only).
    pub fn closed_amplitude_sum(&self) -> Result<ComplexSymbol> {
        let mut acc = ComplexSymbol::zero();
        for t in &self.terms {
            acc = acc.add(&t.closed_amplitude(&self.target)?);
        }
        Ok(acc)
    }

    /// The truncated target symbol `Σ_terms Σ_δ k_δ ∂_ξ^δ D` (constant `k_δ` only).
    pub fn symbol_sum(&self) -> Result<ComplexSymbol> {
        let mut acc = ComplexSymbol::zero();
        for t in &self.terms {
            acc = acc.add(&t.symbol()?);
        }
        Ok(acc)
    }

    pub fn nonzero_terms(&self) -> usize {
        self.terms.iter().filter(|t| !t.amplitude.is_zero()).count()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let mut obj = json!({
                    "alpha": t.alpha,
                    "beta": t.beta,
                    "amplitude_re": t.amplitude.re.to_string(),
                    "amplitude_im": t.amplitude.im.to_string(),
                });
                if let Some(pieces) = &t.closed_form {
                    let cf: Vec<Value> = pieces
                        .iter()
                        .map(|p| {
                            let unit = ["1", "i", "-1", "-i"][p.i_power as usize];
                            json!({ "delta": p.delta, "i_power": p.i_power, "unit": unit, "k": p.k.to_text() })
                        })
                        .collect();
                    obj["closed_form"] = Value::Array(cf);
                }
                obj
            })
            .collect();
        json!({
            "target_tau": self.target.name(),
            "M": self.m,
            "N": self.n_taylor,
            "terms": terms,
            "remainder": self.remainder,
        })
    }
}

/// Quantization change: the `τ₂`-expansion of the `τ₁`-quantized `σ`.
pub fn convert_quantization(
    sigma: &ComplexSymbol,
    from: &QuantizingFunction,
    to: &QuantizingFunction,
    m: u32,
    n_taylor: u32,
) -> Result<ExpansionResult> {
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch("quantizing functions differ in dimension".into()));
    }
    sigma.check(from.dim(), &['x', 'k'], "symbol")?;
    let a = crate::quantize::amplitude_of(sigma, from);
    amplitude_to_symbol_terms(&a, to, m, n_taylor)
}
