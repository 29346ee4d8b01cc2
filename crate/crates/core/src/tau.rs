//! Quantizing functions `τ: Rⁿ → Rⁿ`, their admissibility probes, duals,
//! Taylor data, and the inverse of `τ_x: y ↦ x + τ(y − x)`.

use std::collections::HashMap;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::calculus::MultiIndex;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Q;
use crate::sampling::halton_box;
use crate::symexpr::{parse, Expr, Program};
use crate::vars;

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Kn,
    Akn,
    Weyl,
    Linear(f64),
    Custom,
}

#[derive(Clone)]
pub struct QuantizingFunction {
    dim: usize,
    components: Vec<Expr>,
    preset: Preset,
    poly: Option<Vec<Poly>>,
    prog: Program,
    jac: Program,
}

impl std::fmt::Debug for QuantizingFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuantizingFunction({})", self.name())
    }
}

/// Split at commas that are not nested inside parentheses.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl QuantizingFunction {
    fn build(dim: usize, components: Vec<Expr>, preset: Preset) -> Result<QuantizingFunction> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("dimension must be at least 1".into()));
        }
        if components.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "τ has {} components for dimension {dim}",
                components.len()
            )));
        }
        let components: Vec<Expr> = components.iter().map(|c| vars::canonicalize(c, dim)).collect();
        for c in &components {
            vars::check_vocabulary(c, dim, &['w'], "quantizing function")?;
        }
        let w = vars::names('w', dim);
        let wr: Vec<&str> = w.iter().map(String::as_str).collect();
        let refs: Vec<&Expr> = components.iter().collect();
        let prog = Program::compile(&refs, &wr)?;
        let mut jac_exprs = Vec::with_capacity(dim * dim);
        for c in &components {
            for v in &w {
                jac_exprs.push(c.diff(v)?);
            }
        }
        let jrefs: Vec<&Expr> = jac_exprs.iter().collect();
        let jac = Program::compile(&jrefs, &wr)?;
        let poly = components
            .iter()
            .map(|c| Poly::from_expr(c, &wr))
            .collect::<Result<Vec<_>>>()
            .ok()
            .filter(|ps| ps.iter().all(|p| p.constant_term().is_zero()));
        let tau = QuantizingFunction { dim, components, preset, poly, prog, jac };
        let at0 = tau.eval(&vec![0.0; dim])?;
        let residual = at0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual > 1e-12 {
            return Err(Error::TauNotZeroAtOrigin(residual));
        }
        Ok(tau)
    }

    pub fn make_preset(preset: Preset, dim: usize) -> Result<QuantizingFunction> {
        let make = |f: &dyn Fn(Expr) -> Expr| -> Vec<Expr> {
            vars::names('w', dim).iter().map(|v| f(Expr::var(v))).collect()
        };
        let comps = match preset {
            Preset::Kn => make(&|_| Expr::zero()),
            Preset::Akn => make(&|w| w),
            Preset::Weyl => make(&|w| Expr::div(w, Expr::constant(2.0))),
            Preset::Linear(s) => make(&|w| Expr::mul(Expr::constant(s), w)),
            Preset::Custom => return Err(Error::UnknownPreset("custom".into())),
        };
        QuantizingFunction::build(dim, comps, preset)
    }

    /// Preset by name: `kn`, `akn`, `weyl`, `linear:<s>` (or `linear(<s>)`).
    pub fn preset(name: &str, dim: usize) -> Result<QuantizingFunction> {
        let p = match name.trim() {
            "kn" => Preset::Kn,
            "akn" => Preset::Akn,
            "weyl" => Preset::Weyl,
            other => match other
                .strip_prefix("linear:")
                .or_else(|| other.strip_prefix("linear(").and_then(|r| r.strip_suffix(')')))
            {
                Some(s) => Preset::Linear(
                    s.trim().parse::<f64>().map_err(|_| Error::UnknownPreset(other.to_string()))?,
                ),
                None => return Err(Error::UnknownPreset(other.to_string())),
            },
        };
        QuantizingFunction::make_preset(p, dim)
    }

    pub fn custom(components: Vec<Expr>, dim: usize) -> Result<QuantizingFunction> {
        QuantizingFunction::build(dim, components, Preset::Custom)
    }

    /// A preset name or comma-separated component expressions.
    pub fn from_spec(spec: &str, dim: usize) -> Result<QuantizingFunction> {
        match QuantizingFunction::preset(spec, dim) {
            Err(Error::UnknownPreset(_)) if !spec.trim().starts_with("linear") => {
                let comps = split_top_level(spec).into_iter().map(parse).collect::<Result<Vec<_>>>()?;
                QuantizingFunction::custom(comps, dim)
            }
            other => other,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn preset_kind(&self) -> &Preset {
        &self.preset
    }

    pub fn name(&self) -> String {
        match self.preset {
            Preset::Kn => "kn".into(),
            Preset::Akn => "akn".into(),
            Preset::Weyl => "weyl".into(),
            Preset::Linear(s) => format!("linear:{s}"),
            Preset::Custom => {
                let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
                format!("custom({})", parts.join(", "))
            }
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.poly.is_some()
    }

    pub fn polys(&self) -> Option<&[Poly]> {
        self.poly.as_deref()
    }

    /// Exact matrix `T` with `τ(w) = T w`, when τ is linear.
    pub fn linear_matrix(&self) -> Option<Vec<Vec<Q>>> {
        let polys = self.poly.as_ref()?;
        if polys.iter().any(|p| p.degree() > 1) {
            return None;
        }
        Some(
            polys
                .iter()
                .map(|p| (0..self.dim).map(|j| p.coeff(&MultiIndex::unit(self.dim, j).0)).collect())
                .collect(),
        )
    }

    pub fn is_linear(&self) -> bool {
        self.linear_matrix().is_some()
    }

    /// True when τ vanishes identically (Kohn–Nirenberg).
    pub fn is_zero(&self) -> bool {
        self.poly.as_ref().is_some_and(|ps| ps.iter().all(Poly::is_zero))
    }

    /// Unchecked fast evaluation into `out`.
    pub fn eval_into(&self, w: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        self.prog.run(w, scratch, out);
    }

    pub fn eval(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.prog.run(w, &mut Vec::new(), &mut out);
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Domain(format!("τ is not finite at {w:?}")))
        }
    }

    /// Jacobian `∂τ_i/∂w_j`.
    pub fn jacobian(&self, w: &[f64]) -> Result<DMatrix<f64>> {
        let mut out = vec![0.0; self.dim * self.dim];
        self.jac.run(w, &mut Vec::new(), &mut out);
        if !out.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("Jacobian of τ is not finite at {w:?}")));
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &out))
    }

    /// `τ_x(y) = x + τ(y − x)`.
    pub fn tau_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        Ok(self.eval(&d)?.iter().zip(x).map(|(t, xi)| xi + t).collect())
    }

    /// `τ*(z) = z + τ(−z)`.
    pub fn dual(&self) -> QuantizingFunction {
        let preset = match self.preset {
            Preset::Kn => Some(Preset::Akn),
            Preset::Akn => Some(Preset::Kn),
            Preset::Weyl => Some(Preset::Weyl),
            Preset::Linear(s) => Some(Preset::Linear(1.0 - s)),
            Preset::Custom => None,
        };
        if let Some(p) = preset {
            if let Ok(t) = QuantizingFunction::make_preset(p, self.dim) {
                return t;
            }
        }
        let w = vars::names('w', self.dim);
        let reflect: HashMap<String, Expr> =
            w.iter().map(|v| (v.clone(), Expr::neg(Expr::var(v)))).collect();
        let comps: Vec<Expr> = self
            .components
            .iter()
            .zip(&w)
            .map(|(c, v)| Expr::add(Expr::var(v), c.substitute(&reflect)))
            .collect();
        QuantizingFunction::build(self.dim, comps, Preset::Custom)
            .expect("dual of a valid quantizing function is valid")
    }

    fn derivative(&self, i: usize, g: &MultiIndex) -> Result<Expr> {
        let w = vars::names('w', self.dim);
        self.components[i].diff_multi(&w, &g.0)
    }

    /// Taylor data of order `n_order`: coefficients for `1 <= |γ| <= N-1` and
    /// integral-remainder coefficient functions for `|γ| = N`.
    pub fn taylor(&self, n_order: u32) -> Result<TaylorData> {
        if n_order == 0 {
            return Err(Error::Precondition("Taylor order must be at least 1".into()));
        }
        let n = self.dim;
        let w = vars::names('w', n);
        let wr: Vec<&str> = w.iter().map(String::as_str).collect();
        let mut coefficients = Vec::new();
        let mut remainder = Vec::new();
        if let Some(polys) = &self.poly {
            for (i, p) in polys.iter().enumerate() {
                for k in 1..n_order {
                    for g in MultiIndex::of_order(n, k) {
                        coefficients.push(TaylorCoefficient {
                            component: i,
                            gamma: g.clone(),
                            value: Coefficient::Exact(p.coeff(&g.0)),
                        });
                    }
                }
                for g in MultiIndex::of_order(n, n_order) {
                    let rp = polynomial_remainder(p, &g, n_order)?;
                    remainder.push(RemainderTerm { component: i, gamma: g, expr: rp.to_expr(&wr), poly: Some(rp) });
                }
            }
        } else {
            let rule = GaussLegendre::new(20).map_err(|e| Error::Precondition(e.to_string()))?;
            let zero = vec![0.0; n];
            for i in 0..n {
                for k in 1..n_order {
                    for g in MultiIndex::of_order(n, k) {
                        let d = self.derivative(i, &g)?;
                        let b: HashMap<String, f64> = w.iter().cloned().zip(zero.iter().copied()).collect();
                        let v = d.eval(&b)? / g.factorial()? as f64;
                        coefficients.push(TaylorCoefficient { component: i, gamma: g, value: Coefficient::Approx(v) });
                    }
                }
                for g in MultiIndex::of_order(n, n_order) {
                    let d = self.derivative(i, &g)?;
                    let scale = n_order as f64 / g.factorial()? as f64;
                    let mut acc = Expr::zero();
                    for &(node, weight) in rule.as_node_weight_pairs() {
                        let t = 0.5 * (node + 1.0);
                        let wt = 0.5 * weight * scale * (1.0 - t).powi(n_order as i32 - 1);
                        let scaled: HashMap<String, Expr> = w
                            .iter()
                            .map(|v| (v.clone(), Expr::mul(Expr::constant(t), Expr::var(v))))
                            .collect();
                        acc = Expr::add(acc, Expr::mul(Expr::constant(wt), d.substitute(&scaled)));
                    }
                    remainder.push(RemainderTerm { component: i, gamma: g, expr: acc, poly: None });
                }
            }
        }
        Ok(TaylorData { order: n_order, dim: n, exact: self.poly.is_some(), coefficients, remainder })
    }

    /// Probe the admissibility conditions by sampling derivatives up to order 4
    /// on `[-h, h]^n`.
    pub fn check_admissible(&self, halfwidth: f64, samples: usize) -> Result<AdmissibilityReport> {
        if samples < 100 {
            return Err(Error::Precondition("admissibility probe needs at least 100 samples".into()));
        }
        if !(halfwidth > 0.0) {
            return Err(Error::Precondition("probe box half-width must be positive".into()));
        }
        let n = self.dim;
        let w = vars::names('w', n);
        let wr: Vec<&str> = w.iter().map(String::as_str).collect();
        let mut derivs = Vec::new();
        for i in 0..n {
            for g in MultiIndex::up_to(n, 4).into_iter().filter(|g| !g.is_zero()) {
                derivs.push(self.derivative(i, &g)?);
            }
        }
        let refs: Vec<&Expr> = derivs.iter().collect();
        let prog = Program::compile(&refs, &wr)?;
        let per = derivs.len() / n;

        let mut pts = vec![vec![0.0; n]];
        pts.extend(halton_box(&vec![-halfwidth; n], &vec![halfwidth; n], samples));
        let mut ball = vec![vec![0.0; n]];
        ball.extend(
            halton_box(&vec![-1.0; n], &vec![1.0; n], 512)
                .into_iter()
                .filter(|p| p.iter().map(|v| v * v).sum::<f64>() <= 1.0),
        );

        let mut scratch = Vec::new();
        let mut out = vec![0.0; derivs.len()];
        let mut eval_at = |p: &[f64], out: &mut Vec<f64>| -> Result<()> {
            prog.run(p, &mut scratch, out);
            if out.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::Domain(format!("derivative of τ is not finite at {p:?}")))
            }
        };

        let mut unit_sup = vec![0.0f64; derivs.len()];
        for p in &ball {
            eval_at(p, &mut out)?;
            for (s, v) in unit_sup.iter_mut().zip(&out) {
                *s = s.max(v.abs());
            }
        }
        let mut values = Vec::with_capacity(pts.len());
        for p in &pts {
            eval_at(p, &mut out)?;
            let jb2 = 1.0 + p.iter().map(|v| v * v).sum::<f64>();
            values.push((jb2.sqrt(), out.clone()));
        }
        let mu_hat = (0..=8).map(|k| k as f64 * 0.5).find(|&mu| {
            values.iter().all(|(jb, vals)| {
                let weight = jb.powf(mu);
                vals.iter()
                    .zip(&unit_sup)
                    .all(|(v, s)| v.abs() <= 10.0 * s * weight * (1.0 + 1e-12) + 1e-300)
            })
        });

        // first-order entries give the Jacobian
        let first: Vec<usize> = MultiIndex::up_to(n, 4)
            .into_iter()
            .filter(|g| !g.is_zero())
            .enumerate()
            .filter(|(_, g)| g.abs() == 1)
            .map(|(k, _)| k)
            .collect();
        let mut min_jacobian = f64::INFINITY;
        let mut max_jacobian = 0.0f64;
        let (mut pos, mut neg) = (false, false);
        for (_, vals) in &values {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for (j, &k) in first.iter().enumerate() {
                    m[(i, j)] = vals[i * per + k];
                }
            }
            let det = m.determinant();
            min_jacobian = min_jacobian.min(det.abs());
            max_jacobian = max_jacobian.max(det.abs());
            pos |= det > 0.0;
            neg |= det < 0.0;
        }

        // properness probe: |τ| should grow along rays
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                dirs.push(d);
            }
        }
        for p in halton_box(&vec![-1.0; n], &vec![1.0; n], 64) {
            let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r > 0.1 {
                dirs.push(p.iter().map(|v| v / r).collect());
            }
        }
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let mut growth_ok = true;
        for d in &dirs {
            let near: Vec<f64> = d.iter().map(|v| v * halfwidth / 4.0).collect();
            let far: Vec<f64> = d.iter().map(|v| v * halfwidth).collect();
            if norm(&self.eval(&far)?) <= norm(&self.eval(&near)?) {
                growth_ok = false;
            }
        }

        let tau_zero_residual = self.eval(&vec![0.0; n])?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sign_change = pos && neg;
        let hadamard_ok = min_jacobian > 1e-10 && !sign_change && growth_ok;
        Ok(AdmissibilityReport {
            tau: self.name(),
            box_halfwidth: halfwidth,
            samples,
            tau_zero_residual,
            mu_hat,
            bounded_derivatives: mu_hat == Some(0.0),
            hadamard_ok,
            min_jacobian,
            max_jacobian,
            jacobian_sign_change: sign_change,
            growth_ok,
        })
    }

    /// Solve `x + τ(y − x) = w` for `y` by damped Newton iteration from `y₀ = w`.
    pub fn invert_tau_x(&self, x: &[f64], w: &[f64], tol: f64) -> Result<Vec<f64>> {
        let n = self.dim;
        if x.len() != n || w.len() != n {
            return Err(Error::DimensionMismatch("point dimension differs from τ".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        if x == w {
            return Ok(x.to_vec());
        }
        let target: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - b).collect();
        let resid = |z: &[f64]| -> Result<Vec<f64>> {
            Ok(self.eval(z)?.iter().zip(&target).map(|(a, b)| a - b).collect())
        };
        let size = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut z = target.clone();
        let mut r = resid(&z)?;
        for _ in 0..100 {
            if size(&r) <= tol {
                return Ok(z.iter().zip(x).map(|(a, b)| a + b).collect());
            }
            let j = self.jacobian(&z)?;
            let det = j.determinant();
            if det.abs() < 1e-14 {
                return Err(Error::SingularJacobian(det.abs()));
            }
            let step = j
                .lu()
                .solve(&DVector::from_column_slice(&r))
                .ok_or(Error::SingularJacobian(det.abs()))?;
            let mut lambda = 1.0;
            loop {
                let cand: Vec<f64> = z.iter().zip(step.iter()).map(|(a, d)| a - lambda * d).collect();
                let rc = resid(&cand)?;
                if size(&rc) < size(&r) {
                    z = cand;
                    r = rc;
                    break;
                }
                lambda *= 0.5;
                if lambda < 2f64.powi(-20) {
                    return Err(Error::NewtonFailure { iterations: 100, residual: size(&r) });
                }
            }
        }
        if size(&r) <= tol {
            return Ok(z.iter().zip(x).map(|(a, b)| a + b).collect());
        }
        Err(Error::NewtonFailure { iterations: 100, residual: size(&r) })
    }
}

/// `c_γ(τ, w)` for polynomial τ, exact via Beta integrals:
/// `Σ_ε a_ε (N/γ!) ε!/(ε−γ)! B(N, |ε|−N+1) w^{ε−γ}` over `ε ≥ γ`.
fn polynomial_remainder(p: &Poly, g: &MultiIndex, n_order: u32) -> Result<Poly> {
    let n = p.nvars();
    let gfact = Q::int(g.factorial()? as i128);
    let mut out = Poly::zero(n);
    for (m, a) in p.terms() {
        let eps = MultiIndex(m.clone());
        let Some(rest) = eps.checked_sub(g) else { continue };
        let e = eps.abs();
        // ε!/(ε−γ)! as a falling factorial product
        let mut falling = Q::one();
        for (ei, gi) in eps.0.iter().zip(&g.0) {
            for t in 0..*gi {
                falling = falling.mul(Q::int((*ei - t) as i128))?;
            }
        }
        // B(N, e−N+1) = (N−1)! (e−N)! / e!
        let mut beta = Q::one();
        for t in 1..n_order {
            beta = beta.mul(Q::int(t as i128))?;
        }
        for t in (e - n_order + 1)..=e {
            beta = beta.div(Q::int(t as i128))?;
        }
        let c = a.mul(Q::int(n_order as i128))?.div(gfact)?.mul(falling)?.mul(beta)?;
        out = out.add(&Poly::monomial(rest.0, c))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Exact(Q),
    Approx(f64),
}

impl Coefficient {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coefficient::Exact(q) => q.to_f64(),
            Coefficient::Approx(v) => *v,
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coefficient::Exact(q) => q.serialize(s),
            Coefficient::Approx(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorCoefficient {
    pub component: usize,
    pub gamma: MultiIndex,
    pub value: Coefficient,
}

#[derive(Clone, Debug)]
pub struct RemainderTerm {
    pub component: usize,
    pub gamma: MultiIndex,
    pub expr: Expr,
    pub poly: Option<Poly>,
}

#[derive(Clone, Debug)]
pub struct TaylorData {
    pub order: u32,
    pub dim: usize,
    pub exact: bool,
    pub coefficients: Vec<TaylorCoefficient>,
    pub remainder: Vec<RemainderTerm>,
}

impl TaylorData {
    pub fn coefficient(&self, component: usize, gamma: &[u32]) -> Option<&Coefficient> {
        self.coefficients
            .iter()
            .find(|c| c.component == component && c.gamma.0 == gamma)
            .map(|c| &c.value)
    }

    /// `Σ c_γ w^γ + Σ c_γ(τ,w) w^γ` for every component.
    pub fn reconstruct(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mono = |g: &MultiIndex| g.0.iter().zip(w).map(|(&e, &x)| x.powi(e as i32)).product::<f64>();
        let names = vars::names('w', self.dim);
        let b: HashMap<String, f64> = names.into_iter().zip(w.iter().copied()).collect();
        let mut out = vec![0.0; self.dim];
        for c in &self.coefficients {
            out[c.component] += c.value.to_f64() * mono(&c.gamma);
        }
        for r in &self.remainder {
            out[r.component] += r.expr.eval(&b)? * mono(&r.gamma);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub tau: String,
    pub box_halfwidth: f64,
    pub samples: usize,
    pub tau_zero_residual: f64,
    /// Smallest half-integer order fitting the sampled bounds, if any up to 4 does.
    pub mu_hat: Option<f64>,
    pub bounded_derivatives: bool,
    pub hadamard_ok: bool,
    pub min_jacobian: f64,
    pub max_jacobian: f64,
    pub jacobian_sign_change: bool,
    pub growth_ok: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d).unwrap()
    }

    #[test]
    fn presets() {
        let t = QuantizingFunction::preset("weyl", 1).unwrap();
        assert_eq!(t.components()[0].to_string(), "w1/2");
        let t = QuantizingFunction::preset("kn", 2).unwrap();
        assert!(t.components().iter().all(Expr::is_zero));
        let t = QuantizingFunction::preset("linear:0.3", 1).unwrap();
        assert!((t.eval(&[10.0]).unwrap()[0] - 3.0).abs() < 1e-15);
        assert!(matches!(QuantizingFunction::preset("bogus", 1), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn rejects_nonzero_origin() {
        let r = QuantizingFunction::from_spec("w + 1", 1);
        assert!(matches!(r, Err(Error::TauNotZeroAtOrigin(_))));
    }

    #[test]
    fn custom_components_with_nested_commas() {
        let t = QuantizingFunction::from_spec("w1/2, w2/2 + 0*jb(w1, w2) - 0", 2).unwrap();
        assert_eq!(t.dim(), 2);
    }

    #[test]
    fn duals() {
        let kn = QuantizingFunction::preset("kn", 1).unwrap();
        assert_eq!(kn.dual().name(), "akn");
        assert_eq!(QuantizingFunction::preset("weyl", 1).unwrap().dual().name(), "weyl");
        let l = QuantizingFunction::preset("linear:0.25", 1).unwrap().dual();
        assert_eq!(l.name(), "linear:0.75");
        assert_eq!(QuantizingFunction::from_spec("linear(0.25)", 1).unwrap().name(), "linear:0.25");
        let t = QuantizingFunction::from_spec("w/2 + 0.1*sin(w)", 1).unwrap();
        let dd = t.dual().dual();
        for w in [-3.0, -0.5, 0.7, 4.0] {
            assert!((dd.eval(&[w]).unwrap()[0] - t.eval(&[w]).unwrap()[0]).abs() < 1e-12);
        }
        let p = QuantizingFunction::from_spec("w1/2 + w1^2/3", 1).unwrap();
        assert_eq!(p.dual().dual().polys().unwrap(), p.polys().unwrap());
    }

    #[test]
    fn admissibility() {
        let r = QuantizingFunction::preset("weyl", 1).unwrap().check_admissible(5.0, 2000).unwrap();
        assert_eq!(r.mu_hat, Some(0.0));
        assert!(r.bounded_derivatives && r.hadamard_ok);
        assert!((r.min_jacobian - 0.5).abs() < 1e-15);

        let t = QuantizingFunction::from_spec("w/2 + 0.1*sin(w)", 1).unwrap();
        let r = t.check_admissible(5.0, 2000).unwrap();
        assert!(r.bounded_derivatives && r.hadamard_ok);
        assert!(r.min_jacobian >= 0.4);

        let r = QuantizingFunction::from_spec("w^2", 1).unwrap().check_admissible(5.0, 2000).unwrap();
        assert_eq!(r.tau_zero_residual, 0.0);
        assert!(!r.hadamard_ok);
    }

    #[test]
    fn taylor_coefficients() {
        let t = QuantizingFunction::preset("weyl", 1).unwrap().taylor(2).unwrap();
        assert_eq!(t.coefficient(0, &[1]), Some(&Coefficient::Exact(q(1, 2))));
        assert!(t.remainder[0].poly.as_ref().unwrap().is_zero());

        let t = QuantizingFunction::from_spec("sin(w)", 1).unwrap().taylor(3).unwrap();
        assert_eq!(t.coefficient(0, &[1]).unwrap().to_f64(), 1.0);
        assert_eq!(t.coefficient(0, &[2]).unwrap().to_f64(), 0.0);
        for w in [-5.0, -1.3, 0.2, 2.5, 5.0] {
            assert!((t.reconstruct(&[w]).unwrap()[0] - f64::sin(w)).abs() < 1e-9);
        }

        let h = QuantizingFunction::from_spec("w1/2, w2/2, w3/2 + w1*w2/6", 3).unwrap();
        let t = h.taylor(3).unwrap();
        assert_eq!(t.coefficient(0, &[1, 0, 0]), Some(&Coefficient::Exact(q(1, 2))));
        assert_eq!(t.coefficient(1, &[0, 1, 0]), Some(&Coefficient::Exact(q(1, 2))));
        assert_eq!(t.coefficient(2, &[0, 0, 1]), Some(&Coefficient::Exact(q(1, 2))));
        assert_eq!(t.coefficient(2, &[1, 1, 0]), Some(&Coefficient::Exact(q(1, 6))));
    }

    #[test]
    fn newton_inversion() {
        let weyl = QuantizingFunction::preset("weyl", 1).unwrap();
        assert!((weyl.invert_tau_x(&[0.0], &[1.0], 1e-14).unwrap()[0] - 2.0).abs() < 1e-14);
        let t = QuantizingFunction::from_spec("w/2 + 0.1*sin(w)", 1).unwrap();
        assert_eq!(t.invert_tau_x(&[0.3], &[0.3], 1e-12).unwrap(), vec![0.3]);
        let y = t.invert_tau_x(&[0.0], &[0.6], 1e-12).unwrap();
        assert!((t.tau_x(&[0.0], &y).unwrap()[0] - 0.6).abs() <= 1e-12);
        let sq = QuantizingFunction::from_spec("w^3", 1).unwrap();
        assert!(sq.invert_tau_x(&[0.0], &[0.0 + 1e-3], 1e-30).is_err());
    }
}
