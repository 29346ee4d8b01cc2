use serde::Serialize;

use crate::error::Result;
use crate::sampling::halton_box;
use crate::symbol::ComplexSymbol;
use crate::vars;

/// Sampling box for symbol probes: `|x_i| ≤ x_half`, `|ξ_i| ≤ xi_max`.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolBox {
    pub x_half: f64,
    pub xi_max: f64,
    pub samples: usize,
}

impl Default for SymbolBox {
    fn default() -> Self {
        SymbolBox { x_half: std::f64::consts::PI, xi_max: 64.0, samples: 4096 }
    }
}

impl SymbolBox {
    /// Sample points `(x, ξ)` with `|ξ| ≥ r0`, flattened as `[x.., ξ..]`.
    pub fn points(&self, n: usize, r0: f64) -> Vec<Vec<f64>> {
        let mut lo = vec![-self.x_half; n];
        let mut hi = vec![self.x_half; n];
        lo.extend(vec![-self.xi_max; n]);
        hi.extend(vec![self.xi_max; n]);
        let mut pts: Vec<Vec<f64>> = halton_box(&lo, &hi, self.samples)
            .into_iter()
            .filter(|p| norm(&p[n..]) >= r0)
            .collect();
        // the sphere |ξ| = r0 and the outer corners are where infima often sit
        if n == 1 {
            for i in 0..self.samples.min(256) {
                let x = -self.x_half + 2.0 * self.x_half * (i as f64 + 0.5) / self.samples.min(256) as f64;
                for k in [r0, -r0, self.xi_max, -self.xi_max] {
                    pts.push(vec![x, k]);
                }
            }
        }
        pts
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

/// `inf |σ| / (1+|ξ|)^m` over sampled `|ξ| ≥ r0`; `None` when below `1e−10`.
pub fn ellipticity(sigma: &ComplexSymbol, n: usize, m: f64, r0: f64, bx: &SymbolBox) -> Result<Option<f64>> {
    sigma.check(n, &['x', 'k'], "symbol")?;
    let mut names = vars::names('x', n);
    names.extend(vars::names('k', n));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let prog = sigma.compile(&refs)?;
    let mut scratch = Vec::new();
    let mut out = [0.0; 2];
    let mut c = f64::INFINITY;
    for p in bx.points(n, r0) {
        prog.run(&p, &mut scratch, &mut out);
        let v = out[0].hypot(out[1]) / (1.0 + norm(&p[n..])).powf(m);
        c = c.min(if v.is_nan() { 0.0 } else { v });
    }
    Ok(if c.is_finite() && c >= 1e-10 { Some(c) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::symbol1;

    #[test]
    fn examples() {
        let bx = SymbolBox::default();
        let c = ellipticity(&symbol1("1+k^2").unwrap(), 1, 2.0, 0.0, &bx).unwrap().unwrap();
        assert!((0.5..=0.501).contains(&c), "{c}");
        let c = ellipticity(&symbol1("jb(k)^2").unwrap(), 1, 2.0, 0.0, &bx).unwrap().unwrap();
        assert!((0.5..=0.501).contains(&c), "{c}");
        assert_eq!(ellipticity(&symbol1("sin(x)").unwrap(), 1, 0.0, 0.0, &bx).unwrap(), None);
    }
}
