//! Dense assembly of τ-quantized and amplitude operators on a periodic grid.
//!
//! `A[j,l] = N^{-n} Σ_q e^{i(x_j − y_l)·ξ_q} σ(x_j + τ(m(y_l − x_j)), ξ_q)` with
//! `m` the minimal-image map into `[−L, L)^n`. Amplitudes are evaluated at
//! `a(x_j, y_l, ξ_q)`, with the extra variable `w` bound to `−m(y_l − x_j)`,
//! the periodic difference `x − y`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::discretize::{dft, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::symexpr::{parse, Binding, Expr};
use crate::tau::QuantizingFunction;
use crate::vars;

pub use crate::symbol::ComplexSymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyPath {
    Standard,
    Oracle,
    FastKn,
    Amplitude,
}

impl AssemblyPath {
    pub fn as_str(self) -> &'static str {
        match self {
            AssemblyPath::Standard => "standard",
            AssemblyPath::Oracle => "oracle",
            AssemblyPath::FastKn => "fast-kn",
            AssemblyPath::Amplitude => "amplitude",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub symbol: String,
    pub tau: String,
    pub path: AssemblyPath,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub matrix: DMatrix<Complex64>,
    pub provenance: Provenance,
}

/// Amplitude `σ(x + τ(−w), ξ)` of a τ-quantized symbol.
pub fn amplitude_of(sigma: &ComplexSymbol, tau: &QuantizingFunction) -> ComplexSymbol {
    let n = tau.dim();
    let w = vars::names('w', n);
    let refl: std::collections::HashMap<String, Expr> =
        w.iter().map(|v| (v.clone(), Expr::neg(Expr::var(v)))).collect();
    let map = vars::names('x', n)
        .into_iter()
        .zip(tau.components())
        .map(|(x, t)| (x.clone(), Expr::add(Expr::var(&x), t.substitute(&refl))))
        .collect();
    sigma.substitute(&map)
}

struct Phases {
    n: usize,
    points: usize,
    table: Vec<Complex64>,
}

impl Phases {
    fn new(g: &Grid) -> Phases {
        let table = (0..g.points)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / g.points as f64))
            .collect();
        Phases { n: g.n, points: g.points, table }
    }

    /// `e^{i(x_j − y_l)·ξ_q}` from exact root-of-unity indices.
    fn at(&self, j: [usize; 2], l: [usize; 2], q: [usize; 2]) -> Complex64 {
        let nn = self.points as i64;
        let mut out = Complex64::new(1.0, 0.0);
        for a in 0..self.n {
            let qa = q[a] as i64 - nn / 2;
            let idx = ((j[a] as i64 - l[a] as i64) * qa).rem_euclid(nn) as usize;
            out *= self.table[idx];
        }
        out
    }
}

/// Minimal-image index offset of `l − j` per axis, in `[−N/2, N/2)`.
fn image_offset(g: &Grid, j: [usize; 2], l: [usize; 2]) -> [i64; 2] {
    let nn = g.points as i64;
    let mut out = [0; 2];
    for a in 0..g.n {
        out[a] = (l[a] as i64 - j[a] as i64 + nn / 2).rem_euclid(nn) - nn / 2;
    }
    out
}

fn check_finite(rows: Vec<Result<Vec<Complex64>>>, g: &Grid) -> Result<DMatrix<Complex64>> {
    let size = g.size();
    let mut m = DMatrix::zeros(size, size);
    for (j, row) in rows.into_iter().enumerate() {
        for (l, v) in row?.into_iter().enumerate() {
            m[(j, l)] = v;
        }
    }
    Ok(m)
}

fn non_finite(j: usize, l: usize) -> Error {
    Error::Domain(format!("kernel entry ({j},{l}) is not finite"))
}

/// τ-quantized operator of `σ` on grid `g`.
pub fn op_symbol(sigma: &ComplexSymbol, tau: &QuantizingFunction, g: &Grid) -> Result<OperatorMatrix> {
    let n = g.n;
    if tau.dim() != n {
        return Err(Error::DimensionMismatch(format!("τ has dimension {}, grid has {n}", tau.dim())));
    }
    sigma.check(n, &['x', 'k'], "symbol")?;
    let xs = vars::names('x', n);
    let ks = vars::names('k', n);
    let names: Vec<&str> = xs.iter().chain(&ks).map(String::as_str).collect();
    let prog = sigma.compile(&names)?;
    let phases = Phases::new(g);
    let size = g.size();
    let weight = g.weight();
    let freqs: Vec<Vec<f64>> = (0..size).map(|q| g.freq(q)).collect();
    let rows: Vec<Result<Vec<Complex64>>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let jj = g.unflatten(j);
            let xj = g.node(j);
            let mut scratch = Vec::new();
            let mut tv = vec![0.0; n];
            let mut out = [0.0; 2];
            let mut inputs = vec![0.0; 2 * n];
            let mut row = Vec::with_capacity(size);
            for l in 0..size {
                let ll = g.unflatten(l);
                let off = image_offset(g, jj, ll);
                let d: Vec<f64> = (0..n).map(|a| off[a] as f64 * g.dx()).collect();
                tau.eval_into(&d, &mut scratch, &mut tv);
                for a in 0..n {
                    inputs[a] = xj[a] + tv[a];
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (q, xi) in freqs.iter().enumerate() {
                    inputs[n..].copy_from_slice(xi);
                    prog.run(&inputs, &mut scratch, &mut out);
                    acc += phases.at(jj, ll, g.unflatten(q)) * Complex64::new(out[0], out[1]);
                }
                let v = acc * weight;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(non_finite(j, l));
                }
                row.push(v);
            }
            Ok(row)
        })
        .collect();
    Ok(OperatorMatrix {
        grid: *g,
        matrix: check_finite(rows, g)?,
        provenance: Provenance { symbol: sigma.to_text(), tau: tau.name(), path: AssemblyPath::Standard },
    })
}

/// Operator of an amplitude `a(x, y, k)` (optionally using `w = x − y` periodically).
pub fn op_amplitude(a: &ComplexSymbol, g: &Grid) -> Result<OperatorMatrix> {
    let n = g.n;
    a.check(n, &['x', 'y', 'k', 'w'], "amplitude")?;
    let names_owned: Vec<String> = ['x', 'y', 'k', 'w'].iter().flat_map(|&p| vars::names(p, n)).collect();
    let names: Vec<&str> = names_owned.iter().map(String::as_str).collect();
    let prog = a.compile(&names)?;
    let phases = Phases::new(g);
    let size = g.size();
    let weight = g.weight();
    let freqs: Vec<Vec<f64>> = (0..size).map(|q| g.freq(q)).collect();
    let rows: Vec<Result<Vec<Complex64>>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let jj = g.unflatten(j);
            let xj = g.node(j);
            let mut scratch = Vec::new();
            let mut out = [0.0; 2];
            let mut inputs = vec![0.0; 4 * n];
            let mut row = Vec::with_capacity(size);
            for l in 0..size {
                let ll = g.unflatten(l);
                let yl = g.node(l);
                let off = image_offset(g, jj, ll);
                for a in 0..n {
                    inputs[a] = xj[a];
                    inputs[n + a] = yl[a];
                    inputs[3 * n + a] = -(off[a] as f64) * g.dx();
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (q, xi) in freqs.iter().enumerate() {
                    inputs[2 * n..3 * n].copy_from_slice(xi);
                    prog.run(&inputs, &mut scratch, &mut out);
                    acc += phases.at(jj, ll, g.unflatten(q)) * Complex64::new(out[0], out[1]);
                }
                let v = acc * weight;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(non_finite(j, l));
                }
                row.push(v);
            }
            Ok(row)
        })
        .collect();
    Ok(OperatorMatrix {
        grid: *g,
        matrix: check_finite(rows, g)?,
        provenance: Provenance { symbol: a.to_text(), tau: "amplitude".into(), path: AssemblyPath::Amplitude },
    })
}

/// Independent brute-force assembly: tree-walking evaluation, trigonometric
/// phases, reversed frequency order and compensated summation.
pub fn op_oracle(sigma: &ComplexSymbol, tau: &QuantizingFunction, g: &Grid) -> Result<OperatorMatrix> {
    let n = g.n;
    if tau.dim() != n {
        return Err(Error::DimensionMismatch(format!("τ has dimension {}, grid has {n}", tau.dim())));
    }
    sigma.check(n, &['x', 'k'], "symbol")?;
    let size = g.size();
    let dx = 2.0 * g.l / g.points as f64;
    let coord = |idx: usize| -> Vec<f64> {
        let mut out = vec![0.0; n];
        let mut rest = idx;
        for a in (0..n).rev() {
            out[a] = -g.l + (rest % g.points) as f64 * dx;
            rest /= g.points;
        }
        out
    };
    let freq = |idx: usize| -> Vec<f64> {
        let mut out = vec![0.0; n];
        let mut rest = idx;
        for a in (0..n).rev() {
            let q = (rest % g.points) as f64 - (g.points / 2) as f64;
            out[a] = q * PI / g.l;
            rest /= g.points;
        }
        out
    };
    let mut m = DMatrix::zeros(size, size);
    for j in 0..size {
        let x = coord(j);
        for l in 0..size {
            let y = coord(l);
            let mut b = Binding::new();
            let mut diff = vec![0.0; n];
            for a in 0..n {
                let r = y[a] - x[a];
                let k = (r / dx).round() as i64;
                let kk = (k + (g.points / 2) as i64).rem_euclid(g.points as i64) - (g.points / 2) as i64;
                diff[a] = kk as f64 * dx;
                b.insert(format!("w{}", a + 1), diff[a]);
            }
            let mut shifted = Vec::with_capacity(n);
            for a in 0..n {
                shifted.push(x[a] + tau.components()[a].eval(&b)?);
            }
            let (mut sr, mut cr) = (0.0f64, 0.0f64);
            let (mut si, mut ci) = (0.0f64, 0.0f64);
            for q in (0..size).rev() {
                let xi = freq(q);
                let mut bind = Binding::new();
                let mut phase = 0.0;
                for a in 0..n {
                    bind.insert(format!("x{}", a + 1), shifted[a]);
                    bind.insert(format!("k{}", a + 1), xi[a]);
                    phase += (x[a] - y[a]) * xi[a];
                }
                let s = sigma.eval(&bind)?;
                let (c, sn) = (phase.cos(), phase.sin());
                let re = c * s.re - sn * s.im;
                let im = c * s.im + sn * s.re;
                // Kahan updates
                let yv = re - cr;
                let t = sr + yv;
                cr = (t - sr) - yv;
                sr = t;
                let yv = im - ci;
                let t = si + yv;
                ci = (t - si) - yv;
                si = t;
            }
            m[(j, l)] = Complex64::new(sr, si) / size as f64;
        }
    }
    Ok(OperatorMatrix {
        grid: *g,
        matrix: m,
        provenance: Provenance { symbol: sigma.to_text(), tau: tau.name(), path: AssemblyPath::Oracle },
    })
}

/// Matrix-vector product.
pub fn apply(a: &OperatorMatrix, u: &GridFunction) -> Result<GridFunction> {
    if a.grid != u.grid {
        return Err(Error::DimensionMismatch("operator and function live on different grids".into()));
    }
    let v = &a.matrix * DVector::from_column_slice(&u.values);
    GridFunction::new(u.grid, v.iter().copied().collect())
}

/// Kohn–Nirenberg operator applied through one forward transform:
/// `v(x_j) = (2π)^{-n} Δξ^n Σ_q e^{i x_j·ξ_q} σ(x_j, ξ_q) û(ξ_q)`.
pub fn kn_fast_apply(sigma: &ComplexSymbol, g: &Grid, u: &GridFunction) -> Result<GridFunction> {
    if u.grid != *g {
        return Err(Error::DimensionMismatch("function lives on a different grid".into()));
    }
    let n = g.n;
    sigma.check(n, &['x', 'k'], "symbol")?;
    let xs = vars::names('x', n);
    let ks = vars::names('k', n);
    let names: Vec<&str> = xs.iter().chain(&ks).map(String::as_str).collect();
    let prog = sigma.compile(&names)?;
    let uhat = dft(u);
    let size = g.size();
    let nn = g.points as i64;
    let table: Vec<Complex64> =
        (0..g.points).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / g.points as f64)).collect();
    let scale = (g.dxi() / (2.0 * PI)).powi(n as i32);
    let values: Vec<Result<Complex64>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let jj = g.unflatten(j);
            let xj = g.node(j);
            let mut inputs = vec![0.0; 2 * n];
            inputs[..n].copy_from_slice(&xj);
            let mut scratch = Vec::new();
            let mut out = [0.0; 2];
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..size {
                let qq = g.unflatten(q);
                let mut ph = Complex64::new(1.0, 0.0);
                for a in 0..n {
                    let qa = qq[a] as i64 - nn / 2;
                    // e^{i x_j ξ_q} = (−1)^q e^{2πi j q / N}
                    ph *= table[(jj[a] as i64 * qa).rem_euclid(nn) as usize];
                    if qa.rem_euclid(2) == 1 {
                        ph = -ph;
                    }
                }
                inputs[n..].copy_from_slice(&g.freq(q));
                prog.run(&inputs, &mut scratch, &mut out);
                acc += ph * Complex64::new(out[0], out[1]) * uhat.values[q];
            }
            let v = acc * scale;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!("symbol is not finite on row {j}")))
            }
        })
        .collect();
    GridFunction::new(*g, values.into_iter().collect::<Result<Vec<_>>>()?)
}

impl OperatorMatrix {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(grid: Grid) -> OperatorMatrix {
        OperatorMatrix {
            grid,
            matrix: DMatrix::identity(grid.size(), grid.size()),
            provenance: Provenance { symbol: "1".into(), tau: "any".into(), path: AssemblyPath::Standard },
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_diff(&self, other: &OperatorMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix { grid: self.grid, matrix: self.matrix.adjoint(), provenance: self.provenance.clone() }
    }

    pub fn transpose(&self) -> OperatorMatrix {
        OperatorMatrix { grid: self.grid, matrix: self.matrix.transpose(), provenance: self.provenance.clone() }
    }

    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut s = format!("# operator N={} grid n={} N={} L={}\n", self.size(), g.n, g.points, g.l);
        let _ = writeln!(s, "# symbol: {}", self.provenance.symbol);
        let _ = writeln!(s, "# tau: {}", self.provenance.tau);
        let _ = writeln!(s, "# path: {}", self.provenance.path.as_str());
        for j in 0..self.size() {
            let row: Vec<String> = (0..self.size())
                .map(|l| {
                    let v = self.matrix[(j, l)];
                    format!("{:.16e};{:.16e}", v.re, v.im)
                })
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<OperatorMatrix> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty operator file".into()))?;
        let body = header
            .strip_prefix("# operator")
            .ok_or_else(|| Error::Format("missing `# operator` header".into()))?;
        let grid_part = body
            .split_once("grid")
            .map(|(_, r)| r)
            .ok_or_else(|| Error::Format("operator header lacks grid".into()))?;
        let mut n = None;
        let mut points = None;
        let mut l = None;
        for tok in grid_part.split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                match k {
                    "n" => n = v.parse().ok(),
                    "N" => points = v.parse().ok(),
                    "L" => l = crate::discretize::parse_length(v).ok(),
                    _ => {}
                }
            }
        }
        let grid = match (n, points, l) {
            (Some(n), Some(p), Some(l)) => Grid::new(n, p, l)?,
            _ => return Err(Error::Format(format!("malformed operator header `{header}`"))),
        };
        let mut prov = Provenance { symbol: String::new(), tau: String::new(), path: AssemblyPath::Standard };
        let size = grid.size();
        let mut m = DMatrix::zeros(size, size);
        let mut row = 0;
        for line in lines {
            if let Some(c) = line.strip_prefix('#') {
                let c = c.trim();
                if let Some(v) = c.strip_prefix("symbol:") {
                    prov.symbol = v.trim().to_string();
                } else if let Some(v) = c.strip_prefix("tau:") {
                    prov.tau = v.trim().to_string();
                } else if let Some(v) = c.strip_prefix("path:") {
                    prov.path = match v.trim() {
                        "oracle" => AssemblyPath::Oracle,
                        "fast-kn" => AssemblyPath::FastKn,
                        "amplitude" => AssemblyPath::Amplitude,
                        _ => AssemblyPath::Standard,
                    };
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if row >= size {
                return Err(Error::Format("too many matrix rows".into()));
            }
            let entries: Vec<&str> = line.split(',').collect();
            if entries.len() != size {
                return Err(Error::SizeMismatch { expected: size, actual: entries.len() });
            }
            for (col, e) in entries.iter().enumerate() {
                let (re, im) = e.split_once(';').ok_or_else(|| Error::Format(format!("bad entry `{e}`")))?;
                let p = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad number `{t}`")));
                m[(row, col)] = Complex64::new(p(re)?, p(im)?);
            }
            row += 1;
        }
        if row != size {
            return Err(Error::SizeMismatch { expected: size, actual: row });
        }
        Ok(OperatorMatrix { grid, matrix: m, provenance: prov })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<OperatorMatrix> {
        OperatorMatrix::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Convenience: parse a real symbol in dimension 1 (used in tests and examples).
pub fn symbol1(re: &str) -> Result<ComplexSymbol> {
    Ok(ComplexSymbol::real(vars::canonicalize(&parse(re)?, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(1, n, PI).unwrap()
    }

    #[test]
    fn constant_one_is_identity() {
        let g = grid(32);
        for t in ["kn", "akn", "weyl", "linear:0.3", "w/2 + 0.1*sin(w)"] {
            let tau = QuantizingFunction::from_spec(t, 1).unwrap();
            let a = op_symbol(&ComplexSymbol::one(), &tau, &g).unwrap();
            assert!(a.max_diff(&OperatorMatrix::identity(g)) <= 1e-12, "{t}");
        }
    }

    #[test]
    fn derivative_symbol_on_a_mode() {
        let g = grid(32);
        let a = op_symbol(&symbol1("k").unwrap(), &QuantizingFunction::preset("kn", 1).unwrap(), &g).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, x[0]));
        assert!(apply(&a, &u).unwrap().max_abs_diff(&u) < 1e-12);
        let v = kn_fast_apply(&symbol1("k^2").unwrap(), &g, &u).unwrap();
        assert!(v.max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn amplitude_path_matches_symbol_path() {
        let g = grid(16);
        let s = symbol1("sin(x)*exp(-(k^2)/9)").unwrap();
        let tau = QuantizingFunction::from_spec("w/2 + 0.1*sin(w)", 1).unwrap();
        let a = op_symbol(&s, &tau, &g).unwrap();
        let b = op_amplitude(&amplitude_of(&s, &tau), &g).unwrap();
        assert!(a.max_diff(&b) <= 1e-14);
    }

    #[test]
    fn multiplication_operator() {
        let g = grid(16);
        let a = op_amplitude(&symbol1("sin(x)").unwrap(), &g).unwrap();
        for j in 0..16 {
            for l in 0..16 {
                let want = if j == l { g.node_1d(j).sin() } else { 0.0 };
                assert!((a.matrix[(j, l)] - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = grid(8);
        let s = ComplexSymbol::parse_symbol("cos(x) + k", Some("k/3"), 1).unwrap();
        let a = op_symbol(&s, &QuantizingFunction::preset("weyl", 1).unwrap(), &g).unwrap();
        let b = OperatorMatrix::from_csv(&a.to_csv()).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.provenance, b.provenance);
    }

    #[test]
    fn two_dimensional_identity() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let tau = QuantizingFunction::preset("weyl", 2).unwrap();
        let a = op_symbol(&ComplexSymbol::one(), &tau, &g).unwrap();
        assert!(a.max_diff(&OperatorMatrix::identity(g)) <= 1e-12);
    }
}
