//! Periodic grids, the discrete Fourier convention and discrete Sobolev norms.
//!
//! Nodes are `x_j = -L + j Δx` with `Δx = 2L/N`; frequencies are
//! `ξ_q = q π/L` for `q ∈ [-N/2, N/2)`, stored at index `q + N/2`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    /// Spatial dimension (1 or 2).
    pub n: usize,
    /// Points per axis.
    pub points: usize,
    /// Half-length of the periodic cell.
    pub l: f64,
}

impl Grid {
    pub fn new(n: usize, points: usize, l: f64) -> Result<Grid> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {n}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even and at least 8, got {points}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-length must be positive, got {l}")));
        }
        Ok(Grid { n, points, l })
    }

    /// Parse `n,N,L` where `L` may be `pi`, `2pi`, `2*pi` or a number.
    pub fn parse(spec: &str) -> Result<Grid> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected n,N,L, got `{spec}`")));
        }
        let n = parts[0].parse().map_err(|_| Error::InvalidGrid(format!("bad dimension `{}`", parts[0])))?;
        let points = parts[1].parse().map_err(|_| Error::InvalidGrid(format!("bad point count `{}`", parts[1])))?;
        let l = parse_length(parts[2])?;
        Grid::new(n, points, l)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.points as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.l
    }

    /// Largest frequency magnitude `Ξ = πN/(2L)`.
    pub fn band(&self) -> f64 {
        PI * self.points as f64 / (2.0 * self.l)
    }

    /// Total number of nodes `N^n`.
    pub fn size(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn node_1d(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.dx()
    }

    /// Signed frequency index for storage index `i`.
    pub fn q_of(&self, i: usize) -> i64 {
        i as i64 - (self.points / 2) as i64
    }

    pub fn freq_1d(&self, i: usize) -> f64 {
        self.q_of(i) as f64 * self.dxi()
    }

    /// Per-axis indices of a row-major flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.n == 1 {
            [idx, 0]
        } else {
            [idx / self.points, idx % self.points]
        }
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        let ij = self.unflatten(idx);
        (0..self.n).map(|a| self.node_1d(ij[a])).collect()
    }

    pub fn freq(&self, idx: usize) -> Vec<f64> {
        let ij = self.unflatten(idx);
        (0..self.n).map(|a| self.freq_1d(ij[a])).collect()
    }

    /// Representative of `d` modulo `2L` in `[-L, L)`.
    pub fn min_image(&self, d: f64) -> f64 {
        let period = 2.0 * self.l;
        let r = d - period * ((d + self.l) / period).floor();
        if r >= self.l {
            r - period
        } else {
            r
        }
    }

    /// Quadrature weight `(Δx Δξ / 2π)^n = N^{-n}`.
    pub fn weight(&self) -> f64 {
        1.0 / self.size() as f64
    }

    pub fn header(&self) -> String {
        format!("# grid n={} N={} L={}", self.n, self.points, self.l)
    }
}

pub fn parse_length(s: &str) -> Result<f64> {
    let t = s.trim().replace(' ', "");
    let bad = || Error::InvalidGrid(format!("bad half-length `{s}`"));
    if t == "pi" {
        return Ok(PI);
    }
    if let Some(c) = t.strip_suffix("pi") {
        let c = c.strip_suffix('*').unwrap_or(c);
        return Ok(c.parse::<f64>().map_err(|_| bad())? * PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// Frequency-side samples, stored at index `q + N/2` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<GridFunction> {
        if values.len() != grid.size() {
            return Err(Error::SizeMismatch { expected: grid.size(), actual: values.len() });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> GridFunction {
        let values = (0..grid.size()).map(|i| f(&grid.node(i))).collect();
        GridFunction { grid, values }
    }

    /// Plain discrete L² norm `sqrt(Δx^n Σ|u|²)`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.dx().powi(self.grid.n as i32);
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs_diff(&self, o: &GridFunction) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.grid.header();
        s.push('\n');
        for v in &self.values {
            let _ = writeln!(s, "{:.16e},{:.16e}", v.re, v.im);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<GridFunction> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty grid function file".into()))?;
        let grid = parse_grid_header(header)?;
        let mut values = Vec::with_capacity(grid.size());
        for (no, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (re, im) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("line {}: expected `re,im`", no + 2)))?;
            let p = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Format(format!("line {}: bad number `{t}`", no + 2)));
            values.push(Complex64::new(p(re)?, p(im)?));
        }
        GridFunction::new(grid, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<GridFunction> {
        GridFunction::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_grid_header(line: &str) -> Result<Grid> {
    let body = line
        .trim()
        .strip_prefix("# grid")
        .ok_or_else(|| Error::Format("missing `# grid` header".into()))?;
    let mut n = None;
    let mut points = None;
    let mut l = None;
    for tok in body.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            match k {
                "n" => n = v.parse().ok(),
                "N" => points = v.parse().ok(),
                "L" => l = parse_length(v).ok(),
                _ => {}
            }
        }
    }
    match (n, points, l) {
        (Some(n), Some(p), Some(l)) => Grid::new(n, p, l),
        _ => Err(Error::Format(format!("malformed grid header `{line}`"))),
    }
}

/// In-place 1-d transform along one axis of a row-major array.
fn transform_axis(grid: &Grid, data: &mut [Complex64], axis: usize, forward: bool) {
    let n = grid.points;
    let mut planner = FftPlanner::new();
    let fft = if forward { planner.plan_fft_forward(n) } else { planner.plan_fft_inverse(n) };
    let half = (n / 2) as i64;
    let (count, stride) = if grid.n == 1 { (1, 1) } else if axis == 0 { (n, n) } else { (n, 1) };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for line in 0..count {
        let base = if grid.n == 1 {
            0
        } else if axis == 0 {
            line
        } else {
            line * n
        };
        let at = |k: usize| base + k * stride;
        if forward {
            for k in 0..n {
                buf[k] = data[at(k)];
            }
            fft.process(&mut buf);
            for i in 0..n {
                let q = i as i64 - half;
                let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                data[at(i)] = buf[q.rem_euclid(n as i64) as usize] * (sign * grid.dx());
            }
        } else {
            for i in 0..n {
                let q = i as i64 - half;
                let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[q.rem_euclid(n as i64) as usize] = data[at(i)] * sign;
            }
            fft.process(&mut buf);
            let scale = grid.dxi() / (2.0 * PI);
            for k in 0..n {
                data[at(k)] = buf[k] * scale;
            }
        }
    }
}

/// `û(ξ_q) = Δx^n Σ_j e^{-i x_j·ξ_q} u(x_j)`.
pub fn dft(u: &GridFunction) -> Spectrum {
    let mut v = u.values.clone();
    for axis in 0..u.grid.n {
        transform_axis(&u.grid, &mut v, axis, true);
    }
    Spectrum { grid: u.grid, values: v }
}

/// `u(x_j) = (Δξ/2π)^n Σ_q e^{i x_j·ξ_q} û(ξ_q)`.
pub fn idft(s: &Spectrum) -> GridFunction {
    let mut v = s.values.clone();
    for axis in 0..s.grid.n {
        transform_axis(&s.grid, &mut v, axis, false);
    }
    GridFunction { grid: s.grid, values: v }
}

/// Unitary DFT matrix `F[q, j] = e^{-i x_j·ξ_q} / sqrt(size)`.
pub fn fourier_matrix(g: &Grid) -> DMatrix<Complex64> {
    let size = g.size();
    let scale = 1.0 / (size as f64).sqrt();
    DMatrix::from_fn(size, size, |q, j| {
        let phase: f64 = g.freq(q).iter().zip(g.node(j)).map(|(a, b)| a * b).sum();
        Complex64::from_polar(scale, -phase)
    })
}

/// `‖u‖_{H^s} = sqrt((2π)^{-n} Δξ^n Σ_q ⟨ξ_q⟩^{2s} |û_q|²)`.
pub fn sobolev_norm(u: &GridFunction, s: f64) -> f64 {
    let g = &u.grid;
    let spec = dft(u);
    let w = (g.dxi() / (2.0 * PI)).powi(g.n as i32);
    let total: f64 = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi2: f64 = g.freq(i).iter().map(|x| x * x).sum();
            (1.0 + xi2).powf(s) * v.norm_sqr()
        })
        .sum();
    (w * total).sqrt()
}
