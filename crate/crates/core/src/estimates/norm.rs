use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantize::OperatorMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    PowerIteration,
    FullDecomposition,
}

impl NormMethod {
    pub fn parse(s: &str) -> Result<NormMethod> {
        match s {
            "power" | "power-iteration" => Ok(NormMethod::PowerIteration),
            "svd" | "full" | "full-decomposition" => Ok(NormMethod::FullDecomposition),
            _ => Err(Error::Precondition(format!("unknown norm method `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub norm: f64,
    pub method: NormMethod,
    pub iterations: usize,
    pub residual: f64,
}

/// Largest singular value of `a`.
pub fn operator_norm(a: &OperatorMatrix, method: NormMethod) -> Result<NormReport> {
    matrix_norm(&a.matrix, method)
}

pub fn matrix_norm(a: &DMatrix<Complex64>, method: NormMethod) -> Result<NormReport> {
    if a.nrows() != a.ncols() {
        return Err(Error::SizeMismatch { expected: a.nrows(), actual: a.ncols() });
    }
    if a.nrows() == 0 {
        return Ok(NormReport { norm: 0.0, method, iterations: 0, residual: 0.0 });
    }
    match method {
        NormMethod::FullDecomposition => {
            let sv = a.clone().svd(false, false).singular_values;
            let norm = sv.iter().cloned().fold(0.0, f64::max);
            Ok(NormReport { norm, method, iterations: 0, residual: 0.0 })
        }
        NormMethod::PowerIteration => power_iteration(a, 1e-10, 20_000),
    }
}

/// Power iteration on `AᴴA` from a fixed pseudo-random start.
///
/// The residual is `‖AᴴA v − λv‖ / λ` for the unit iterate `v`.
pub fn power_iteration(a: &DMatrix<Complex64>, tol: f64, max_iter: usize) -> Result<NormReport> {
    let n = a.ncols();
    let b = a.adjoint() * a;
    if b.iter().all(|z| z.norm() == 0.0) {
        return Ok(NormReport { norm: 0.0, method: NormMethod::PowerIteration, iterations: 0, residual: 0.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    v /= Complex64::new(v.norm(), 0.0);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let bv = &b * &v;
        let lambda = v.dotc(&bv).re;
        residual = (&bv - &v * Complex64::new(lambda, 0.0)).norm() / lambda.abs().max(f64::MIN_POSITIVE);
        if residual <= tol {
            return Ok(NormReport {
                norm: lambda.max(0.0).sqrt(),
                method: NormMethod::PowerIteration,
                iterations: it,
                residual,
            });
        }
        let nb = bv.norm();
        v = bv / Complex64::new(nb, 0.0);
    }
    Err(Error::NonConvergence(format!("power iteration stalled at residual {residual:e} after {max_iter} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn identity_and_scaling() {
        let i = DMatrix::<Complex64>::identity(16, 16);
        for m in [NormMethod::PowerIteration, NormMethod::FullDecomposition] {
            assert!((matrix_norm(&i, m).unwrap().norm - 1.0).abs() < 1e-14);
            let two = &i * Complex64::new(2.0, 0.0);
            assert!((matrix_norm(&two, m).unwrap().norm - 2.0).abs() < 1e-14);
        }
        assert_eq!(matrix_norm(&DMatrix::zeros(4, 4), NormMethod::PowerIteration).unwrap().norm, 0.0);
    }

    #[test]
    fn power_iteration_matches_svd() {
        for seed in 0..5 {
            let a = random(24, seed);
            let p = matrix_norm(&a, NormMethod::PowerIteration).unwrap();
            let s = matrix_norm(&a, NormMethod::FullDecomposition).unwrap();
            assert!((p.norm - s.norm).abs() / s.norm < 1e-7, "{} {}", p.norm, s.norm);
            assert!(p.residual <= 1e-8);
            let h = matrix_norm(&a.adjoint(), NormMethod::FullDecomposition).unwrap();
            assert!((h.norm - s.norm).abs() < 1e-10);
        }
    }
}
