//! Low-discrepancy sampling of boxes.

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// The `i`-th Halton point in `[0,1)^dim` (skipping the origin at `i = 0`).
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton sequence supports at most 12 dimensions");
    (0..dim).map(|d| radical_inverse(i + 1, PRIMES[d])).collect()
}

/// `count` Halton points mapped into the box `lo[d] <= x_d <= hi[d]`.
pub fn halton_box(lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    let dim = lo.len();
    (0..count as u64)
        .map(|i| {
            halton(i, dim)
                .into_iter()
                .enumerate()
                .map(|(d, u)| lo[d] + u * (hi[d] - lo[d]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_sequence() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_stay_in_box() {
        for p in halton_box(&[-1.0, 2.0], &[1.0, 3.0], 500) {
            assert!((-1.0..=1.0).contains(&p[0]));
            assert!((2.0..=3.0).contains(&p[1]));
        }
    }
}
