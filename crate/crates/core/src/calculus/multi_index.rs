use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest total order for which factorials are computed.
pub const MAX_ORDER: u32 = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> MultiIndex {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> MultiIndex {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn abs(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// `α! = Π αᵢ!`, exact; |α| above 12 is rejected.
    pub fn factorial(&self) -> Result<u64> {
        if self.abs() > MAX_ORDER {
            return Err(Error::MultiIndexTooLarge(self.abs()));
        }
        Ok(self.0.iter().map(|&a| (1..=a as u64).product::<u64>()).product())
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `self - o` when `o <= self` componentwise.
    pub fn checked_sub(&self, o: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All multi-indices of dimension `n` with `|α| = order`, lexicographically descending
    /// in the first component (so `(2,0) (1,1) (0,2)`).
    pub fn of_order(n: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == n {
                cur.push(left);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for a in (0..=left).rev() {
                cur.push(a);
                rec(n, left - a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, order, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices with `|α| <= max`, by increasing order.
    pub fn up_to(n: usize, max: u32) -> Vec<MultiIndex> {
        (0..=max).flat_map(|k| MultiIndex::of_order(n, k)).collect()
    }

    /// All multi-indices with each component at most `max`, in lexicographic order.
    pub fn box_up_to(n: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::new())];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..=max).map(move |a| {
                        let mut v = m.0.clone();
                        v.push(a);
                        MultiIndex(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
