//! Exact rationals over 128-bit integers with overflow detection.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Q(pub Ratio<i128>);

impl Q {
    pub const fn zero() -> Q {
        Q(Ratio::new_raw(0, 1))
    }

    pub const fn one() -> Q {
        Q(Ratio::new_raw(1, 1))
    }

    pub fn int(n: i128) -> Q {
        Q(Ratio::from_integer(n))
    }

    pub fn new(num: i128, den: i128) -> Result<Q> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Q(Ratio::new(num, den)))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(self, o: Q) -> Result<Q> {
        self.0.checked_add(&o.0).map(Q).ok_or(Error::Overflow)
    }

    pub fn sub(self, o: Q) -> Result<Q> {
        self.0.checked_sub(&o.0).map(Q).ok_or(Error::Overflow)
    }

    pub fn mul(self, o: Q) -> Result<Q> {
        self.0.checked_mul(&o.0).map(Q).ok_or(Error::Overflow)
    }

    pub fn div(self, o: Q) -> Result<Q> {
        if o.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.0.checked_div(&o.0).map(Q).ok_or(Error::Overflow)
    }

    pub fn neg(self) -> Result<Q> {
        let n = self.numer().checked_neg().ok_or(Error::Overflow)?;
        Ok(Q(Ratio::new_raw(n, self.denom())))
    }

    pub fn pow(self, e: u32) -> Result<Q> {
        let mut acc = Q::one();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion for values that are integers or short binary/decimal fractions.
    /// Returns `None` when no small rational reproduces `v` bit-for-bit.
    pub fn from_f64(v: f64) -> Option<Q> {
        if !v.is_finite() {
            return None;
        }
        if v.fract() == 0.0 && v.abs() < 1e30 {
            return Some(Q::int(v as i128));
        }
        // Try small denominators first so 0.1 becomes 1/10 rather than a dyadic monster.
        for den in 1..=100_000i128 {
            let num = (v * den as f64).round();
            if num.abs() > 1e30 {
                break;
            }
            let q = Q(Ratio::new(num as i128, den));
            if q.to_f64() == v {
                return Some(q);
            }
        }
        let r = Ratio::<i128>::approximate_float(v)?;
        let q = Q(r);
        (q.to_f64() == v).then_some(q)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = Error;

    /// Accepts `p`, `p/q`, or a finite decimal like `-1.25`.
    fn from_str(s: &str) -> Result<Q> {
        let s = s.trim();
        let bad = || Error::Format(format!("not a rational number: `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            return Q::new(p, q);
        }
        if let Some((ip, fp)) = s.split_once('.') {
            if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) || fp.len() > 30 {
                return Err(bad());
            }
            let neg = ip.starts_with('-');
            let ip_abs = ip.trim_start_matches(['-', '+']);
            let ip_val: i128 = if ip_abs.is_empty() { 0 } else { ip_abs.parse().map_err(|_| bad())? };
            let fp_val: i128 = fp.parse().map_err(|_| bad())?;
            let den = 10i128.checked_pow(fp.len() as u32).ok_or(Error::Overflow)?;
            let num = ip_val
                .checked_mul(den)
                .and_then(|v| v.checked_add(fp_val))
                .ok_or(Error::Overflow)?;
            return Q::new(if neg { -num } else { num }, den);
        }
        let n: i128 = s.parse().map_err(|_| bad())?;
        Ok(Q::int(n))
    }
}

impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
