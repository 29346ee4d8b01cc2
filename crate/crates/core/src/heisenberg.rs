//! Exact arithmetic on the Heisenberg group and its polarised form: group law,
//! matrix exponential and logarithm, the symmetry function
//! `τ(x) = ∫₀¹ exp(s log x) ds` and the associated midpoint.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Polarised,
    Standard,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "polarised" | "polarized" | "pol" => Ok(Variant::Polarised),
            "standard" | "std" => Ok(Variant::Standard),
            _ => Err(Error::Precondition(format!("unknown Heisenberg variant `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HeisPoint {
    pub variant: Variant,
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl fmt::Display for HeisPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}, {}", self.a, self.b, self.c)
    }
}

/// 3×3 upper-triangular rational matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NilMatrix(pub [[Q; 3]; 3]);

impl NilMatrix {
    pub fn zero() -> NilMatrix {
        NilMatrix([[Q::zero(); 3]; 3])
    }

    pub fn identity() -> NilMatrix {
        let mut m = NilMatrix::zero();
        for i in 0..3 {
            m.0[i][i] = Q::one();
        }
        m
    }

    /// Matrix with the given diagonal value and strictly upper entries `(m01, m12, m02)`.
    pub fn upper(diag: Q, m01: Q, m12: Q, m02: Q) -> NilMatrix {
        let mut m = NilMatrix::zero();
        for i in 0..3 {
            m.0[i][i] = diag;
        }
        m.0[0][1] = m01;
        m.0[1][2] = m12;
        m.0[0][2] = m02;
        m
    }

    fn check_shape(&self, diag: Q) -> Result<()> {
        let m = &self.0;
        let lower_zero = m[1][0].is_zero() && m[2][0].is_zero() && m[2][1].is_zero();
        if !lower_zero || (0..3).any(|i| m[i][i] != diag) {
            return Err(Error::Precondition(format!("expected an upper-triangular matrix with diagonal {diag}")));
        }
        Ok(())
    }

    pub fn add(&self, o: &NilMatrix) -> Result<NilMatrix> {
        let mut out = NilMatrix::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][j].add(o.0[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &NilMatrix) -> Result<NilMatrix> {
        self.add(&o.scale(Q::int(-1))?)
    }

    pub fn scale(&self, c: Q) -> Result<NilMatrix> {
        let mut out = NilMatrix::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][j].mul(c)?;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, o: &NilMatrix) -> Result<NilMatrix> {
        let mut out = NilMatrix::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Q::zero();
                for k in 0..3 {
                    acc = acc.add(self.0[i][k].mul(o.0[k][j])?)?;
                }
                out.0[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// `exp X = I + X + X²/2` for strictly upper-triangular `X`.
    pub fn exp(&self) -> Result<NilMatrix> {
        self.check_shape(Q::zero())?;
        let x2 = self.mul(self)?;
        NilMatrix::identity().add(self)?.add(&x2.scale(Q::new(1, 2)?)?)
    }

    /// `log G = (G − I) − (G − I)²/2` for unipotent upper-triangular `G`.
    pub fn log(&self) -> Result<NilMatrix> {
        self.check_shape(Q::one())?;
        let n = self.sub(&NilMatrix::identity())?;
        n.sub(&n.mul(&n)?.scale(Q::new(1, 2)?)?)
    }

    /// `∫₀¹ exp(sX) ds = I + X/2 + X²/6`.
    pub fn exp_average(&self) -> Result<NilMatrix> {
        self.check_shape(Q::zero())?;
        let x2 = self.mul(self)?;
        NilMatrix::identity()
            .add(&self.scale(Q::new(1, 2)?)?)?
            .add(&x2.scale(Q::new(1, 6)?)?)
    }
}

impl HeisPoint {
    pub fn new(variant: Variant, a: Q, b: Q, c: Q) -> HeisPoint {
        HeisPoint { variant, a, b, c }
    }

    pub fn identity(variant: Variant) -> HeisPoint {
        HeisPoint::new(variant, Q::zero(), Q::zero(), Q::zero())
    }

    /// Parse `a,b,c` with rational entries.
    pub fn parse(variant: Variant, s: &str) -> Result<HeisPoint> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Format(format!("expected three coordinates a,b,c, got `{s}`")));
        }
        Ok(HeisPoint::new(variant, parts[0].parse()?, parts[1].parse()?, parts[2].parse()?))
    }

    fn same_variant(&self, o: &HeisPoint) -> Result<()> {
        if self.variant != o.variant {
            return Err(Error::VariantMismatch(format!("{:?} vs {:?}", self.variant, o.variant)));
        }
        Ok(())
    }

    /// Group product: `(a+u, b+v, c+s+½(ub−va))` or, polarised, `(a+u, b+v, c+s+av)`.
    pub fn mul(&self, o: &HeisPoint) -> Result<HeisPoint> {
        self.same_variant(o)?;
        let twist = match self.variant {
            Variant::Standard => o.a.mul(self.b)?.sub(o.b.mul(self.a)?)?.mul(Q::new(1, 2)?)?,
            Variant::Polarised => self.a.mul(o.b)?,
        };
        Ok(HeisPoint::new(
            self.variant,
            self.a.add(o.a)?,
            self.b.add(o.b)?,
            self.c.add(o.c)?.add(twist)?,
        ))
    }

    pub fn inv(&self) -> Result<HeisPoint> {
        let c = match self.variant {
            Variant::Standard => self.c.neg()?,
            Variant::Polarised => self.c.neg()?.add(self.a.mul(self.b)?)?,
        };
        Ok(HeisPoint::new(self.variant, self.a.neg()?, self.b.neg()?, c))
    }

    /// Matrix picture: top-right entry `c` (polarised) or `ab/2 + c` (standard).
    pub fn to_matrix(&self) -> Result<NilMatrix> {
        let top = match self.variant {
            Variant::Polarised => self.c,
            Variant::Standard => self.a.mul(self.b)?.mul(Q::new(1, 2)?)?.add(self.c)?,
        };
        Ok(NilMatrix::upper(Q::one(), self.a, self.b, top))
    }

    pub fn from_matrix(variant: Variant, m: &NilMatrix) -> Result<HeisPoint> {
        m.check_shape(Q::one())?;
        let (a, b, top) = (m.0[0][1], m.0[1][2], m.0[0][2]);
        let c = match variant {
            Variant::Polarised => top,
            Variant::Standard => top.sub(a.mul(b)?.mul(Q::new(1, 2)?)?)?,
        };
        Ok(HeisPoint::new(variant, a, b, c))
    }

    /// Lie algebra element `log x` as a strictly upper-triangular matrix.
    pub fn log(&self) -> Result<NilMatrix> {
        self.to_matrix()?.log()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauMethod {
    Integral,
    Closed,
}

/// The symmetry function `τ(x) = ∫₀¹ exp(s log x) ds`.
///
/// The integrated matrix is read entry by entry as `(M₀₁, M₁₂, M₀₂)`.
pub fn symmetry_tau(p: &HeisPoint, method: TauMethod) -> Result<HeisPoint> {
    match method {
        TauMethod::Integral => {
            let m = p.log()?.exp_average()?;
            Ok(HeisPoint::new(p.variant, m.0[0][1], m.0[1][2], m.0[0][2]))
        }
        TauMethod::Closed => {
            let half = Q::new(1, 2)?;
            let ab = p.a.mul(p.b)?;
            let c = match p.variant {
                Variant::Polarised => p.c.mul(half)?.sub(ab.mul(Q::new(1, 12)?)?)?,
                Variant::Standard => p.c.mul(half)?.add(ab.mul(Q::new(1, 6)?)?)?,
            };
            Ok(HeisPoint::new(p.variant, p.a.mul(half)?, p.b.mul(half)?, c))
        }
    }
}

/// `τ(x) = τ(x⁻¹)·x`, evaluated exactly.
pub fn check_symmetry(p: &HeisPoint) -> Result<bool> {
    let lhs = symmetry_tau(p, TauMethod::Closed)?;
    let rhs = symmetry_tau(&p.inv()?, TauMethod::Closed)?.mul(p)?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct Midpoint {
    pub point: HeisPoint,
    /// Closed form, when one is known for the variant.
    pub closed: Option<HeisPoint>,
    pub agree: Option<bool>,
    /// No closed form is known for the polarised variant; only the group path is computed.
    pub extrapolated: bool,
}

/// `m(x, y) = x·τ(y⁻¹x)⁻¹` via the group law.
pub fn midpoint_group(x: &HeisPoint, y: &HeisPoint) -> Result<HeisPoint> {
    x.same_variant(y)?;
    let t = symmetry_tau(&y.inv()?.mul(x)?, TauMethod::Closed)?;
    x.mul(&t.inv()?)
}

/// `((a₁+a₂)/2, (b₁+b₂)/2, (c₁+c₂)/2 − (a₁−a₂)(b₁−b₂)/6)`, standard variant only.
pub fn midpoint_closed(x: &HeisPoint, y: &HeisPoint) -> Result<HeisPoint> {
    x.same_variant(y)?;
    if x.variant != Variant::Standard {
        return Err(Error::VariantMismatch("the closed midpoint is for the standard variant".into()));
    }
    let half = Q::new(1, 2)?;
    let twist = x.a.sub(y.a)?.mul(x.b.sub(y.b)?)?.mul(Q::new(1, 6)?)?;
    Ok(HeisPoint::new(
        x.variant,
        x.a.add(y.a)?.mul(half)?,
        x.b.add(y.b)?.mul(half)?,
        x.c.add(y.c)?.mul(half)?.sub(twist)?,
    ))
}

pub fn midpoint(x: &HeisPoint, y: &HeisPoint) -> Result<Midpoint> {
    let point = midpoint_group(x, y)?;
    match x.variant {
        Variant::Standard => {
            let closed = midpoint_closed(x, y)?;
            Ok(Midpoint { point, closed: Some(closed), agree: Some(closed == point), extrapolated: false })
        }
        Variant::Polarised => Ok(Midpoint { point, closed: None, agree: None, extrapolated: true }),
    }
}
