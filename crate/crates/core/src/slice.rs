//! Slice geometry.
//!
//! A non-real quaternion `x = ξ₀ + iξ₁ + jξ₂ + kξ₃` lies in exactly one
//! commutative plane spanned by `1` and the unit imaginary
//! `u = (iξ₁ + jξ₂ + kξ₃)/r`, with `r = √(ξ₁² + ξ₂² + ξ₃²)`. Inside that
//! plane `x` behaves like the complex number `ξ₀ + i·r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Imaginary radius at or below which a point counts as real.
pub const EPS_AXIS: f64 = 1e-12;

/// A purely imaginary quaternion of unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitImaginary(Quaternion);

impl UnitImaginary {
    pub const I: UnitImaginary = UnitImaginary(Quaternion::I);
    pub const J: UnitImaginary = UnitImaginary(Quaternion::J);
    pub const K: UnitImaginary = UnitImaginary(Quaternion::K);

    /// Drops the scalar part and renormalizes.
    pub fn new(q: Quaternion) -> Result<Self> {
        let r = q.imag_norm();
        if !r.is_finite() || r <= EPS_AXIS {
            return Err(Error::DegenerateSlice { r });
        }
        if q.w == 0.0 && (r - 1.0).abs() <= 4.0 * f64::EPSILON {
            // already unit; keep serialized values stable
            return Ok(Self(q));
        }
        Ok(Self(q.imag().scale(1.0 / r)))
    }

    #[inline]
    pub fn get(self) -> Quaternion {
        self.0
    }
}

impl<'de> Deserialize<'de> for UnitImaginary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = Quaternion::deserialize(d)?;
        UnitImaginary::new(q).map_err(serde::de::Error::custom)
    }
}

impl From<UnitImaginary> for Quaternion {
    fn from(u: UnitImaginary) -> Self {
        u.0
    }
}

/// A quaternion written as `xi0 + r·u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub xi0: f64,
    pub r: f64,
    pub u: UnitImaginary,
}

impl SlicePoint {
    pub fn reconstruct(&self) -> Quaternion {
        Quaternion::real(self.xi0) + self.u.get().scale(self.r)
    }

    /// Maps `a + i·b` in the complex plane to `a + b·u`.
    #[inline]
    pub fn lift(&self, a: f64, b: f64) -> Quaternion {
        Quaternion::real(a) + self.u.get().scale(b)
    }
}

/// Decomposes `x` into its slice coordinates.
///
/// Fails with [`Error::DegenerateSlice`] on the real axis (`r ≤ EPS_AXIS`).
pub fn slice_point(x: Quaternion) -> Result<SlicePoint> {
    let r = x.imag_norm();
    if r <= EPS_AXIS {
        return Err(Error::DegenerateSlice { r });
    }
    Ok(SlicePoint {
        xi0: x.w,
        r,
        u: UnitImaginary(x.imag().scale(1.0 / r)),
    })
}

/// An increment split into the part commuting with `u` and the part
/// anticommuting with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSplit {
    pub parallel: Quaternion,
    pub perp: Quaternion,
}

/// `δ∥ = ½(δ − uδu)`, `δ⊥ = ½(δ + uδu)` with `u` the unit imaginary of `x`.
pub fn decompose_delta(x: Quaternion, delta: Quaternion) -> Result<DeltaSplit> {
    let sp = slice_point(x)?;
    Ok(split_with(sp.u, delta))
}

pub(crate) fn split_with(u: UnitImaginary, delta: Quaternion) -> DeltaSplit {
    let u = u.get();
    let udu = u * delta * u;
    DeltaSplit {
        parallel: (delta - udu).scale(0.5),
        perp: (delta + udu).scale(0.5),
    }
}
