//! Double-precision quaternion arithmetic.
//!
//! Components are stored scalar-first as `(w, x1, x2, x3)`, i.e. the value
//! `w + i·x1 + j·x2 + k·x3`. The JSON form is the array `[w, x1, x2, x3]`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default tolerance for [`Quaternion::approx_eq_default`].
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { w, x1, x2, x3 }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Builds a quaternion from `[w, x1, x2, x3]`, rejecting NaN and infinities.
    pub fn try_from_array(c: [f64; 4]) -> Result<Self> {
        if c.iter().all(|v| v.is_finite()) {
            Ok(Self::new(c[0], c[1], c[2], c[3]))
        } else {
            Err(Error::Invalid(format!(
                "quaternion components must be finite, got {c:?}"
            )))
        }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x1, self.x2, self.x3]
    }

    /// The imaginary part `i·x1 + j·x2 + k·x3`.
    #[inline]
    pub fn imag(self) -> Self {
        Self::new(0.0, self.x1, self.x2, self.x3)
    }

    /// Euclidean length of the imaginary part.
    #[inline]
    pub fn imag_norm(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary at the magnitudes we handle
        self.norm_sqr().sqrt()
    }

    /// Largest absolute component.
    #[inline]
    pub fn max_norm(self) -> f64 {
        self.w.abs().max(self.x1.abs()).max(self.x2.abs()).max(self.x3.abs())
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x1, -self.x2, -self.x3)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// Multiplicative inverse `conj(q) / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Dot product of the four components viewed as a vector in R⁴.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// `|a − b|∞ ≤ max(tol, tol · max(|a|∞, |b|∞))`.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        let diff = (self - other).max_norm();
        let scale = self.max_norm().max(other.max_norm());
        diff <= tol.max(tol * scale)
    }

    pub fn approx_eq_default(self, other: Self) -> bool {
        self.approx_eq(other, DEFAULT_TOLERANCE)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x1, -self.x2, -self.x3)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3,
            a.w * b.x1 + a.x1 * b.w + a.x2 * b.x3 - a.x3 * b.x2,
            a.w * b.x2 - a.x1 * b.x3 + a.x2 * b.w + a.x3 * b.x1,
            a.w * b.x3 + a.x1 * b.x2 - a.x2 * b.x1 + a.x3 * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x1 / s, self.x2 / s, self.x3 / s)
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Display for Quaternion {
    /// Prints the JSON array form with 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.16e}, {:.16e}, {:.16e}, {:.16e}]",
            self.w, self.x1, self.x2, self.x3
        )
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let c = <[f64; 4]>::deserialize(deserializer)?;
        Quaternion::try_from_array(c).map_err(serde::de::Error::custom)
    }
}

/// Neumaier-compensated running sum of quaternions.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: [f64; 4],
    carry: [f64; 4],
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, q: Quaternion) {
        for (k, v) in q.to_array().into_iter().enumerate() {
            let s = self.sum[k];
            let t = s + v;
            if s.abs() >= v.abs() {
                self.carry[k] += (s - t) + v;
            } else {
                self.carry[k] += (v - t) + s;
            }
            self.sum[k] = t;
        }
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(Quaternion::new(other.sum[0], other.sum[1], other.sum[2], other.sum[3]));
        for k in 0..4 {
            self.carry[k] += other.carry[k];
        }
    }

    pub fn value(&self) -> Quaternion {
        Quaternion::new(
            self.sum[0] + self.carry[0],
            self.sum[1] + self.carry[1],
            self.sum[2] + self.carry[2],
            self.sum[3] + self.carry[3],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    fn q(w: f64, a: f64, b: f64, c: f64) -> Quaternion {
        Quaternion::new(w, a, b, c)
    }

    /// Independent product: expand the 16 basis products term by term.
    fn basis_expansion_product(a: Quaternion, b: Quaternion) -> Quaternion {
        // table[m][n] = (sign, index) for e_m * e_n with e = (1, i, j, k)
        const TABLE: [[(f64, usize); 4]; 4] = [
            [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
            [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
            [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
            [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
        ];
        let (ac, bc) = (a.to_array(), b.to_array());
        let mut out = [0.0; 4];
        for m in 0..4 {
            for n in 0..4 {
                let (sign, idx) = TABLE[m][n];
                out[idx] += sign * ac[m] * bc[n];
            }
        }
        Quaternion::new(out[0], out[1], out[2], out[3])
    }

    #[test]
    fn basis_relations() {
        assert_eq!(I * J, K);
        assert_eq!(J * I, -K);
        assert_eq!(I * J, -(J * I));
        assert_eq!(I * I, -Quaternion::ONE);
        assert_eq!(J * J, -Quaternion::ONE);
        assert_eq!(K * K, -Quaternion::ONE);
        assert_eq!(I * J * K, -Quaternion::ONE);
    }

    #[test]
    fn one_plus_i_squared() {
        assert_eq!(q(1., 1., 0., 0.) * q(1., 1., 0., 0.), q(0., 2., 0., 0.));
    }

    #[test]
    fn conjugation() {
        assert_eq!(q(1., 1., 1., 1.).conj(), q(1., -1., -1., -1.));
        assert_eq!(Quaternion::real(5.0).conj(), Quaternion::real(5.0));
    }

    #[test]
    fn inverses() {
        assert_eq!(q(0., 2., 0., 0.).inverse().unwrap(), q(0., -0.5, 0., 0.));
        assert_eq!(Quaternion::ONE.inverse().unwrap(), Quaternion::ONE);
        let inv = q(1., 0., 1., 0.).inverse().unwrap();
        assert!(inv.approx_eq(q(0.5, 0., -0.5, 0.), 1e-15));
        assert!((q(1., 0., 1., 0.) * inv).approx_eq(Quaternion::ONE, 1e-15));
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::ZeroDivisor));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Quaternion::try_from_array([0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(serde_json::from_str::<Quaternion>("[1, 2, 3]").is_err());
        let parsed: Quaternion = serde_json::from_str("[1, 2, 3, 4]").unwrap();
        assert_eq!(parsed, q(1., 2., 3., 4.));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = q(0.3, -1.2, 0.7, 0.4);
        let mut acc = Quaternion::ONE;
        for n in 0..8 {
            assert!(x.powi(n).approx_eq(acc, 1e-14));
            acc = acc * x;
        }
    }

    #[test]
    fn approx_eq_is_relative_at_large_magnitude() {
        let a = Quaternion::real(1e3);
        let b = Quaternion::real(1e3 + 1e-8);
        assert!(a.approx_eq_default(b));
        assert!(!Quaternion::real(1e-3).approx_eq_default(Quaternion::real(1e-3 + 1e-9)));
    }

    #[test]
    fn compensated_sum_telescopes_deltas() {
        let a = q(0.1, 0.2, 0.3, 0.4);
        let b = q(1.7, -0.9, 2.3, 0.0);
        let n = 100_000;
        let pts: Vec<_> = (0..=n)
            .map(|k| a + (b - a).scale(k as f64 / n as f64))
            .collect();
        let mut sum = CompensatedSum::new();
        for w in pts.windows(2) {
            sum.add(w[1] - w[0]);
        }
        assert!((sum.value() - (b - a)).max_norm() < 1e-15);
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(|c| q(c[0], c[1], c[2], c[3]))
    }

    proptest! {
        #[test]
        fn product_matches_basis_expansion(a in arb_quat(), b in arb_quat()) {
            prop_assert!((a * b).approx_eq(basis_expansion_product(a, b), 1e-13));
        }

        #[test]
        fn associative(a in arb_quat(), b in arb_quat(), c in arb_quat()) {
            prop_assert!(((a * b) * c).approx_eq(a * (b * c), 1e-12));
        }

        #[test]
        fn norm_is_multiplicative(a in arb_quat(), b in arb_quat()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn conj_reverses_products(a in arb_quat(), b in arb_quat()) {
            prop_assert!((a * b).conj().approx_eq(b.conj() * a.conj(), 1e-13));
        }

        #[test]
        fn q_commutes_with_its_conjugate(a in arb_quat()) {
            let lhs = a * a.conj();
            prop_assert!(lhs.approx_eq(a.conj() * a, 1e-14));
            prop_assert!(lhs.approx_eq(Quaternion::real(a.norm_sqr()), 1e-13));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_quat()) {
            prop_assume!(a.norm() > 1e-3);
            let inv = a.inverse().unwrap();
            prop_assert!((a * inv).approx_eq(Quaternion::ONE, 1e-12));
            prop_assert!((inv * a).approx_eq(Quaternion::ONE, 1e-12));
        }

        #[test]
        fn json_round_trip(a in arb_quat()) {
            let s = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<Quaternion>(&s).unwrap(), a);
            let d: Quaternion = serde_json::from_str(&a.to_string()).unwrap();
            prop_assert_eq!(d, a);
        }
    }
}
