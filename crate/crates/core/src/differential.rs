//! The first-order differential of a real-analytic function at a quaternion.
//!
//! For `x = ξ₀ + r·u` and an increment `δ = δ∥ + δ⊥`,
//!
//! ```text
//! 𝒟F(x)[δ] = F′(x)·δ∥ + [F(x) − F(x*)](x − x*)⁻¹·δ⊥
//! ```
//!
//! The bracketed quotient is the real scalar returned by
//! [`perp_quotient`](crate::function::perp_quotient). The result is linear in
//! `δ` for any `δ`, small or not.

use crate::error::Result;
use crate::function::{eval_derivative, perp_quotient, AnalyticFunction};
use crate::quaternion::Quaternion;
use crate::slice::{slice_point, split_with, EPS_AXIS};

pub fn differential(f: &AnalyticFunction, x: Quaternion, delta: Quaternion) -> Result<Quaternion> {
    let deriv = eval_derivative(f, x)?;
    if x.imag_norm() <= EPS_AXIS {
        // u is undefined; F′ is real and commutes with everything
        return Ok(deriv * delta);
    }
    let sp = slice_point(x)?;
    let split = split_with(sp.u, delta);
    let pq = perp_quotient(f, x)?;
    Ok(deriv * split.parallel + split.perp.scale(pq))
}

/// `Σ_{k=0}^{n} xᵏ·δ·xⁿ⁻ᵏ` by direct non-commutative multiplication.
///
/// This equals the differential of `xⁿ⁺¹`.
pub fn sym_product_sum(x: Quaternion, delta: Quaternion, n: u32) -> Quaternion {
    let powers: Vec<Quaternion> = std::iter::successors(Some(Quaternion::ONE), |p| Some(*p * x))
        .take(n as usize + 1)
        .collect();
    (0..=n as usize)
        .map(|k| powers[k] * delta * powers[n as usize - k])
        .sum()
}
