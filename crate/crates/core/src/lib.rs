//! Differential calculus and path integration for real-analytic functions
//! of a quaternionic variable.
//!
//! The differential of `F` at `x` applied to an increment `δ` is
//!
//! ```text
//! 𝒟F(x)[δ] = F′(x)·δ∥ + [F(x) − F(x*)](x − x*)⁻¹·δ⊥
//! ```
//!
//! where `δ∥` commutes with the unit imaginary of `x` and `δ⊥` anticommutes
//! with it. Integrating `𝒟F` along any path from `x_a` to `x_b` gives
//! `F(x_b) − F(x_a)`. This crate evaluates both sides numerically and ships
//! a harness that checks the identities that follow from it.
//!
//! ```
//! use qint_core::{integrate, AnalyticFunction, Path, Quaternion, Rule};
//!
//! let f = AnalyticFunction::monomial(2);
//! let path = Path::line(Quaternion::ZERO, Quaternion::J);
//! let report = integrate(&f, &path, 10_000, Rule::Left).unwrap();
//! assert!(report.value.approx_eq(-Quaternion::ONE, 1e-3));
//! ```

pub mod differential;
pub mod error;
pub mod function;
pub mod integrate;
pub mod path;
pub mod quaternion;
pub mod slice;
pub mod stats;
pub mod verify;

pub use differential::{differential, sym_product_sum};
pub use error::{Error, ErrorKind, Result};
pub use function::{
    antiderivative, eval_derivative, eval_function, perp_quotient, slice_form, AnalyticFunction,
    NamedKind, PowerSeries, SliceForm,
};
pub use integrate::{
    convergence_study, integrate, integrate_slice_quadrature, integrate_with_branch_tracking,
    IntegrationReport, Integrator, Rule, StudyRow,
};
pub use path::Path;
pub use quaternion::Quaternion;
pub use slice::{decompose_delta, slice_point, DeltaSplit, SlicePoint, UnitImaginary, EPS_AXIS};
