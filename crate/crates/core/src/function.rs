//! Real-analytic functions evaluated on quaternions through the complex slice.
//!
//! Every function here has real Taylor coefficients, so for `x = ξ₀ + r·u`
//! the value `F(x)` is obtained by evaluating `f(ξ₀ + i·r) = a + i·b` in the
//! complex plane and lifting it back as `a + b·u`. This makes
//! `F(x*) = F(x)*` hold exactly.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::slice::{slice_point, EPS_AXIS};

/// A truncated power series `Σ cₙ zⁿ` with a radius of convergence.
///
/// The number of stored coefficients is the truncation order `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
    radius: f64,
}

impl PowerSeries {
    /// `radius` may be `f64::INFINITY` for entire series.
    pub fn new(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("power series needs at least one coefficient".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("non-finite series coefficient {c}")));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { coeffs, radius })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs, f64::INFINITY)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn check_radius(&self, z: Complex64) -> Result<()> {
        let m = z.norm();
        if m >= self.radius {
            return Err(Error::domain(format!(
                "|x| = {m} is outside the radius of convergence {}",
                self.radius
            )));
        }
        Ok(())
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_radius(z)?;
        Ok(horner(self.coeffs.iter().copied(), z))
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_radius(z)?;
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| n as f64 * c);
        Ok(horner(d, z))
    }

    /// Coefficient-wise antiderivative with zero constant term.
    pub fn integrate(&self) -> PowerSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(n, c)| c / (n as f64 + 1.0)));
        PowerSeries {
            coeffs,
            radius: self.radius,
        }
    }

    /// Cauchy product truncated to degree `max_degree`.
    pub fn product(&self, other: &PowerSeries, max_degree: usize) -> PowerSeries {
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(max_degree + 1);
        let mut coeffs = vec![0.0; len];
        for (m, a) in self.coeffs.iter().enumerate() {
            for (n, b) in other.coeffs.iter().enumerate() {
                if m + n < len {
                    coeffs[m + n] += a * b;
                }
            }
        }
        PowerSeries {
            coeffs,
            radius: self.radius.min(other.radius),
        }
    }
}

/// Evaluates `Σ cₙ zⁿ` for coefficients given lowest degree first.
fn horner(coeffs: impl DoubleEndedIterator<Item = f64>, z: Complex64) -> Complex64 {
    coeffs.rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedKind {
    Exp,
    Sin,
    Cos,
    /// Principal natural logarithm.
    Ln,
    /// `1/(1 − x)`.
    Reciprocal,
    /// `ln(1 − x)`, principal branch; appears as an antiderivative.
    LnOneMinus,
    Monomial(u32),
}

impl NamedKind {
    fn name(self) -> &'static str {
        match self {
            NamedKind::Exp => "exp",
            NamedKind::Sin => "sin",
            NamedKind::Cos => "cos",
            NamedKind::Ln => "ln",
            NamedKind::Reciprocal => "reciprocal",
            NamedKind::LnOneMinus => "ln1m",
            NamedKind::Monomial(_) => "monomial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticFunction {
    Series(PowerSeries),
    /// `scale · kind(x)`.
    Named { kind: NamedKind, scale: f64 },
}

impl AnalyticFunction {
    pub fn named(kind: NamedKind) -> Self {
        AnalyticFunction::Named { kind, scale: 1.0 }
    }

    pub fn exp() -> Self {
        Self::named(NamedKind::Exp)
    }

    pub fn sin() -> Self {
        Self::named(NamedKind::Sin)
    }

    pub fn cos() -> Self {
        Self::named(NamedKind::Cos)
    }

    pub fn ln() -> Self {
        Self::named(NamedKind::Ln)
    }

    pub fn reciprocal() -> Self {
        Self::named(NamedKind::Reciprocal)
    }

    pub fn monomial(n: u32) -> Self {
        Self::named(NamedKind::Monomial(n))
    }

    pub fn series(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        PowerSeries::new(coeffs, radius).map(AnalyticFunction::Series)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        PowerSeries::polynomial(coeffs).map(AnalyticFunction::Series)
    }

    /// Parses either a JSON spec or a short name such as `exp`, `x`, `x^3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.starts_with('{') {
            return serde_json::from_str(spec)
                .map_err(|e| Error::Invalid(format!("bad function spec: {e}")));
        }
        let kind = match spec {
            "exp" => NamedKind::Exp,
            "sin" => NamedKind::Sin,
            "cos" => NamedKind::Cos,
            "ln" | "log" => NamedKind::Ln,
            "reciprocal" | "recip" => NamedKind::Reciprocal,
            "ln1m" => NamedKind::LnOneMinus,
            "x" => NamedKind::Monomial(1),
            other => {
                let n = other
                    .strip_prefix("x^")
                    .or_else(|| other.strip_prefix("monomial:"))
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown function `{other}`")))?;
                NamedKind::Monomial(n)
            }
        };
        Ok(Self::named(kind))
    }

    /// True when the function has no singularities or branch cuts.
    pub fn is_entire(&self) -> bool {
        match self {
            AnalyticFunction::Series(s) => s.radius.is_infinite(),
            AnalyticFunction::Named { kind, .. } => matches!(
                kind,
                NamedKind::Exp | NamedKind::Sin | NamedKind::Cos | NamedKind::Monomial(_)
            ),
        }
    }

    /// Functions whose value does not depend on the path history.
    pub fn is_single_valued(&self) -> bool {
        match self {
            AnalyticFunction::Series(_) => true,
            AnalyticFunction::Named { kind, .. } => !matches!(kind, NamedKind::Ln | NamedKind::LnOneMinus),
        }
    }

    /// `f(z)` on the complex plane.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            AnalyticFunction::Series(s) => s.eval(z),
            AnalyticFunction::Named { kind, scale } => {
                let v = match kind {
                    NamedKind::Exp => z.exp(),
                    NamedKind::Sin => z.sin(),
                    NamedKind::Cos => z.cos(),
                    NamedKind::Ln => {
                        nonzero(z, "ln")?;
                        z.ln()
                    }
                    NamedKind::Reciprocal => nonzero(1.0 - z, "1/(1 - x)")?.inv(),
                    NamedKind::LnOneMinus => nonzero(1.0 - z, "ln(1 - x)")?.ln(),
                    NamedKind::Monomial(n) => powu(z, *n),
                };
                Ok(v * scale)
            }
        }
    }

    /// `f′(z)` on the complex plane.
    pub fn derivative_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            AnalyticFunction::Series(s) => s.derivative(z),
            AnalyticFunction::Named { kind, scale } => {
                let v = match kind {
                    NamedKind::Exp => z.exp(),
                    NamedKind::Sin => z.cos(),
                    NamedKind::Cos => -z.sin(),
                    NamedKind::Ln => nonzero(z, "ln")?.inv(),
                    NamedKind::Reciprocal => {
                        let w = nonzero(1.0 - z, "1/(1 - x)")?.inv();
                        w * w
                    }
                    NamedKind::LnOneMinus => -nonzero(1.0 - z, "ln(1 - x)")?.inv(),
                    NamedKind::Monomial(0) => Complex64::new(0.0, 0.0),
                    NamedKind::Monomial(n) => powu(z, n - 1) * (*n as f64),
                };
                Ok(v * scale)
            }
        }
    }

    /// Rejects real arguments where the real function is undefined.
    fn check_real_domain(&self, t: f64) -> Result<()> {
        match self {
            AnalyticFunction::Named {
                kind: NamedKind::Ln, ..
            } if t <= 0.0 => Err(Error::domain(format!("ln is undefined at real x = {t}"))),
            AnalyticFunction::Named {
                kind: NamedKind::LnOneMinus,
                ..
            } if t >= 1.0 => Err(Error::domain(format!("ln(1 - x) is undefined at real x = {t}"))),
            _ => Ok(()),
        }
    }

    fn real_value(&self, t: f64) -> Result<f64> {
        self.check_real_domain(t)?;
        Ok(self.eval_complex(Complex64::new(t, 0.0))?.re)
    }

    fn real_derivative(&self, t: f64) -> Result<f64> {
        self.check_real_domain(t)?;
        Ok(self.derivative_complex(Complex64::new(t, 0.0))?.re)
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

fn nonzero(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(Error::domain(format!("{what} is singular here")))
    } else {
        Ok(z)
    }
}

fn powu(z: Complex64, n: u32) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticFunction::Series(s) => write!(f, "series{:?}", s.coeffs),
            AnalyticFunction::Named { kind, scale } => {
                if *scale != 1.0 {
                    write!(f, "{scale}*")?;
                }
                match kind {
                    NamedKind::Monomial(1) => write!(f, "x"),
                    NamedKind::Monomial(n) => write!(f, "x^{n}"),
                    k => write!(f, "{}", k.name()),
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FunctionSpec {
    Series {
        coeffs: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

impl Serialize for AnalyticFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = match self {
            AnalyticFunction::Series(p) => FunctionSpec::Series {
                coeffs: p.coeffs.clone(),
                radius: p.radius.is_finite().then_some(p.radius),
            },
            AnalyticFunction::Named { kind, scale } => FunctionSpec::Named {
                name: kind.name().to_string(),
                n: match kind {
                    NamedKind::Monomial(n) => Some(*n),
                    _ => None,
                },
                scale: (*scale != 1.0).then_some(*scale),
            },
        };
        spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnalyticFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match FunctionSpec::deserialize(d)? {
            FunctionSpec::Series { coeffs, radius } => {
                AnalyticFunction::series(coeffs, radius.unwrap_or(f64::INFINITY)).map_err(D::Error::custom)
            }
            FunctionSpec::Named { name, n, scale } => {
                let kind = match (name.as_str(), n) {
                    ("monomial", Some(n)) => NamedKind::Monomial(n),
                    ("monomial", None) => return Err(D::Error::custom("monomial needs an exponent `n`")),
                    (other, _) => match AnalyticFunction::parse(other).map_err(D::Error::custom)? {
                        AnalyticFunction::Named { kind, .. } => kind,
                        AnalyticFunction::Series(_) => unreachable!("names never parse to series"),
                    },
                };
                let scale = scale.unwrap_or(1.0);
                if !scale.is_finite() {
                    return Err(D::Error::custom("scale must be finite"));
                }
                Ok(AnalyticFunction::Named { kind, scale })
            }
        }
    }
}

/// `F(x)`; at real `x` the real function value.
pub fn eval_function(f: &AnalyticFunction, x: Quaternion) -> Result<Quaternion> {
    if x.imag_norm() <= EPS_AXIS {
        return Ok(Quaternion::real(f.real_value(x.w)?));
    }
    let sp = slice_point(x)?;
    let v = f.eval_complex(Complex64::new(sp.xi0, sp.r))?;
    Ok(sp.lift(v.re, v.im))
}

/// `F′(x)`, lifted from the slice like [`eval_function`].
pub fn eval_derivative(f: &AnalyticFunction, x: Quaternion) -> Result<Quaternion> {
    if x.imag_norm() <= EPS_AXIS {
        return Ok(Quaternion::real(f.real_derivative(x.w)?));
    }
    let sp = slice_point(x)?;
    let v = f.derivative_complex(Complex64::new(sp.xi0, sp.r))?;
    Ok(sp.lift(v.re, v.im))
}

/// The real scalar `[F(x) − F(x*)](x − x*)⁻¹`, computed as `b/r` where
/// `f(ξ₀ + i·r) = a + i·b`. On the real axis this is the limit `f′(ξ₀)`.
pub fn perp_quotient(f: &AnalyticFunction, x: Quaternion) -> Result<f64> {
    let r = x.imag_norm();
    if r <= EPS_AXIS {
        return f.real_derivative(x.w);
    }
    let v = f.eval_complex(Complex64::new(x.w, r))?;
    Ok(v.im / r)
}

/// Local representation `F(x) = a + b·x` with real `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceForm {
    pub a: f64,
    pub b: f64,
}

impl SliceForm {
    pub fn apply(&self, x: Quaternion) -> Quaternion {
        Quaternion::real(self.a) + x.scale(self.b)
    }
}

/// Fails on the real axis, where `b` is not unique.
pub fn slice_form(f: &AnalyticFunction, x: Quaternion) -> Result<SliceForm> {
    let sp = slice_point(x)?;
    let v = f.eval_complex(Complex64::new(sp.xi0, sp.r))?;
    let b = v.im / sp.r;
    Ok(SliceForm {
        a: v.re - b * sp.xi0,
        b,
    })
}

/// An antiderivative `h` with `h′ = f`.
///
/// Series integrate term by term with zero constant term. Named kinds map
/// through a fixed table: exp → exp, cos → sin, sin → −cos,
/// 1/(1−x) → −ln(1−x), xⁿ → xⁿ⁺¹/(n+1).
pub fn antiderivative(f: &AnalyticFunction) -> Result<AnalyticFunction> {
    match f {
        AnalyticFunction::Series(s) => Ok(AnalyticFunction::Series(s.integrate())),
        AnalyticFunction::Named { kind, scale } => {
            let (kind, sign) = match kind {
                NamedKind::Exp => (NamedKind::Exp, 1.0),
                NamedKind::Cos => (NamedKind::Sin, 1.0),
                NamedKind::Sin => (NamedKind::Cos, -1.0),
                NamedKind::Reciprocal => (NamedKind::LnOneMinus, -1.0),
                NamedKind::Monomial(n) => {
                    let n = *n as usize;
                    let mut coeffs = vec![0.0; n + 2];
                    coeffs[n + 1] = scale / (n as f64 + 1.0);
                    return AnalyticFunction::polynomial(coeffs);
                }
                k @ (NamedKind::Ln | NamedKind::LnOneMinus) => {
                    return Err(Error::Unsupported(format!(
                        "no antiderivative registered for {}",
                        k.name()
                    )))
                }
            };
            Ok(AnalyticFunction::Named {
                kind,
                scale: sign * scale,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slice::UnitImaginary;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn q(w: f64, a: f64, b: f64, c: f64) -> Quaternion {
        Quaternion::new(w, a, b, c)
    }

    fn unit(a: f64, b: f64, c: f64) -> Quaternion {
        UnitImaginary::new(q(0., a, b, c)).unwrap().get()
    }

    #[test]
    fn euler_identity_in_every_slice() {
        for u in [unit(1., 0., 0.), unit(0., 1., 1.), unit(-1., 2., 3.)] {
            let v = eval_function(&AnalyticFunction::exp(), u.scale(PI)).unwrap();
            assert!(v.approx_eq(-Quaternion::ONE, 1e-15), "{v}");
            let d = eval_derivative(&AnalyticFunction::exp(), u.scale(PI)).unwrap();
            assert!(d.approx_eq(-Quaternion::ONE, 1e-15));
        }
    }

    #[test]
    fn eval_examples() {
        let v = eval_function(&AnalyticFunction::reciprocal(), Quaternion::real(0.5)).unwrap();
        assert_eq!(v, Quaternion::real(2.0));
        let x = q(1., 1., 0., 0.);
        assert!(eval_function(&AnalyticFunction::monomial(2), x)
            .unwrap()
            .approx_eq(x * x, 1e-15));
        assert!(eval_function(&AnalyticFunction::monomial(2), x)
            .unwrap()
            .approx_eq(q(0., 2., 0., 0.), 1e-15));
    }

    #[test]
    fn derivative_examples() {
        let d = eval_derivative(&AnalyticFunction::monomial(3), Quaternion::real(2.0)).unwrap();
        assert_eq!(d, Quaternion::real(12.0));
        let x = q(1., 0., 1., 0.);
        let d = eval_derivative(&AnalyticFunction::monomial(2), x).unwrap();
        assert!(d.approx_eq(q(2., 0., 2., 0.), 1e-15));
    }

    #[test]
    fn domain_errors() {
        let s = AnalyticFunction::series(vec![1.0; 40], 1.0).unwrap();
        assert!(matches!(eval_function(&s, q(0.9, 0.5, 0., 0.)), Err(Error::Domain(_))));
        assert!(eval_function(&s, q(0.5, 0.5, 0., 0.)).is_ok());
        let ln = AnalyticFunction::ln();
        assert!(matches!(eval_function(&ln, Quaternion::ZERO), Err(Error::Domain(_))));
        assert!(matches!(eval_function(&ln, Quaternion::real(-1.0)), Err(Error::Domain(_))));
        assert!(eval_function(&ln, q(-1., 0., 1., 0.)).is_ok());
        assert!(matches!(
            eval_function(&AnalyticFunction::reciprocal(), Quaternion::ONE),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ln_principal_branch() {
        // ln(−1 + 0·u) approached from inside the j-slice
        let v = eval_function(&AnalyticFunction::ln(), q(-1., 0., 1e-9, 0.)).unwrap();
        assert!(v.approx_eq(q(0., 0., PI, 0.), 1e-8));
        let v = eval_function(&AnalyticFunction::ln(), Quaternion::real(E)).unwrap();
        assert!(v.approx_eq(Quaternion::ONE, 1e-15));
    }

    #[test]
    fn truncated_geometric_series_matches_reciprocal() {
        let s = AnalyticFunction::series(vec![1.0; 200], 1.0).unwrap();
        let x = q(0.2, -0.1, 0.3, 0.25);
        let a = eval_function(&s, x).unwrap();
        let b = eval_function(&AnalyticFunction::reciprocal(), x).unwrap();
        assert!(a.approx_eq(b, 1e-14));
        // the quaternion inverse formula agrees too
        let c = (Quaternion::ONE - x).inverse().unwrap();
        assert!(a.approx_eq(c, 1e-14));
    }

    #[test]
    fn perp_quotient_examples() {
        for x in [q(1.5, 0.3, -0.2, 0.7), q(-2., 0., 1., 0.), q(0.1, 1e-6, 0., 0.)] {
            let pq = perp_quotient(&AnalyticFunction::monomial(2), x).unwrap();
            assert!((pq - 2.0 * x.w).abs() <= 1e-12 * x.w.abs().max(1.0), "{pq}");
            let pq1 = perp_quotient(&AnalyticFunction::monomial(1), x).unwrap();
            assert!((pq1 - 1.0).abs() < 1e-15);
        }
        let pq = perp_quotient(&AnalyticFunction::exp(), Quaternion::real(3.0)).unwrap();
        assert_eq!(pq, 3f64.exp());
    }

    #[test]
    fn slice_form_examples() {
        let x = q(0.7, 0.2, -1.1, 0.4);
        let sf = slice_form(&AnalyticFunction::monomial(1), x).unwrap();
        assert!((sf.a).abs() < 1e-15 && (sf.b - 1.0).abs() < 1e-15);

        let sf = slice_form(&AnalyticFunction::monomial(2), x).unwrap();
        let r2 = x.imag_norm().powi(2);
        assert!((sf.a + (x.w * x.w + r2)).abs() < 1e-14);
        assert!((sf.b - 2.0 * x.w).abs() < 1e-14);
        assert!(sf.apply(x).approx_eq(x * x, 1e-14));

        let c = AnalyticFunction::polynomial(vec![4.5]).unwrap();
        assert_eq!(slice_form(&c, x).unwrap(), SliceForm { a: 4.5, b: 0.0 });

        assert!(matches!(
            slice_form(&AnalyticFunction::exp(), Quaternion::real(1.0)),
            Err(Error::DegenerateSlice { .. })
        ));
    }

    #[test]
    fn antiderivative_table() {
        let h = antiderivative(&AnalyticFunction::polynomial(vec![0., 0., 1.]).unwrap()).unwrap();
        assert_eq!(h, AnalyticFunction::polynomial(vec![0., 0., 0., 1. / 3.]).unwrap());
        let h = antiderivative(&AnalyticFunction::polynomial(vec![1.]).unwrap()).unwrap();
        assert_eq!(h, AnalyticFunction::polynomial(vec![0., 1.]).unwrap());
        assert_eq!(antiderivative(&AnalyticFunction::exp()).unwrap(), AnalyticFunction::exp());
        assert_eq!(antiderivative(&AnalyticFunction::cos()).unwrap(), AnalyticFunction::sin());
        assert_eq!(
            antiderivative(&AnalyticFunction::sin()).unwrap(),
            AnalyticFunction::Named { kind: NamedKind::Cos, scale: -1.0 }
        );
        assert_eq!(
            antiderivative(&AnalyticFunction::reciprocal()).unwrap(),
            AnalyticFunction::Named { kind: NamedKind::LnOneMinus, scale: -1.0 }
        );
        assert_eq!(
            antiderivative(&AnalyticFunction::monomial(2)).unwrap(),
            AnalyticFunction::polynomial(vec![0., 0., 0., 1. / 3.]).unwrap()
        );
        assert!(matches!(antiderivative(&AnalyticFunction::ln()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn json_forms() {
        let f: AnalyticFunction =
            serde_json::from_str(r#"{"kind":"series","coeffs":[0,0,1],"radius":1e9}"#).unwrap();
        assert_eq!(f, AnalyticFunction::series(vec![0., 0., 1.], 1e9).unwrap());
        let f: AnalyticFunction = serde_json::from_str(r#"{"kind":"named","name":"exp"}"#).unwrap();
        assert_eq!(f, AnalyticFunction::exp());
        let f: AnalyticFunction =
            serde_json::from_str(r#"{"kind":"named","name":"monomial","n":3}"#).unwrap();
        assert_eq!(f, AnalyticFunction::monomial(3));
        assert!(serde_json::from_str::<AnalyticFunction>(r#"{"kind":"named","name":"tan"}"#).is_err());
        assert!(serde_json::from_str::<AnalyticFunction>(r#"{"kind":"series","coeffs":[]}"#).is_err());
        assert!(
            serde_json::from_str::<AnalyticFunction>(r#"{"kind":"series","coeffs":[1],"radius":-1}"#)
                .is_err()
        );
        for f in [
            AnalyticFunction::monomial(4),
            AnalyticFunction::Named { kind: NamedKind::Cos, scale: -1.0 },
            AnalyticFunction::series(vec![1., 2.], 3.0).unwrap(),
            AnalyticFunction::polynomial(vec![1., 2.]).unwrap(),
        ] {
            let s = serde_json::to_string(&f).unwrap();
            assert_eq!(serde_json::from_str::<AnalyticFunction>(&s).unwrap(), f, "{s}");
        }
        assert_eq!(AnalyticFunction::parse("x^3").unwrap(), AnalyticFunction::monomial(3));
        assert_eq!(AnalyticFunction::parse("x").unwrap(), AnalyticFunction::monomial(1));
        assert!(AnalyticFunction::parse("nope").is_err());
    }

    #[test]
    fn product_of_series() {
        let a = PowerSeries::polynomial(vec![1., 2.]).unwrap();
        let b = PowerSeries::polynomial(vec![-1., 0., 3.]).unwrap();
        assert_eq!(a.product(&b, 12).coeffs(), &[-1., -2., 3., 6.]);
        assert_eq!(a.product(&b, 1).coeffs(), &[-1., -2.]);
    }

    fn catalog() -> Vec<AnalyticFunction> {
        vec![
            AnalyticFunction::exp(),
            AnalyticFunction::sin(),
            AnalyticFunction::cos(),
            AnalyticFunction::monomial(3),
            AnalyticFunction::polynomial(vec![0.5, -1.0, 0.25, 2.0]).unwrap(),
            AnalyticFunction::ln(),
        ]
    }

    fn arb_quat(lo: f64, hi: f64) -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(lo..hi).prop_map(|c| q(c[0], c[1], c[2], c[3]))
    }

    proptest! {
        #[test]
        fn values_stay_in_the_slice(x in arb_quat(-2.0, 2.0)) {
            prop_assume!(x.imag_norm() > 1e-6);
            for f in catalog() {
                let v = eval_function(&f, x).unwrap();
                prop_assert!((v * x).approx_eq(x * v, 1e-10));
            }
        }

        #[test]
        fn conjugation_equivariance(x in arb_quat(-2.0, 2.0)) {
            prop_assume!(x.imag_norm() > 1e-6);
            for f in catalog() {
                let a = eval_function(&f, x.conj()).unwrap();
                let b = eval_function(&f, x).unwrap().conj();
                prop_assert!(a.approx_eq(b, 1e-10));
            }
        }

        #[test]
        fn perp_quotient_matches_conjugate_difference(
            w in -2.0f64..2.0,
            r in 1e-6f64..10.0,
            dir in arb_quat(-1.0, 1.0),
        ) {
            prop_assume!(dir.imag_norm() > 1e-3);
            let u = UnitImaginary::new(dir).unwrap().get();
            let x = Quaternion::real(w) + u.scale(r);
            let fns = [
                AnalyticFunction::exp(),
                AnalyticFunction::sin(),
                AnalyticFunction::cos(),
                AnalyticFunction::monomial(3),
                AnalyticFunction::polynomial(vec![0.5, -1.0, 0.25, 2.0]).unwrap(),
            ];
            for f in fns {
                let pq = perp_quotient(&f, x).unwrap();
                let full = (eval_function(&f, x).unwrap() - eval_function(&f, x.conj()).unwrap())
                    * (x - x.conj()).inverse().unwrap();
                prop_assert!(full.approx_eq(Quaternion::real(pq), 1e-9), "{f}: {pq} vs {full}");
            }
        }

        #[test]
        fn slice_form_reproduces_value(x in arb_quat(-2.0, 2.0)) {
            prop_assume!(x.imag_norm() > 1e-6);
            for f in catalog() {
                let sf = slice_form(&f, x).unwrap();
                prop_assert!(sf.apply(x).approx_eq(eval_function(&f, x).unwrap(), 1e-10));
            }
        }

        #[test]
        fn antiderivative_then_derivative(x in arb_quat(-0.5, 0.5), coeffs in prop::collection::vec(-2.0f64..2.0, 1..12)) {
            let f = AnalyticFunction::series(coeffs, 1.0).unwrap();
            prop_assume!(x.norm() < 0.9);
            let h = antiderivative(&f).unwrap();
            let lhs = eval_derivative(&h, x).unwrap();
            prop_assert!(lhs.approx_eq(eval_function(&f, x).unwrap(), 1e-10));
            for g in [AnalyticFunction::exp(), AnalyticFunction::sin(), AnalyticFunction::cos(), AnalyticFunction::reciprocal(), AnalyticFunction::monomial(3)] {
                let h = antiderivative(&g).unwrap();
                prop_assert!(eval_derivative(&h, x).unwrap().approx_eq(eval_function(&g, x).unwrap(), 1e-10));
            }
        }
    }
}
