//! Parameterized paths `s ∈ [0, 1] ↦ x(s)` in quaternion space.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::slice::{slice_point, UnitImaginary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawPath")]
pub enum Path {
    /// Straight segment `a + s·(b − a)`.
    Line { a: Quaternion, b: Quaternion },
    /// Consecutive straight segments; each takes an equal share of `s`.
    #[serde(rename = "polyline")]
    PolyLine { points: Vec<Quaternion> },
    /// `center + radius·(cos θ + u·sin θ)` with `θ = 2π·turns·s`; stays in
    /// the slice of `u`.
    #[serde(rename = "circle")]
    SliceCircle {
        center: f64,
        radius: f64,
        u: UnitImaginary,
        turns: f64,
    },
    /// Curve between two non-real points that interpolates the scalar part
    /// and imaginary radius linearly while the unit imaginary sweeps the
    /// great circle from `u_a` to `u_b`. Every point lies in a different slice.
    Arc { a: Quaternion, b: Quaternion },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawPath {
    Line {
        a: Quaternion,
        b: Quaternion,
    },
    Polyline {
        points: Vec<Quaternion>,
    },
    Circle {
        center: f64,
        radius: f64,
        u: UnitImaginary,
        #[serde(default = "one")]
        turns: f64,
    },
    Arc {
        a: Quaternion,
        b: Quaternion,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawPath> for Path {
    type Error = Error;

    fn try_from(raw: RawPath) -> Result<Self> {
        match raw {
            RawPath::Line { a, b } => Ok(Path::line(a, b)),
            RawPath::Polyline { points } => Path::polyline(points),
            RawPath::Circle {
                center,
                radius,
                u,
                turns,
            } => Path::slice_circle(center, radius, u, turns),
            RawPath::Arc { a, b } => Path::arc(a, b),
        }
    }
}

impl Path {
    pub fn line(a: Quaternion, b: Quaternion) -> Self {
        Path::Line { a, b }
    }

    pub fn polyline(points: Vec<Quaternion>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Invalid("a polyline needs at least two points".into()));
        }
        Ok(Path::PolyLine { points })
    }

    pub fn slice_circle(center: f64, radius: f64, u: UnitImaginary, turns: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Invalid(format!("circle radius must be positive, got {radius}")));
        }
        if !center.is_finite() || !turns.is_finite() {
            return Err(Error::Invalid("circle center and turns must be finite".into()));
        }
        Ok(Path::SliceCircle {
            center,
            radius,
            u,
            turns,
        })
    }

    pub fn arc(a: Quaternion, b: Quaternion) -> Result<Self> {
        let (pa, pb) = (slice_point(a)?, slice_point(b)?);
        let cos = pa.u.get().dot(pb.u.get());
        if cos <= -1.0 + 1e-12 {
            return Err(Error::Invalid(
                "arc endpoints have opposite unit imaginaries; the sweep is ambiguous".into(),
            ));
        }
        Ok(Path::Arc { a, b })
    }

    /// Parses a JSON path spec.
    pub fn parse(spec: &str) -> Result<Self> {
        serde_json::from_str(spec.trim()).map_err(|e| Error::Invalid(format!("bad path spec: {e}")))
    }

    pub fn point(&self, s: f64) -> Quaternion {
        match self {
            Path::Line { a, b } => *a + (*b - *a).scale(s),
            Path::PolyLine { points } => {
                let segs = points.len() - 1;
                let t = s.clamp(0.0, 1.0) * segs as f64;
                let k = (t.floor() as usize).min(segs - 1);
                let local = t - k as f64;
                points[k] + (points[k + 1] - points[k]).scale(local)
            }
            Path::SliceCircle {
                center,
                radius,
                u,
                turns,
            } => {
                let (sin, cos) = (TAU * turns * s).sin_cos();
                Quaternion::real(center + radius * cos) + u.get().scale(radius * sin)
            }
            Path::Arc { a, b } => {
                // validated on construction
                let pa = slice_point(*a).expect("arc start is non-real");
                let pb = slice_point(*b).expect("arc end is non-real");
                let xi0 = pa.xi0 + (pb.xi0 - pa.xi0) * s;
                let r = pa.r + (pb.r - pa.r) * s;
                Quaternion::real(xi0) + slerp(pa.u.get(), pb.u.get(), s).scale(r)
            }
        }
    }

    pub fn start(&self) -> Quaternion {
        match self {
            Path::Line { a, .. } | Path::Arc { a, .. } => *a,
            Path::PolyLine { points } => points[0],
            Path::SliceCircle { .. } => self.point(0.0),
        }
    }

    pub fn end(&self) -> Quaternion {
        match self {
            Path::Line { b, .. } | Path::Arc { b, .. } => *b,
            Path::PolyLine { points } => *points.last().expect("validated non-empty"),
            Path::SliceCircle { turns, .. } if turns.fract() == 0.0 => self.start(),
            Path::SliceCircle { .. } => self.point(1.0),
        }
    }

    /// `N + 1` nodes at uniform `s = n/N`, with exact endpoints.
    pub fn nodes(&self, steps: usize) -> Vec<Quaternion> {
        let mut pts: Vec<Quaternion> = (0..=steps)
            .map(|n| self.point(n as f64 / steps as f64))
            .collect();
        pts[0] = self.start();
        pts[steps] = self.end();
        pts
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// The unit imaginary of the slice containing the whole path, when the
    /// path is constructed to stay in one.
    pub fn slice_unit(&self) -> Option<UnitImaginary> {
        match self {
            Path::SliceCircle { u, .. } => Some(*u),
            _ => None,
        }
    }
}

fn slerp(a: Quaternion, b: Quaternion, s: f64) -> Quaternion {
    let cos = a.dot(b).clamp(-1.0, 1.0);
    let omega = cos.acos();
    if omega < 1e-12 {
        return a;
    }
    let sin = omega.sin();
    a.scale(((1.0 - s) * omega).sin() / sin) + b.scale((s * omega).sin() / sin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(w: f64, a: f64, b: f64, c: f64) -> Quaternion {
        Quaternion::new(w, a, b, c)
    }

    #[test]
    fn endpoints() {
        let a = q(1., 1., 0., 0.);
        let b = q(1., 1., 1., 0.);
        let paths = [
            Path::line(a, b),
            Path::polyline(vec![a, q(0., 0., 2., 1.), q(2., -1., 0., 0.), b]).unwrap(),
            Path::arc(a, q(0.5, 0., 1., 0.)).unwrap(),
        ];
        for p in &paths {
            assert_eq!(p.nodes(7)[0], p.start());
            assert!(p.point(0.0).approx_eq(p.start(), 1e-15));
            assert!(p.point(1.0).approx_eq(p.end(), 1e-15));
        }
        let c = Path::slice_circle(2.0, 1.0, UnitImaginary::I, 1.0).unwrap();
        assert!(c.is_closed());
        assert_eq!(c.start(), Quaternion::real(3.0));
        assert!(c.point(0.25).approx_eq(q(2., 1., 0., 0.), 1e-15));
        let half = Path::slice_circle(0.0, 1.0, UnitImaginary::J, 0.5).unwrap();
        assert!(half.end().approx_eq(Quaternion::real(-1.0), 1e-15));
    }

    #[test]
    fn polyline_hits_waypoints() {
        let pts = vec![Quaternion::ZERO, Quaternion::I, Quaternion::J, Quaternion::K];
        let p = Path::polyline(pts.clone()).unwrap();
        for (k, w) in pts.iter().enumerate() {
            assert!(p.point(k as f64 / 3.0).approx_eq(*w, 1e-15));
        }
        assert!(Path::polyline(vec![Quaternion::ONE]).is_err());
    }

    #[test]
    fn arc_keeps_radius_and_sweeps_unit() {
        let p = Path::arc(q(1., 1., 0., 0.), q(0.5, 0., 1., 0.)).unwrap();
        let mid = p.point(0.5);
        assert!((mid.imag_norm() - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(mid.approx_eq(q(0.75, s, s, 0.), 1e-15));
        assert!(Path::arc(Quaternion::I, -Quaternion::I).is_err());
        assert!(Path::arc(Quaternion::ONE, Quaternion::I).is_err());
    }

    #[test]
    fn json_forms() {
        let p = Path::parse(r#"{"kind":"line","a":[0,0,0,0],"b":[0,0,1,0]}"#).unwrap();
        assert_eq!(p, Path::line(Quaternion::ZERO, Quaternion::J));
        let p = Path::parse(r#"{"kind":"polyline","points":[[0,0,0,0],[1,0,0,0],[1,1,0,0]]}"#).unwrap();
        assert!(matches!(p, Path::PolyLine { ref points } if points.len() == 3));
        let p = Path::parse(r#"{"kind":"circle","center":0,"radius":1,"u":[0,0,3,4],"turns":2}"#).unwrap();
        match p {
            Path::SliceCircle { u, turns, .. } => {
                assert!(u.get().approx_eq(q(0., 0., 0.6, 0.8), 1e-15));
                assert_eq!(turns, 2.0);
            }
            _ => panic!("expected circle"),
        }
        assert!(Path::parse(r#"{"kind":"polyline","points":[[0,0,0,0]]}"#).is_err());
        assert!(Path::parse(r#"{"kind":"circle","center":0,"radius":0,"u":[0,1,0,0]}"#).is_err());
        assert!(Path::parse(r#"{"kind":"circle","center":0,"radius":1,"u":[1,0,0,0]}"#).is_err());
        assert!(Path::parse(r#"{"kind":"spiral"}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(
            a in prop::array::uniform4(-5.0f64..5.0),
            b in prop::array::uniform4(-5.0f64..5.0),
            turns in -3i32..3,
        ) {
            let qa = q(a[0], a[1], a[2], a[3]);
            let qb = q(b[0], b[1], b[2], b[3]);
            for p in [
                Path::line(qa, qb),
                Path::polyline(vec![qa, qb, qa + qb]).unwrap(),
                Path::slice_circle(a[0], b[0].abs() + 0.1, UnitImaginary::new(qb + Quaternion::I.scale(6.0)).unwrap(), turns as f64).unwrap(),
            ] {
                let s = serde_json::to_string(&p).unwrap();
                prop_assert_eq!(Path::parse(&s).unwrap(), p);
            }
        }
    }
}
