use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero divisor: the quaternion has no inverse")]
    ZeroDivisor,

    /// The point lies on the real axis, where the unit imaginary is undefined.
    #[error("degenerate slice: point lies on the real axis (r = {r:e})")]
    DegenerateSlice { r: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("missing closed-form reference: {0}")]
    MissingReference(String),

    #[error("path leaves the slice of its first non-real point at s = {s}")]
    SliceEscape { s: f64 },

    #[error("argument changes by {dphi:.3} rad in one step at s = {s}; use more steps")]
    StepTooCoarse { s: f64, dphi: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    /// An evaluation failure annotated with the path parameter where it happened.
    #[error("at s = {s}: {source}")]
    AtParameter { s: f64, source: Box<Error> },
}

/// Coarse classification used for exit codes and C status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    ZeroDivisor,
    DegenerateSlice,
    Domain,
    Unsupported,
    MissingReference,
    SliceEscape,
    StepTooCoarse,
    Invalid,
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn at(self, s: f64) -> Self {
        match self {
            // keep the innermost location
            e @ Error::AtParameter { .. } => e,
            e @ (Error::SliceEscape { .. } | Error::StepTooCoarse { .. }) => e,
            e => Error::AtParameter {
                s,
                source: Box::new(e),
            },
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ZeroDivisor => ErrorKind::ZeroDivisor,
            Error::DegenerateSlice { .. } => ErrorKind::DegenerateSlice,
            Error::Domain(_) => ErrorKind::Domain,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            Error::MissingReference(_) => ErrorKind::MissingReference,
            Error::SliceEscape { .. } => ErrorKind::SliceEscape,
            Error::StepTooCoarse { .. } => ErrorKind::StepTooCoarse,
            Error::Invalid(_) => ErrorKind::Invalid,
            Error::AtParameter { source, .. } => source.kind(),
        }
    }

    /// Path parameter attached to the error, if any.
    pub fn parameter(&self) -> Option<f64> {
        match self {
            Error::AtParameter { s, .. } | Error::SliceEscape { s } | Error::StepTooCoarse { s, .. } => {
                Some(*s)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_keeps_innermost_parameter() {
        let e = Error::domain("ln at 0").at(0.25).at(0.5);
        assert_eq!(e.parameter(), Some(0.25));
        assert_eq!(e.kind(), ErrorKind::Domain);
        assert!(e.to_string().contains("s = 0.25"));
    }
}
