use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("out of domain: {0}")]
    Domain(String),

    #[error("invalid path family: {0}")]
    InvalidFamily(Violation),

    #[error("enumeration refused: |Omega| is about {estimate:.3e}, cap is {cap}")]
    CapExceeded { estimate: f64, cap: usize },

    #[error("matrix with {rows} rows exceeds the dense limit of {limit}")]
    TooLarge { rows: usize, limit: usize },

    #[error("invalid split distribution parameters a={a}, b={b}, n={n}: all weights vanish")]
    InvalidSplit { a: i64, b: i64, n: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("singular pair: coefficient c_{index} vanishes between {from} and {to}")]
    SingularPair {
        index: usize,
        from: String,
        to: String,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("point is outside the bulk (cos phi = {cos_phi})")]
    OutsideBulk { cos_phi: f64 },

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("integrand pole on the contour at {0}")]
    PoleOnContour(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    Quadrature { tol: f64, err: f64 },
}

impl Error {
    /// Exit status used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDims(_)
            | Error::Domain(_)
            | Error::InvalidFamily(_)
            | Error::InvalidPlan(_)
            | Error::Unsupported(_)
            | Error::InvalidSplit { .. }
            | Error::Io(_) => 2,
            Error::CapExceeded { .. } | Error::TooLarge { .. } => 4,
            Error::Inconsistent(_)
            | Error::SingularPair { .. }
            | Error::OutsideBulk { .. }
            | Error::PoleOnContour(_)
            | Error::Quadrature { .. } => 3,
        }
    }
}

/// The first constraint a [`PathFamily`](crate::PathFamily) breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Section (time) index where the violation was detected.
    pub time: usize,
    /// Path index, when the violation concerns a single path.
    pub path: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    SectionCount,
    RowLength,
    NotStrictlyIncreasing,
    OutsideSection,
    BadStep,
    BadStart,
    BadEnd,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::SectionCount => "wrong number of sections",
            ViolationKind::RowLength => "section does not have N entries",
            ViolationKind::NotStrictlyIncreasing => "not strictly increasing",
            ViolationKind::OutsideSection => "coordinate outside the hexagon section",
            ViolationKind::BadStep => "path step not in {0, 1}",
            ViolationKind::BadStart => "X(0) is not (0, 1, ..., N-1)",
            ViolationKind::BadEnd => "X(T) is not (S, ..., S+N-1)",
        })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at t={}", self.kind, self.time)?;
        if let Some(i) = self.path {
            write!(f, ", path {i}")?;
        }
        Ok(())
    }
}
