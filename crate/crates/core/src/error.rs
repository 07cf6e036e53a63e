use std::fmt;

use thiserror::Error;

use crate::subspace::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("entry count {len} does not match {rows}x{cols}")]
    Length { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance {name} = {value}: must lie in (0, 1)")]
    Tolerance { name: &'static str, value: f64 },

    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("matrix is singular in {op}")]
    Singular { op: &'static str },

    #[error("hypothesis violated: {0}")]
    Hypothesis(Hypothesis),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular update: {0}")]
    SingularUpdate(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape {
            op,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// A violated hypothesis of the rank-augmenting update identities.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// `Bᵢ = WᵢᵀWᵢ` is rank-deficient on the given side.
    SingularB { side: Side },
    /// `G` is not of full rank `k`.
    SingularG { k: usize, rank: usize },
    /// The in-range component has columns outside the reference subspace.
    NotInRange { name: &'static str, side: Side },
    /// The orthogonal component is not orthogonal to the reference subspace.
    NotOrthogonal { name: &'static str, side: Side },
    /// A perturbation was decomposed against the wrong subspace.
    WrongSide { name: &'static str, expected: Side },
    /// The base matrix must be square.
    NotSquare { rows: usize, cols: usize },
    /// A rank-one orthogonal component vanishes.
    VanishingW { index: usize },
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::SingularB { side } => {
                let i = side.index();
                write!(
                    f,
                    "B{i} = W{i}ᵀW{i} is singular: the component of X{i} orthogonal to the {side} of A is rank-deficient"
                )
            }
            Hypothesis::SingularG { k, rank } => {
                write!(f, "G is singular: rank {rank} < k = {k}")
            }
            Hypothesis::NotInRange { name, side } => {
                write!(f, "columns of {name} are not contained in the {side} of A")
            }
            Hypothesis::NotOrthogonal { name, side } => {
                write!(f, "columns of {name} are not orthogonal to the {side} of A")
            }
            Hypothesis::WrongSide { name, expected } => {
                write!(f, "{name} must be decomposed against the {expected} of A")
            }
            Hypothesis::NotSquare { rows, cols } => {
                write!(f, "A must be square, got {rows}x{cols}")
            }
            Hypothesis::VanishingW { index } => {
                write!(f, "w{index} vanishes: the pseudoinverse diverges as w{index} -> 0")
            }
        }
    }
}
