use thiserror::Error;

/// Errors produced by the coherence toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("argument out of domain: {0}")]
    Argument(String),

    #[error("conversion infeasible: {violated} violated")]
    Infeasible { violated: Inequality },

    #[error("bound undefined: {0}")]
    UndefinedBound(String),

    #[error("shot record is empty")]
    EmptyRecord,

    #[error("incomplete tomography data: missing {0} basis")]
    IncompleteData(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// The two reachability inequalities for qubit conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// The probability-independent ellipsoid condition.
    Ellipsoid,
    /// The probability-dependent cylinder condition.
    Cylinder,
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Inequality::Ellipsoid => write!(f, "ellipsoid condition r^2 s_z^2 + (1 - r_z^2) s^2 <= r^2"),
            Inequality::Cylinder => {
                write!(f, "cylinder condition p^2 s^2 <= r^2 (2p - (1 - |r_z|)) / (1 + |r_z|)")
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
