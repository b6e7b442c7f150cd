use thiserror::Error;

/// Failure modes across assembly, solves and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("meshing failed: {0}")]
    Meshing(String),

    #[error("gamma_s carries no interior node; refine the mesh")]
    GammaSUnresolved,

    #[error("{what}: expected length {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("boundary diameter {0} is not below 1; rescale before assembling V")]
    CapacityViolation(f64),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("point ({x}, {y}) cannot be evaluated: {reason}")]
    ExteriorPoint { x: f64, y: f64, reason: String },

    #[error("brute-force oracle refuses {0} unknowns (limit 6)")]
    OracleTooLarge(usize),

    #[error("mesh text format: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
