use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (max |uu† - I| = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not a proper rotation (orthogonality defect {defect:.3e}, det {det:.6})")]
    NotRotation { defect: f64, det: f64 },

    #[error("numerical integrity: {0}")]
    NumericalIntegrity(String),

    #[error("inconsistent trace profile: root with imaginary part {imag:.3e}")]
    InconsistentProfile { imag: f64 },

    #[error("vector is outside the domain: {0}")]
    Domain(String),

    #[error("unsupported dimension {0} without a fiducial file")]
    UnsupportedDimension(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("tolerance {tol:.3e} not reached within {iterations} iterations (best {best:.3e})")]
    NotConverged { tol: f64, iterations: usize, best: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at byte {offset}: {message}")]
    Parse {
        path: String,
        offset: usize,
        message: String,
    },

    #[error("malformed input: {0}")]
    Malformed(String),
}
