use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is not an orthogonal projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("channel is not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("span is not an algebra (residual {residual:.3e})")]
    NotAlgebra { residual: f64 },

    #[error("span is not commutative (residual {residual:.3e})")]
    NotCommutative { residual: f64 },

    #[error("structure decomposition failed after {attempts} attempts: {reason}")]
    DecompositionFailed { attempts: usize, reason: String },

    #[error("sector index {index} out of range ({count} sectors)")]
    InvalidSector { index: usize, count: usize },

    #[error("invalid code context: {0}")]
    InvalidContext(String),

    #[error("algebra is not correctable: {what} residual {residual:.3e}")]
    NotCorrectable { what: &'static str, residual: f64 },

    #[error("channel annihilates code sector {sector}")]
    AnnihilatedSector { sector: usize },

    #[error("state is not supported in the code (residual {residual:.3e})")]
    StateOutsideCode { residual: f64 },

    #[error("recovery does not satisfy R†(X) = R†(PXP) (residual {residual:.3e})")]
    RecoveryNotCompressing { residual: f64 },

    #[error("certificate failed: {what} residual {residual:.3e}")]
    CertificateFailed { what: &'static str, residual: f64 },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_square(m: &crate::Matrix, context: &'static str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: "square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_shape(
    m: &crate::Matrix,
    rows: usize,
    cols: usize,
    context: &'static str,
) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{rows}x{cols}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}
