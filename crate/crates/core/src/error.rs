use thiserror::Error;

/// Errors raised by the operator-theory primitives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("constant inner function: a Blaschke product needs at least one zero")]
    ConstantInner,

    #[error("zero outside open disk: |{re} + {im}i| >= 1")]
    ZeroOutsideDisk { re: f64, im: f64 },

    #[error("zero modulus {modulus} exceeds the default cap {cap}; opt in to high-modulus zeros explicitly")]
    ModulusAboveCap { modulus: f64, cap: f64 },

    #[error("unimodular constant has modulus {0}, expected 1")]
    NotUnimodular(f64),

    #[error("expansion tail bound {tail:e} exceeds cap {cap:e}; need N >= {required}")]
    Truncation {
        tail: f64,
        cap: f64,
        required: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation depth M = {m} is below the guard band {required}")]
    GuardBand { m: usize, required: usize },

    #[error("vector is not admissible: {0}")]
    NotAdmissible(String),

    #[error("vector does not lie in {space} (defect {defect:e})")]
    NotInSpace { space: String, defect: f64 },

    #[error("band violation: {0}")]
    Band(String),

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
