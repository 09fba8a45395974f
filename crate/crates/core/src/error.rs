//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("variable x{index} out of range (nvars = {nvars})")]
    VarOutOfRange { index: usize, nvars: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("substitution arity mismatch: polynomial has {nvars} variables, {images} images given")]
    ArityMismatch { nvars: usize, images: usize },

    #[error("term {term} is not divisible by x{var}^{power}")]
    NotDivisible {
        var: usize,
        power: u32,
        term: String,
    },

    #[error("degree of the zero polynomial is undefined")]
    ZeroDegree,

    #[error("order along the center is overestimated: {0}")]
    CenterOrder(String),

    #[error("no regularizing coordinate change found: {0}")]
    RegularizationFailed(String),

    #[error("no valid center: |gamma| = {total} < 1")]
    NoCenter { total: String },

    #[error("zero denominator: test function vanishes on the grid")]
    ZeroDenominator,

    #[error("weight parameter s = -1 is excluded")]
    HardyExcludedWeight,

    #[error("cell budget exceeded: {cells} cells at depth {depth}")]
    CellBudget { cells: usize, depth: u32 },

    #[error("non-finite integrand value in cell centered at {0}")]
    NonFiniteIntegrand(String),

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("empty interior eta grid")]
    EmptyEtaGrid,

    #[error("{0}")]
    Invalid(String),
}
