use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid occupation: {0}")]
    InvalidOccupation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("basis too large: {0}")]
    TooLarge(String),

    #[error("wrong Fock sector: {0}")]
    Sector(String),

    #[error("target not representable: constraint residual {residual:.3e} after full penalty schedule")]
    NotRepresentable { residual: f64 },

    #[error("unknown principal variable label `{0}`")]
    Label(String),

    #[error("complex principal variable `{0}` has no conjugate partner in the principal set")]
    ConjugateMissing(String),

    #[error("chemical potential bracket failure: {message}")]
    Bracket {
        message: String,
        /// (mu, particle number) samples across the attempted bracket
        trace: Vec<(f64, f64)>,
    },

    #[error("U block is singular beyond removable canonical pairs: {0}")]
    SingularU(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),
}
