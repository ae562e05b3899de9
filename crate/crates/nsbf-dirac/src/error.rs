use thiserror::Error;

/// Errors produced by the library.
#[derive(Error, Debug)]
pub enum Error {
    /// Invalid grid construction parameters.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two grid functions that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An argument lies outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Gamma function evaluated at a pole (zero or a negative integer).
    #[error("gamma pole at x = {0}")]
    GammaPole(f64),

    /// A special-function evaluation failed to produce a finite result.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// The spectral parameter product omega1*omega2 is negative; only
    /// nonnegative omega^2 is supported.
    #[error("negative omega^2 = {0}: only real omega is supported")]
    NegativeOmegaSquared(f64),

    /// The auxiliary solution g0 vanishes and no spectral shift restored it.
    #[error("unsupported potential: {0}")]
    UnsupportedPotential(String),

    /// The grid cannot support the construction: the truncation-radius
    /// criterion failed already in the first grid cells, or a
    /// theoretically-positive auxiliary quantity lost positivity to
    /// discretization error.
    #[error("degenerate truncation: {0}; use a smaller interval or a finer grid")]
    DegenerateTruncation(String),

    /// Configuration file is syntactically or semantically invalid.
    #[error("config error: {0}")]
    Config(String),

    /// An input/output operation failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
