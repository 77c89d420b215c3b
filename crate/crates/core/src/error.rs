use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Grassmann operands live on different generator sets ({left} vs {right} pairs)")]
    MismatchedGenerators { left: usize, right: usize },

    #[error("Grassmann element has zero scalar part and is not invertible")]
    NotInvertible,

    #[error("singular pivot at column {column}: no row with a nonzero scalar part")]
    SingularPivot { column: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("ill-conditioned point configuration (condition estimate {condition:.3e} > {threshold:.1e})")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("division by the zero series")]
    ZeroDivisor,

    #[error("unsupported (k, m) = ({k}, {m}) for series expansion; use a numeric route")]
    UnsupportedSeries { k: usize, m: usize },

    #[error("ensemble run failed: {discarded} of {trials} trials discarded")]
    TooManyDiscards { discarded: usize, trials: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
