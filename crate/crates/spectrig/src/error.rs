//! Error type shared by every module of the crate.

/// Errors reported by the rigidity toolkit.
///
/// `InvalidInput` covers all caller mistakes (malformed matrices, points
/// outside the spectrahedron, bad vertex indices, …). `FileFormat` is its
/// sibling for framework files, kept separate so the CLI can point at the
/// offending field. `InternalInconsistency` is reserved for situations the
/// underlying theory rules out — e.g. both sides of the Farkas dichotomy
/// certifying at once — and signals a bug or a numerically hopeless input,
/// never a property of the framework.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The caller handed in something malformed or out of domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A framework file violates the input schema.
    #[error("invalid framework file: {0}")]
    FileFormat(String),

    /// The configuration affinely spans all of `R^{n-1}`, so the Gale space
    /// is zero-dimensional and no stress machinery applies.
    #[error("empty Gale space: the {n} points affinely span R^{}", .n - 1)]
    EmptyGaleSpace {
        /// Number of vertices of the framework.
        n: usize,
    },

    /// Two results that the theory proves mutually exclusive both occurred.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an `InvalidInput` with a formatted message.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
