//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised while building or checking elements, spaces and complexes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter inequality does not hold; the message names it.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A triangle is degenerate or a point is malformed.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Mesh incidence is inconsistent or an entity does not belong to a cell.
    #[error("topology error: {0}")]
    Topology(String),
    /// A field has the wrong shape for the requested operation.
    #[error("shape error: {0}")]
    Shape(String),
    /// A mesh document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A quotient moment space could not be realized.
    #[error("quotient error: {0}")]
    Quotient(String),
    /// The image of an operator is not contained in the target space.
    #[error("inclusion error: {0}")]
    Inclusion(String),
    /// Matrix shapes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A square matrix has no inverse.
    #[error("singular matrix")]
    SingularMatrix,
    /// Columns handed to a complement computation are linearly dependent.
    #[error("subspace columns are linearly dependent")]
    DependentSubspace,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Returns a parameter error unless `ok` holds.
pub(crate) fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(what()))
    }
}
