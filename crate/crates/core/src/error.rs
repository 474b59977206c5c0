//! Error type shared by all modules of the crate.

/// Everything that can go wrong when building models or evaluating algebra
/// operations. Variants carry a short human-readable detail string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An analytic (infinite-range) potential was asked to evaluate a tail
    /// pattern it has no closed form for.
    #[error("unsupported tail pattern: {0}")]
    UnsupportedTail(String),

    /// The operation requires a finite-range potential.
    #[error("potential has infinite range: {0}")]
    InfiniteRange(String),

    /// The transform cannot act on this lattice / spin structure.
    #[error("incompatible transform: {0}")]
    IncompatibleTransform(String),

    /// A configuration lies outside the required fertile class.
    #[error("not in the fertile class: {0}")]
    NotFertile(String),

    /// Configurations that must share a fertile class do not.
    #[error("fertile class mismatch: {0}")]
    ClassMismatch(String),

    /// State enumeration would exceed the configured cap.
    #[error("enumeration too large: {0}")]
    TooLarge(String),

    /// The queried assignment is not an offspring of the given pair.
    #[error("not an offspring: {0}")]
    NotOffspring(String),

    /// An element's support exceeds the bound fixed by the operation.
    #[error("support too large: {0}")]
    SupportTooLarge(String),

    /// Spin sets of combined models differ.
    #[error("spin set mismatch: {0}")]
    SpinMismatch(String),

    /// Structural mismatch in a model definition (lattice vs. potential vs.
    /// clusters) or invalid constructor input.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
