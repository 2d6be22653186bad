use thiserror::Error;

/// Errors raised anywhere in the Brandt/theta pipeline.
///
/// Variants that signal an internal inconsistency (`Inconsistent`,
/// `Contradiction`) mean a computed object violated an identity that must
/// hold exactly; they are bugs, not user errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid place {0}: expected a prime or infinity")]
    InvalidPlace(i64),
    #[error("level {0} is not prime")]
    NotPrime(u64),
    #[error("operands belong to different quaternion algebras")]
    IncompatibleAlgebra,
    #[error("algebra construction failed for level {0}")]
    AlgebraConstruction(u64),
    #[error("maximal order construction failed: discriminant {found}, expected {expected}")]
    OrderConstruction { expected: u64, found: String },
    #[error("malformed order: {0}")]
    MalformedOrder(String),
    #[error("generators span a lattice of rank {0} < 4")]
    RankDeficient(usize),
    #[error("index {index} out of range for {n} classes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("class enumeration failed: {0}")]
    Enumeration(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("coefficient bound {given} is below the Sturm bound {required}")]
    InsufficientPrecision { given: u64, required: u64 },
    #[error("degenerate generic combination: residual {0} after re-randomizing")]
    DegenerateCombination(String),
    #[error("contradiction with multiplicity one: {0}")]
    Contradiction(String),
    #[error("spectral error: {0}")]
    Spectral(String),
    #[error("tolerance could not resolve sigma set for index {0}")]
    SigmaResolution(usize),
    #[error("invalid field element: {0}")]
    InvalidFieldElement(String),
    #[error("cross-validation failed: {0}")]
    CrossValidation(String),
    #[error("schema version {found} is not supported (expected {expected}); migrate the record")]
    SchemaMigration { expected: u32, found: u32 },
    #[error("record format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
