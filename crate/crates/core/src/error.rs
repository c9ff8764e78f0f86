use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("binding of undeclared indeterminate `{0}`")]
    UndeclaredIndeterminate(String),

    #[error("ordering undefined: labels `{0}` and `{1}` do not commute and are not ordered")]
    OrderingUndefined(String, String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("operator is not in the span of the collection")]
    Span,

    #[error("decomposition is not unique ({free} free parameters)")]
    Ambiguity { free: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("the two orderings decompose different operators")]
    Mismatch,

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("restricted to non-negative real coefficients: {0}")]
    Restriction(String),

    #[error("size bound exceeded: n + m = {got} > {bound}")]
    Size { got: usize, bound: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coefficient still contains indeterminates: {0}")]
    SymbolicResidue(String),

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid chi path: {0}")]
    InvalidChi(String),

    #[error("invalid drive: {0}")]
    InvalidDrive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
