use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    DegreeMismatch { expected: u32, got: usize },
    #[error("field order {0} is outside the supported range [2, 65536]")]
    FieldTooLarge(u64),
    #[error("element code {code} is not in GF({q})")]
    InvalidElement { code: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value table is nonzero at 0")]
    NonzeroAtZero,
    #[error("value table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("table is not a permutation of the field")]
    NotAPermutation,
    #[error("zero vector has no projective point")]
    ZeroVector,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("points coincide")]
    CoincidentPoints,
    #[error("all coordinate functions are zero")]
    AllZeroFunctions,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("flock is not a star flock")]
    NotAStarFlock,
    #[error("collineation does not preserve the standard position: {0}")]
    StructureNotPreserved(String),
    #[error("custom selection {0} is not a representative of its point")]
    CustomRhoNotRepresentative(String),
    #[error("anchor points are collinear")]
    CollinearAnchors,
    #[error("reconstruction system is singular")]
    SingularSystem,
    #[error("objects are defined over different fields")]
    FieldMismatch,
    #[error("tau is not well defined on the span: {0}")]
    TauUndefined(String),
    #[error("point {0} of C is not in the herd cover")]
    CNotInCover(String),
    #[error("search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("q = {q} exceeds the enumeration bound {bound}")]
    BoundExceeded { q: u32, bound: u32 },
    #[error("operation requires GF({expected}), got GF({got})")]
    WrongField { expected: u32, got: u32 },
    #[error("q = {0} is not supported by this classification")]
    UnsupportedQ(u32),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("q = {q} is outside the range of table {table}")]
    QOutOfRange { table: u32, q: u32 },
    #[error("q = {0} matches no table row")]
    AmbiguousRow(u32),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }
}
