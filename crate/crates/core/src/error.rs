use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("n={0} is outside the supported range 1..=24")]
    UnsupportedN(usize),
    #[error("binomial with negative n={0}")]
    NegativeN(i64),
    #[error("level k={k} out of range for n={n}")]
    LevelOutOfRange { n: usize, k: usize },
    #[error("mask {mask:#b} has bits above n={n}")]
    MaskOutOfRange { mask: u32, n: usize },
    #[error("duplicate set {0}")]
    DuplicateSet(String),
    #[error("families have different ground sizes ({0} vs {1})")]
    MismatchedN(usize, usize),
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("invalid property: {0}")]
    InvalidProperty(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("family has {0} members; the brute-force oracle accepts at most {1}")]
    FamilyTooLarge(usize, usize),
    #[error("set {0} is not a member of the ground")]
    NotInGround(String),
    #[error("ordering is not a permutation of [n]: {0}")]
    InvalidOrdering(String),
    #[error("ground too large: {0} members (limit {1})")]
    GroundTooLarge(usize, usize),
    #[error("property is not hereditary on sample: {0}")]
    NotHereditary(String),
    #[error("cache: {0}")]
    Cache(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} at line {line}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `n <size>` header")]
    MissingHeader,
    #[error("unsupported n={0}")]
    BadN(usize),
    #[error("element {element} exceeds n={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("elements not strictly ascending in `{0}`")]
    NotAscending(String),
    #[error("duplicate set {0}")]
    DuplicateSet(String),
    #[error("malformed line `{0}`")]
    Malformed(String),
}
