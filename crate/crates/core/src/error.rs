use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: malformed input (validation) and
/// requests the toolkit deliberately refuses (scope). See [`Error::is_scope`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid exponent {0}: need 1 <= p < infinity")]
    InvalidExponent(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("operator has an empty domain or codomain")]
    EmptyOperator,
    #[error("oracle supports domains of dimension <= {max}, got {dim}")]
    OracleScope { dim: usize, max: usize },
    #[error("conjugating operator is singular")]
    SingularConjugator,
    #[error("operator is not an invertible isometry at p = {p}")]
    NotIsometry { p: f64 },
    #[error("operator is not spatial: {0}")]
    NotSpatial(String),
    #[error("operation refused at p = 2: the spatial structure is not unique there")]
    ExponentTwo,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("invalid normal subgroup: {0}")]
    InvalidNormalSubgroup(String),
    #[error("image of {element} is not a phase times a translation")]
    NonSpatialImage { element: usize },
    #[error("image of {element} is not contractive (norm {norm})")]
    NotContractive { element: usize, norm: f64 },
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("expressions mix Leavitt algebras L_{0} and L_{1}")]
    Arity(usize, usize),
    #[error("invalid Leavitt word: {0}")]
    InvalidWord(String),
    #[error("matrix-unit relation fails: {0}")]
    MatrixUnitRelation(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("elements belong to different actions")]
    ActionMismatch,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("truncated point too short: {0}")]
    Truncation(String),
    #[error("cocycle data incomplete; missing {0:?}")]
    Coverage(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for refusals (certification above the oracle's dimension, `p = 2`
    /// where spatial decompositions are not unique) rather than bad input.
    pub fn is_scope(&self) -> bool {
        matches!(self, Error::OracleScope { .. } | Error::ExponentTwo)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
