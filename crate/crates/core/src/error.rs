use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("matrix is not orthogonal (|QᵀQ - I| = {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("invalid index permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid contraction axes ({0}, {1}) for order {2}")]
    InvalidAxes(usize, usize, usize),

    #[error("axis must be a unit vector (norm {0:.6})")]
    NonUnitAxis(f64),

    #[error("unknown group '{name}'; valid names: {}", valid.join(", "))]
    UnknownGroup { name: String, valid: Vec<String> },

    #[error("unknown convention '{0}'; valid: so3_kb, o3_zheng")]
    UnknownConvention(String),

    #[error("group appears infinite; use sampled-generator mode (closure exceeded {cap} elements)")]
    GroupTooLarge { cap: usize },

    #[error("group '{0}' is not finite; this operation needs a closed finite group")]
    InfiniteGroup(String),

    #[error("cannot parse space '{input}': {msg}")]
    SpaceParse { input: String, msg: String },

    #[error("non-integral coefficient {value} at degree {degree}")]
    NonIntegral { degree: usize, value: String },

    #[error("constraint set is empty")]
    EmptyConstraints,

    #[error("no clear singular-value gap at tolerance {tol:.3e}; spectrum tail: {spectrum:?}")]
    NoSpectralGap { tol: f64, spectrum: Vec<f64> },

    #[error("LOBPCG did not converge in {iterations} iterations (max residual {residual:.3e}); retry with --algorithm svd")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("singular value decomposition failed")]
    Svd,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tensor is not invariant (residual {0:.3e})")]
    NotInvariant(f64),

    #[error("basis is empty")]
    EmptyBasis,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
