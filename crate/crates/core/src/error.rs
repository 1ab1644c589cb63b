use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("operators do not commute")]
    NonCommuting,
    #[error("eigenspaces cover {found} of {expected} dimensions (non-semisimple or non-integer spectrum)")]
    EigenDefect { expected: usize, found: usize },
    #[error("subspace is not invariant: {0}")]
    NotInvariant(String),
    #[error("operator is not nilpotent")]
    NotNilpotent,
    #[error("invalid quadratic space: {0}")]
    InvalidSpace(String),
    #[error("b2 = {0}: an isotropic plane needs b2 >= 4")]
    B2TooSmall(usize),
    #[error("no hyperbolic plane found: {0}")]
    NoHyperbolicPlane(String),
    #[error("not an isotropic plane: {0}")]
    NotIsotropicPlane(String),
    #[error("planes lie in different SO(q)-orbits (b2 = 4, the isotropic planes form two families): {0}")]
    TwoOrbitObstruction(String),
    #[error("sampling budget of {budget} exhausted in degree {degree}: quotient dim {achieved}, target {target}")]
    BudgetExhausted { degree: usize, budget: usize, achieved: usize, target: usize },
    #[error("ideal overshoots in degree {degree}: quotient dim {achieved} below target {target}")]
    IdealOvershoot { degree: usize, achieved: usize, target: usize },
    #[error("presentation in degree {degree} has dimension {achieved}, expected {target}")]
    QuotientMismatch { degree: usize, achieved: usize, target: usize },
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("class is not Lefschetz: {0}")]
    NotLefschetz(String),
    #[error("frame: {0}")]
    Frame(String),
    #[error("weight filtration: {0}")]
    Filtration(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
