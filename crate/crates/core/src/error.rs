use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("components {first} and {second} overlap (min sampled distance {distance:e})")]
    OverlappingComponents { first: usize, second: usize, distance: f64 },
    #[error("degenerate curve in component {component}: |γ'| = {speed:e} at t = {t}")]
    DegenerateCurve { component: usize, t: f64, speed: f64 },
    #[error("invalid curve in component {component}: {reason}")]
    InvalidCurve { component: usize, reason: String },
    #[error("domain needs at least one component")]
    EmptyDomain,
    #[error("invalid node count {0}: must be even and >= 8")]
    InvalidNodeCount(usize),
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("singular evaluation: kernel evaluated at the origin")]
    SingularEvaluation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("component index {index} out of range (domain has {count})")]
    ComponentOutOfRange { index: usize, count: usize },
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier '{name}' at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("test field has no gradient and finite differences are disabled")]
    MissingGradient,
    #[error("node mismatch: {0}")]
    NodeMismatch(String),
    #[error("singular augmented system on component {component}; try rescaling the geometry")]
    SingularSystem { component: usize },
    #[error("target {point:?} is not inside component {component}")]
    WrongComponent { point: [f64; 2], component: usize },
    #[error("point {point:?} lies outside every component")]
    OutsideDomain { point: [f64; 2] },
    #[error("target {point:?} is not in the exterior (distance {distance:e})")]
    NotExterior { point: [f64; 2], distance: f64 },
    #[error("ill-conditioned coefficient recovery (condition number {0:e})")]
    IllConditioned(f64),
    #[error("incompatible data: defects {defects:?} exceed tolerance {tolerance:e}")]
    Incompatible { defects: Vec<f64>, tolerance: f64 },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
