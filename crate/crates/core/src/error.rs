use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cusp constant must be positive, got {0}")]
    NonPositiveCuspConstant(String),

    #[error("cutoff {cutoff} is below alpha {alpha}")]
    CutoffBelowAlpha { cutoff: String, alpha: String },

    #[error("index sets have different cutoffs ({left} vs {right})")]
    CutoffMismatch { left: String, right: String },

    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("change of boundary defining function leaves (0,1) at node {node} (x = {x}, 1 - x*phi0 = {margin})")]
    BdfOutOfRange { node: usize, x: f64, margin: f64 },

    #[error("positivity lost at node {node} (x = {x:e}): value {value:e}")]
    Positivity { node: usize, x: f64, value: f64 },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("degenerate divisor: integral of c1(TD)^(n-1) vanishes")]
    DegenerateDivisor,

    #[error("plane curve degree {0} is below 4; K + [D] is not positive")]
    DegreeTooSmall(i64),

    #[error("singular tridiagonal system (zero pivot at row {row})")]
    SingularSystem { row: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonFailure { iterations: usize, residual: f64 },

    #[error("damping floor reached at Newton iteration {iteration} (residual {residual:e})")]
    DampingFloor { iteration: usize, residual: f64 },

    #[error("time step rejected at t = {time} with dt = {dt:e} below dt_min: {reason}")]
    StepRejected { time: f64, dt: f64, reason: String },

    #[error("rank-deficient design matrix: term {term} is nearly collinear with {partner}")]
    RankDeficient { term: String, partner: String },

    #[error("too few samples ({samples}) for {terms} basis terms; need at least 3x")]
    TooFewSamples { samples: usize, terms: usize },

    #[error("no reliable log term: estimates spread {spread:e} around {estimate:e}")]
    NoReliableLogTerm { estimate: f64, spread: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
