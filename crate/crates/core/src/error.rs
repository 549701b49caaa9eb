use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Hurst parameter {value} outside admissible range {range}")]
    InvalidHurst { value: f64, range: &'static str },

    #[error("Hermite order {0} outside supported range 0..=64")]
    InvalidOrder(usize),

    #[error(
        "circulant embedding not positive semidefinite after {doublings} doublings \
         (min eigenvalue {min_eigenvalue:e})"
    )]
    EmbeddingNotPsd {
        doublings: usize,
        min_eigenvalue: f64,
    },

    #[error("grid spacing must divide the unit lag exactly (1/dx = {0} is not an integer)")]
    NonIntegralUnitLag(f64),

    #[error("operation requires an fBm-kind path, got fGn")]
    NotFbmPath,

    #[error("truncation bound {0} below the minimum 1e3")]
    TruncationTooSmall(f64),

    #[error("quadrature failed to converge: {0}")]
    QuadratureDivergence(String),

    #[error(
        "chaos coefficients not resolved: normalized tail coefficient {tail:e} at order {order}"
    )]
    ChaosTailTooLarge { order: usize, tail: f64 },

    #[error(
        "quadrature rule too small: {nodes} nodes for max order {qmax} (need at least 2*qmax)"
    )]
    TooFewNodes { nodes: usize, qmax: usize },

    #[error("autocovariance argument {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("potential bound {gamma} exceeds the zeroth-order coefficient {q0}")]
    PotentialExceedsShift { gamma: f64, q0: f64 },

    #[error("unbounded potential rejected in a solver context")]
    UnboundedPotential,

    #[error("potential Hermite rank {found:?} does not match requested order {expected}")]
    RankMismatch {
        expected: usize,
        found: Option<usize>,
    },

    #[error("grid too small: {n} interior points (minimum {min})")]
    GridTooSmall { n: usize, min: usize },

    #[error("mode count {modes} below grid size {n}")]
    TooFewModes { modes: usize, n: usize },

    #[error("grid spacing h = {h:e} too coarse for epsilon = {eps:e} (need h <= eps/8)")]
    GridTooCoarse { h: f64, eps: f64 },

    #[error("epsilon {0} outside (0, 1)")]
    InvalidEpsilon(f64),

    #[error("long-range-dependence condition violated: H = {h} <= 1/2 for order {order}")]
    LrdViolated { h: f64, order: usize },

    #[error(
        "iterative solve did not converge within {iterations} iterations (residual {residual:e})"
    )]
    SolveDiverged { iterations: usize, residual: f64 },

    #[error(
        "double-integral norm diverges under refinement (integrand outside the admissible class)"
    )]
    NormDivergent,

    #[error("requested simulation size {0} exceeds the memory guard")]
    MemoryGuard(usize),

    #[error("horizon {horizon} not divisible by output grid {grid}")]
    GridAlignment { horizon: usize, grid: usize },

    #[error("Green kernel Lipschitz hypothesis not met for this operator kind")]
    LipschitzHypothesis,

    #[error("probe point {0} does not lie on the solver grid")]
    ProbeOffGrid(f64),

    #[error("lag list must span at least one decade and be strictly increasing")]
    InsufficientLagSpan,

    #[error("log-log fit needs at least 4 strictly positive points with distinct abscissae")]
    BadFitInput,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
