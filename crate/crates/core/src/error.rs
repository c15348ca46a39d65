use thiserror::Error;

/// Errors raised by the index machinery.
///
/// Numeric failures (ladders that never settle, ceilings that sit on a tie)
/// are surfaced as their own variants instead of being resolved silently.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symplectic: defect {defect:e} exceeds tolerance {tol:e}")]
    NotSymplectic { defect: f64, tol: f64 },
    #[error("dimension mismatch: expected half-dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular detector has imaginary residue {residue:e}")]
    RealnessViolated { residue: f64 },
    #[error("integration did not reach symplectic defect bound (last defect {defect:e} at {steps} steps)")]
    NoConvergence { defect: f64, steps: usize },
    #[error("path endpoints do not match (gap {gap:e})")]
    EndpointMismatch { gap: f64 },
    #[error("path is degenerate at omega (nullity {nullity})")]
    DegenerateEndpoint { nullity: usize },
    #[error("tangential crossing near t = {time} could not be resolved by perturbation")]
    TangentialCrossing { time: f64 },
    #[error("perturbation ladder did not stabilize: {ladder:?}")]
    PerturbationUnstable { ladder: Vec<(f64, i64)> },
    #[error("neighbor sample has index {neighbor} below family value {family}")]
    InfNotAttained { family: i64, neighbor: i64 },
    #[error("mean index estimates disagree: iteration {by_iteration}, circle average {by_average}")]
    MeanIndexInconsistent { by_iteration: f64, by_average: f64 },
    #[error("splitting number changed between epsilon {eps} and {half}")]
    EpsilonUnstable { eps: f64, half: f64 },
    #[error("witness path endpoint differs from matrix (gap {gap:e})")]
    WitnessMismatch { gap: f64 },
    #[error("ceiling argument {value} is within guard band of an integer and has no exact form")]
    AmbiguousCeiling { value: f64 },
    #[error("no common index jump found for N <= {n_max}; raise the bound")]
    NoneFoundWithinBound { n_max: u64 },
    #[error("common index jump hypotheses fail for path {index}: mean index {mean_index}, i(1) = {initial_index}")]
    HypothesesFailed { index: usize, mean_index: f64, initial_index: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
