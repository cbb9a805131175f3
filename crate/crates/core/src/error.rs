use thiserror::Error;

/// Errors raised by the model builders, solvers and integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown selector `{0}`")]
    UnknownSelector(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    /// The hyperbolic (su(1,1)) dressing needs `2 g1 / omega < 1`.
    #[error("coupling out of domain: 2*g1/omega = {ratio} must be < 1 for the su(1,1) mode")]
    CouplingDomain { ratio: f64 },

    #[error("truncation leakage {leakage:e} exceeds tolerance {tol:e}")]
    TruncationLeakage { leakage: f64, tol: f64 },

    #[error("quantum number {n} beyond trusted range (n_max = {n_max})")]
    QuantumNumberOutOfRange { n: usize, n_max: usize },

    #[error("level pair ({m}, {n}) is invalid: {reason}")]
    InvalidPair { m: usize, n: usize, reason: &'static str },

    #[error("degenerate eigenvalues: projector formula undefined")]
    Degenerate,

    #[error("residual does not change sign over [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge: |residual| = {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("step floor {h_min:e} reached at t = {t} without convergence (last difference {diff:e})")]
    StepFloor { t: f64, h_min: f64, diff: f64 },

    #[error("initial state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
