use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mask contains no interior nodes")]
    EmptyMask,
    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("right-hand side violates Neumann compatibility (relative mean {mean:.3e})")]
    CompatibilityViolation { mean: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("energy descent stalled at energy {energy:.6e} with residual {residual:.3e}")]
    Stalled { energy: f64, residual: f64 },
    #[error("frame is singular or ill-conditioned at node {node}")]
    SingularFrame { node: usize },
    #[error(
        "fixed-point iteration is not contracting at iteration {iterations} (growth {growth:.3})"
    )]
    NoContraction { iterations: usize, growth: f64 },
    #[error("condition dagger violated: eps_dagger {eps_dagger:.4} exceeds eps {eps:.4}")]
    ConditionDaggerViolated { eps_dagger: f64, eps: f64 },
    #[error("input section is not closed: dbar residual {residual:.3e} exceeds {tolerance:.3e}")]
    InputNotClosed { residual: f64, tolerance: f64 },
    #[error("map leaves the target at node {node} (deviation {deviation:.3e})")]
    NotOnTarget { node: usize, deviation: f64 },
    #[error("immersion is not conformal at node {node} (defect {defect:.3e})")]
    ConformalityViolated { node: usize, defect: f64 },
    #[error("connection is not skew-Hermitian (max defect {defect:.3e})")]
    NotSkewHermitian { defect: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed field dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable variant name, printed by the CLI on failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::EmptyMask => "EmptyMask",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::CompatibilityViolation { .. } => "CompatibilityViolation",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::Stalled { .. } => "Stalled",
            Error::SingularFrame { .. } => "SingularFrame",
            Error::NoContraction { .. } => "NoContraction",
            Error::ConditionDaggerViolated { .. } => "ConditionDaggerViolated",
            Error::InputNotClosed { .. } => "InputNotClosed",
            Error::NotOnTarget { .. } => "NotOnTarget",
            Error::ConformalityViolated { .. } => "ConformalityViolated",
            Error::NotSkewHermitian { .. } => "NotSkewHermitian",
            Error::Config(_) => "Config",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
        }
    }
}
