use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Variants are grouped loosely by the subsystem that produces them; callers
/// that need to distinguish configuration problems from numerical failures
/// can use [`Error::is_numerical`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix `{0}` is not symmetric")]
    NotSymmetric(&'static str),

    #[error("matrix `{0}` is singular")]
    Singular(&'static str),

    #[error("imaginary part is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("caustic: det(CZ+D) vanishes ({detail})")]
    Caustic { detail: String },

    #[error("symplectic defect {defect:e} too large to project (limit {limit:e})")]
    DefectTooLarge { defect: f64, limit: f64 },

    #[error("branch argument jumped by {jump:.3} rad between t={t0} and t={t1}; refine the path")]
    BranchJump { t0: f64, t1: f64, jump: f64 },

    #[error("Maslov index inconclusive: {0}")]
    Inconclusive(String),

    #[error("trajectory escaped: |(p,q)| = {norm:e} at t={t}")]
    Escape { t: f64, norm: f64 },

    #[error("step size underflow at t={t} (h={h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("Riccati germ lost positivity at t={t} (min eigenvalue {min_eigenvalue:e})")]
    GermDegenerate { t: f64, min_eigenvalue: f64 },

    #[error("focal point: {0}")]
    FocalPoint(String),

    #[error("Lagrangian constraint violated at sample {index}: residual {residual:e}")]
    NotLagrangian { index: usize, residual: f64 },

    #[error("grid does not cover the wave function: {0}")]
    Coverage(String),

    #[error("wave function does not decay at the grid edges (edge/peak = {ratio:e})")]
    EdgeDecay { ratio: f64 },

    #[error("hbar values differ between operands ({0} vs {1})")]
    HbarMismatch(f64, f64),

    #[error("grids differ between operands")]
    GridMismatch,

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("size limit exceeded: {0}")]
    SizeCap(String),

    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Caustic { .. }
                | Error::DefectTooLarge { .. }
                | Error::BranchJump { .. }
                | Error::Inconclusive(_)
                | Error::Escape { .. }
                | Error::StepUnderflow { .. }
                | Error::GermDegenerate { .. }
                | Error::FocalPoint(_)
                | Error::Convergence(_)
                | Error::Quadrature(_)
                | Error::EdgeDecay { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
