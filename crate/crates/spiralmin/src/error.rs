use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was non-finite or outside its validity range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The jet does not describe an immersed point: det(∇ᵀ∇) is below the
    /// scale-invariant tolerance.
    #[error("degenerate immersion: det(gradᵀ grad) = {det:.3e} below tolerance {tol:.3e}")]
    DegenerateImmersion { det: f64, tol: f64 },

    /// The conformal defect exceeds the 1/4 hypothesis under which the
    /// derivative bounds of the mean-curvature functional hold.
    #[error("conformal defect {defect:.3e} not below 1/4")]
    DefectTooLarge { defect: f64 },

    /// A node-wise evaluation inside the solver left the admissible domain.
    #[error("solver domain error at node {node} (s = {s:.6}): {reason}")]
    SolverDomain { node: usize, s: f64, reason: String },

    /// The fixed-point iteration did not reach the residual tolerance.
    #[error("no convergence after {iterations} iterations; last residual {last_residual:.3e}")]
    Diverged {
        iterations: usize,
        last_residual: f64,
        residual_history: Vec<f64>,
    },

    /// An `s` value outside the grid domain `[-S, S]`.
    #[error("s = {s:.6} outside grid domain [-{half_width:.6}, {half_width:.6}]")]
    OutOfDomain { s: f64, half_width: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
