use thiserror::Error;

/// Errors raised by the lattice laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The (p, d) pair violates the admissible parameter set.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Estimated per-cell quadrature error exceeded the tolerance.
    #[error("quadrature did not converge: estimated mean error {estimate:e} exceeds {tolerance:e} in cell {cell}")]
    Quadrature { estimate: f64, tolerance: f64, cell: usize },

    #[error("numerical instability at t = {t} (dt = {dt}, max |u| = {max_abs})")]
    Instability { t: f64, dt: f64, max_abs: f64 },

    #[error("periodic box too small: length {length} < minimal {minimal} (at least {minimal_points} points per axis at h = {step})")]
    Wraparound { length: f64, minimal: f64, minimal_points: usize, step: f64 },

    #[error("oscillatory quadrature needs {required} points, budget is {budget}")]
    Resolution { required: u128, budget: u128 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("reference validation failed: h_ref vs 2 h_ref differ by {difference:e}, allowed {allowed:e}")]
    ReferenceValidation { difference: f64, allowed: f64 },
}

impl Error {
    /// Failures of a computation on valid input, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Instability { .. }
                | Error::Resolution { .. }
                | Error::Fit(_)
                | Error::ReferenceValidation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
