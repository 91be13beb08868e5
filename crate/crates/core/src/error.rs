use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations (estimate {estimate}, error {error:e})")]
    NonConvergence { iterations: usize, estimate: f64, error: f64 },

    /// No point satisfies the constraints of an optimization problem.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A work budget (draws, codebook scans, enumerations) ran out.
    #[error("budget exceeded: {what} (partial estimate {partial:?})")]
    Budget { what: String, partial: Option<f64> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that mean the solver could not produce an answer
    /// for otherwise valid input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. } | Error::NonConvergence { .. } | Error::Infeasible(_) | Error::Budget { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
