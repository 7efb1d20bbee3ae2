use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tolerance {eps:e} outside [{floor:e}, 1/2]")]
    Tolerance { eps: f64, floor: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dichotomy miss: Ritz values not optimal and no shift decoupled")]
    DichotomyMiss,
    #[error("no exceptional shift among {tried} candidates reduced the potential")]
    NoCandidate { tried: usize },
    #[error("small eigenvalue solver: {0}")]
    SmallEig(String),
    #[error("exceptional net would hold {points:.3e} points (cap {cap})")]
    NetTooLarge { points: f64, cap: usize },
    #[error("block {block}: iteration budget {budget} exhausted")]
    BudgetExceeded { block: usize, budget: usize },
    #[error("block {block}: {attempts} attempts failed, last: {last}")]
    RetriesExhausted {
        block: usize,
        attempts: usize,
        last: Box<Error>,
    },
    #[error("singular: {0}")]
    Singular(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("near-defective: {0}")]
    Defective(String),
}

impl Error {
    /// Failure events of a randomized subroutine; a fresh draw may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::DichotomyMiss | Error::NoCandidate { .. } | Error::SmallEig(_)
        )
    }

    /// Failures attributable to randomness rather than to the input or configuration.
    pub fn is_probabilistic(&self) -> bool {
        self.is_retryable()
            || matches!(
                self,
                Error::RetriesExhausted { .. } | Error::BudgetExceeded { .. }
            )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
