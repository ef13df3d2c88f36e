use thiserror::Error;

use crate::grid::GridError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("diagram too large: n={n}, m={m} ({what})")]
    TooLarge {
        n: usize,
        m: usize,
        what: &'static str,
    },
    #[error("no decomposition of generator into base generators")]
    NoDecomposition,
    #[error("inconsistent relative grading in component {component}")]
    InconsistentGrading { component: usize },
    #[error("sign constraints are inconsistent ({0})")]
    InconsistentSigns(String),
    #[error("sign assignments live on different complexes")]
    IncomparableDomains,
    #[error("integer overflow during {0}")]
    Overflow(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("identity check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
