use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not normal (commutator defect {defect:.3e} exceeds {allowed:.3e})")]
    NotNormal { defect: f64, allowed: f64 },
    #[error("matrix is not self-adjoint (defect {defect:.3e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("value {value} lies outside the function domain [{lo}, {hi}]")]
    DomainError { value: f64, lo: f64, hi: f64 },
    #[error("spectrum set is empty")]
    EmptySet,
    #[error("incompatible model: {0}")]
    IncompatibleModel(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("truncation size {got} is smaller than the correction support {needed}")]
    TruncationTooSmall { needed: usize, got: usize },
    #[error("family is not certified: {0}")]
    NotCertified(String),
    #[error("operator is not elliptic: principal symbol vanishes at direction {direction:?}")]
    NotElliptic { direction: Vec<f64> },
    #[error("mode cutoff too small: {0}")]
    CutoffTooSmall(String),
}
