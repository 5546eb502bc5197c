use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at z = ({re}, {im})")]
    Pole { re: f64, im: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NonHermitian(f64),
    #[error("image of the disc is unbounded for j = {0}")]
    Unbounded(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("marginal problem: {0}")]
    Marginal(String),
    #[error("degenerate product: {0}")]
    Degenerate(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("invalid input in field `{field}`: {msg}")]
    Input { field: String, msg: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn input(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Input { field: field.into(), msg: msg.into() }
    }
}
