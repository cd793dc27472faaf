use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("generator {name} out of range for n = {n}")]
    GeneratorOutOfRange { name: String, n: usize },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("coefficient matrix not symmetric at ({i}, {j})")]
    NonSymmetric { i: usize, j: usize },
    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },
    #[error("matrix is not in sp(n) (residual {residual:.3e})")]
    NotInSp { residual: f64 },
    #[error("eigenvalue clustering ambiguous: {detail} (gap {gap:.3e})")]
    ClusterAmbiguity { gap: f64, detail: String },
    #[error("eigenvalue {re:.6}{im:+.6}i has no partner of opposite sign")]
    UnpairedEigenvalue { re: f64, im: f64 },
    #[error("eigenvalue with imaginary part {im:.3e} is ambiguous between real and non-real")]
    AmbiguousReal { im: f64 },
    #[error("matrix not nilpotent within tolerance (residual {residual:.3e})")]
    NotNilpotent { residual: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("focal time near t = {t}: |det cos| = {det:.3e}")]
    FocalTime { t: f64, det: f64 },
    #[error("aliasing risk: boundary mass fraction {fraction:.3e}")]
    Aliasing { fraction: f64 },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse category, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::GeneratorOutOfRange { .. }
            | Error::Schema(_)
            | Error::NonSymmetric { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::Grid(_) => ErrorKind::Input,
            _ => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
