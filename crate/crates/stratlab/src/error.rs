use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("index {index:?} out of range for n = {n}")]
    Range { index: [usize; 3], n: usize },
    #[error("non-finite value in {0}")]
    Numeric(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("wave operator undefined at xi = 0")]
    SingularMode,
    #[error("degenerate line xi_h = 0: {0}")]
    DegenerateLine(String),
    #[error("ill-conditioned eigenbasis at mode {mode:?} (condition {condition:.3e})")]
    Conditioning { mode: [f64; 3], condition: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("tolerance not reached: estimate {estimate}, achieved error {achieved:.3e}")]
    Accuracy { estimate: f64, achieved: f64 },
    #[error("simulation diverged at t = {t}; last stable time {last_stable}")]
    Divergence { t: f64, last_stable: f64 },
    #[error("CFL number {cfl:.3} above limit; suggested dt = {suggested_dt:.3e}")]
    Cfl { cfl: f64, suggested_dt: f64 },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed data: {0}")]
    Format(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
