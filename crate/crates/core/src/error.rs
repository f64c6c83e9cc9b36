use thiserror::Error;

/// Every failure a public operation can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("potential has no sampler and no eigenbasis to synthesize one")]
    MissingSampler,
    #[error("k = {k} sits on a pole of tan(k/2)")]
    PoleAtK { k: f64 },
    #[error("no sign change found in the bracket of index {n}")]
    BracketFailure { n: i64 },
    #[error("branch {branch} is not valid for index {n}")]
    InvalidBranch { n: i64, branch: u8 },
    #[error("lambda = {re}{im:+}i lies on the spectrum")]
    LambdaOnSpectrum { re: f64, im: f64 },
    #[error("lambda is on a pole of the secular function (index {n})")]
    OnPole { n: i64 },
    #[error("secular function vanishes at lambda (|Q| = {q_abs:e})")]
    SecularZero { q_abs: f64 },
    #[error("mu = {mu} is not a root of the secular function (|Q| = {q_abs:e})")]
    NotASecularRoot { mu: f64, q_abs: f64 },
    #[error("extrapolation ladder spread {spread:e} exceeds 10%")]
    NonConvergent { spread: f64 },
    #[error("zero-eigenvalue pattern matches no known case: {0}")]
    CaseMismatch(String),
    #[error("recovered residues have mixed signs")]
    SignError,
    #[error("probe coefficient g_{n} = {g_abs:e} is below the floor {floor:e}")]
    GFloorViolation { n: i64, g_abs: f64, floor: f64 },
    #[error("modulus from cross term ({from_cross:e}) disagrees with weight ({from_weight:e}) at index {n}")]
    InconsistentModulus { n: i64, from_cross: f64, from_weight: f64 },
    #[error("lambda = {lambda} is not a root of the characteristic determinant")]
    NotARoot { lambda: f64 },
    #[error("grid size {m} is too coarse (need at least 64)")]
    GridTooCoarse { m: usize },
    #[error("eigensolver failed: {0}")]
    EigensolveFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MissingSampler => "MissingSampler",
            Error::PoleAtK { .. } => "PoleAtK",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::InvalidBranch { .. } => "InvalidBranch",
            Error::LambdaOnSpectrum { .. } => "LambdaOnSpectrum",
            Error::OnPole { .. } => "OnPole",
            Error::SecularZero { .. } => "SecularZero",
            Error::NotASecularRoot { .. } => "NotASecularRoot",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::CaseMismatch(_) => "CaseMismatch",
            Error::SignError => "SignError",
            Error::GFloorViolation { .. } => "GFloorViolation",
            Error::InconsistentModulus { .. } => "InconsistentModulus",
            Error::NotARoot { .. } => "NotARoot",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::EigensolveFailure(_) => "EigensolveFailure",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
