use thiserror::Error;

/// Errors raised by the library.
///
/// The three broad classes map onto the CLI exit codes: domain errors (bad
/// inputs, 2), numerical failures (3) and sector violations (4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of Gamma at z = {0}")]
    GammaPole(f64),
    #[error("complete elliptic integral K diverges at k = 1")]
    EllipticDivergence,
    #[error("expansion depth {requested} exceeds the implemented/requested depth {available}")]
    TruncationTooShallow { requested: usize, available: usize },
    #[error("constant-fixing fit unstable: dilations moved the constant by {moved:e} (tol {tol:e})")]
    FitUnstable { moved: f64, tol: f64 },
    #[error("no sign change bracketing level {level} in [{lo}, {hi}]")]
    NotBracketed { level: usize, lo: f64, hi: f64 },
    #[error("convergence abscissa: zeta sum needs Re s > {abscissa}, got {s}")]
    ConvergenceAbscissa { s: f64, abscissa: f64 },
    #[error("tail budget exceeded: estimated error {estimate:e} > tol {tol:e}")]
    TailBudget { estimate: f64, tol: f64 },
    #[error("|arg v| = {arg} outside the sector |arg v| < {theta}")]
    SectorViolation { arg: f64, theta: f64 },
    #[error("calibration drift: {0}")]
    CalibrationDrift(String),
    #[error("restriction: {0}")]
    Restriction(String),
    #[error("step collapse while tracing near q = {re} + {im} i")]
    StepCollapse { re: f64, im: f64 },
    #[error("no linkage transition found on [0, pi)")]
    NoTransition,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Exit-code class used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::GammaPole(_)
            | Error::EllipticDivergence
            | Error::ConvergenceAbscissa { .. }
            | Error::Restriction(_)
            | Error::Unsupported(_)
            | Error::TruncationTooShallow { .. } => 2,
            Error::SectorViolation { .. } => 4,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
