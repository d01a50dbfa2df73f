use thiserror::Error;

/// Errors produced by the analysis routines.
///
/// Leg numbers carried by variants are 1-based, matching how legs are
/// reported everywhere else.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate leg frame: rail axis and transverse axis are parallel")]
    DegenerateFrame,

    #[error("inconsistent configuration: leg {leg} length residual {residual:e} m")]
    InconsistentConfiguration { leg: usize, residual: f64 },

    #[error("pose is outside the workspace (unreachable legs: {legs:?})")]
    OutOfWorkspace { legs: Vec<usize> },

    #[error("serial singularity on legs {legs:?}")]
    SerialSingularity { legs: Vec<usize> },

    #[error("parallel singularity: bar directions are linearly dependent")]
    ParallelSingularity,

    #[error("parallelogram singularity at alpha = {alpha_deg} deg")]
    ParallelogramSingularity { alpha_deg: f64 },

    #[error("no reachable samples in the workspace box")]
    EmptyWorkspace,

    #[error("forward kinematics did not converge in {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("forward kinematics hit a singular iterate at iteration {iteration}")]
    SingularIterate { iteration: usize },

    #[error("forward kinematics converged to the rejected assembly branch on legs {legs:?}")]
    WrongBranch { legs: Vec<usize> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for this error.
    ///
    /// 1 = invalid input or config, 2 = singular or infeasible configuration,
    /// 3 = numerical nonconvergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::DegenerateFrame | Error::Io(_) => 1,
            Error::InconsistentConfiguration { .. }
            | Error::OutOfWorkspace { .. }
            | Error::SerialSingularity { .. }
            | Error::ParallelSingularity
            | Error::ParallelogramSingularity { .. }
            | Error::EmptyWorkspace => 2,
            Error::NonConvergence { .. }
            | Error::SingularIterate { .. }
            | Error::WrongBranch { .. } => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
