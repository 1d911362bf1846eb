use dimer_expansion::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read kernels from {path}: {reason}")]
    KernelFile { path: String, reason: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 invalid config, 3 size or budget exceeded, 4 consistency failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::SizeBoundExceeded { .. } | Error::BudgetExceeded { .. } => 3,
                Error::Interpolation(_) | Error::NonConvergence { .. } | Error::Consistency(_) => 4,
                Error::InvalidLattice(_)
                | Error::InvalidTile(_)
                | Error::InvalidArgument(_)
                | Error::OddVertexCount(_)
                | Error::OrderOutOfRange { .. }
                | Error::SeriesDomain(_)
                | Error::InsufficientKernels(_) => 2,
            },
            CliError::Config(_) | CliError::KernelFile { .. } => 2,
            CliError::Io { .. } => 1,
        }
    }
}
