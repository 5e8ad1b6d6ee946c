use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] cgf_core::Error),
}

impl CliError {
    /// 1 if the input is well formed but fails a mathematical precondition,
    /// 2 for malformed input, 3 for failures inside a pipeline.
    pub fn code(&self) -> u8 {
        use cgf_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Write { .. } => 3,
            CliError::Core(e) => match e {
                E::NotStronglyMinimal(_) | E::NotSFree(_) | E::NotMaximal(_) | E::Unbounded => 1,
                E::InvalidFunction(_)
                | E::InvalidProblem(_)
                | E::InvalidPolyhedron(_)
                | E::EmptyFacets
                | E::OutOfRange(_)
                | E::PeriodMismatch { .. }
                | E::VariantMismatch(_)
                | E::Precondition(_)
                | E::UnsupportedShape(_) => 2,
                E::DegenerateSlopes { .. } | E::NotOnGrid(_) | E::Stage { .. } | E::SearchExhausted(_) => 3,
            },
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

pub type CliResult<T> = Result<T, CliError>;
