use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag combinations.
    #[error("{0}")]
    Usage(String),

    /// A check or validation that ran and did not pass.
    #[error("{0}")]
    Failed(String),

    #[error(transparent)]
    Core(#[from] rcgap::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::File {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for failed checks and chains that violate a required property,
    /// 2 for usage, input and cap errors.
    pub fn exit_code(&self) -> u8 {
        use rcgap::Error as E;
        match self {
            CliError::Failed(_) => 1,
            CliError::Core(E::NonErgodic(_) | E::NonReversible { .. } | E::NotSelfAdjoint { .. }) => 1,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Failed("x".into()).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(rcgap::Error::NonErgodic("x".into())).exit_code(), 1);
        let cap = rcgap::Caps::default().check_states(30).unwrap_err();
        assert_eq!(CliError::Core(cap).exit_code(), 2);
    }
}
