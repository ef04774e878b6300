//! Command errors and their exit codes.

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Exit code of a validation error: bad configuration, inputs or files.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit code of a numerical failure.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("{context}: {source}")]
    Model {
        context: String,
        source: flatscreen::Error,
    },

    /// A property or acceptance check did not hold.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn model(context: impl Into<String>, source: flatscreen::Error) -> Self {
        CliError::Model {
            context: context.into(),
            source,
        }
    }

    /// Prefix the message with the configuration file it came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            CliError::Model { context, source } => CliError::Model {
                context: format!("{}: {context}", path.display()),
                source,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model { source, .. } if source.is_numerical() => EXIT_NUMERICAL,
            CliError::CheckFailed(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_separate_inputs_from_numerics() {
        let numerical = CliError::model("solve", flatscreen::Error::Numerical("residual".into()));
        assert_eq!(numerical.exit_code(), EXIT_NUMERICAL);
        let ill = CliError::model(
            "solve",
            flatscreen::Error::IllConditioned {
                context: "lu".into(),
                estimate: 1e16,
            },
        );
        assert_eq!(ill.exit_code(), EXIT_NUMERICAL);
        assert_eq!(
            CliError::CheckFailed("x".into()).exit_code(),
            EXIT_NUMERICAL
        );
        let geometry = CliError::model("shape", flatscreen::Error::Geometry("loop".into()));
        assert_eq!(geometry.exit_code(), EXIT_VALIDATION);
        assert_eq!(CliError::Config("bad".into()).exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn file_context_is_prefixed() {
        let e = CliError::Config("wavenumber: bad".into()).in_file(Path::new("a/b.toml"));
        assert_eq!(e.to_string(), "a/b.toml: wavenumber: bad");
    }
}
