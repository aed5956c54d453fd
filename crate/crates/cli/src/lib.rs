//! Command implementations behind the `krinpaint` binary.
//!
//! Every command is a plain function returning a [`CliError`] on failure; the
//! binary maps the error onto its exit code.

pub mod commands;
pub mod config;
pub mod io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or unwritable file, or an empty corpus.
    #[error("{0}")]
    Io(String),
    /// Shapes that do not line up, or a block coordinate outside the image.
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    FullyMasked(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Shape(_) => 3,
            CliError::FullyMasked(_) => 4,
        }
    }
}

impl From<kriging_inpaint::Error> for CliError {
    fn from(e: kriging_inpaint::Error) -> Self {
        use kriging_inpaint::Error as E;
        match e {
            E::DimensionMismatch { .. } | E::ShapeMismatch(..) => CliError::Shape(e.to_string()),
            E::FullyMasked | E::TooFewSamples(_) => CliError::FullyMasked(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
