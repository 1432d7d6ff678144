//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
///
/// The variants mirror the exit-code classes of the command-line tool:
/// malformed input ([`Error::Argument`], [`Error::Parse`]), a mathematical
/// precondition that the input does not satisfy ([`Error::Precondition`]),
/// and a violated internal identity ([`Error::Internal`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is out of range or structurally invalid.
    #[error("argument error: {0}")]
    Argument(String),
    /// Text input could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// The input does not satisfy a mathematical precondition.
    ///
    /// `residual` carries the serialized witness, for instance the nonzero
    /// value of `[Π,Π]`.
    #[error("precondition violated: {message}{}", residual_suffix(.residual))]
    Precondition {
        message: String,
        residual: Option<String>,
    },
    /// An identity that holds for all valid inputs failed.
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

fn residual_suffix(residual: &Option<String>) -> String {
    match residual {
        Some(r) => format!(" (residual: {r})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn precondition(message: impl Into<String>, residual: Option<String>) -> Self {
        Error::Precondition {
            message: message.into(),
            residual,
        }
    }

    /// Shifts the position of a parse error, used when a polynomial is
    /// parsed out of a larger document.
    pub fn offset_parse(self, line: usize, column: usize) -> Self {
        match self {
            Error::Parse {
                line: l,
                column: c,
                message,
            } => Error::Parse {
                line: line + l - 1,
                column: if l == 1 { column + c - 1 } else { c },
                message,
            },
            other => other,
        }
    }
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;
