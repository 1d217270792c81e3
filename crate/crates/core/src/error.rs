use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// A validation finding anchored to a field path such as `params.gamma[1]`.
///
/// `line` is filled in when the finding can be traced back to a position in
/// a source document.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub path: String,
    pub message: String,
    pub line: Option<usize>,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
            line: None,
        }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
            line: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Prepends `prefix` to the path, joining with a dot.
    pub fn under(mut self, prefix: &str) -> Self {
        self.path = if self.path.is_empty() {
            prefix.to_string()
        } else if self.path.starts_with('[') {
            format!("{prefix}{}", self.path)
        } else {
            format!("{prefix}.{}", self.path)
        };
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match self.line {
            Some(line) => write!(f, "{level}: line {line}: {}: {}", self.path, self.message),
            None => write!(f, "{level}: {}: {}", self.path, self.message),
        }
    }
}

/// Renders a list of diagnostics one per line.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration:\n{}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),

    #[error("{0}")]
    Precondition(String),

    #[error("unknown parameter path `{0}`")]
    UnknownParameter(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        SimError::Precondition(msg.into())
    }

    /// Errors caused by bad input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, SimError::Io(_))
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
