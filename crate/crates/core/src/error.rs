use thiserror::Error;

/// Structured validation failure, located by a JSON pointer into the
/// offending document (or a byte offset for binary formats).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct FormatError {
    pub location: String,
    pub message: String,
}

impl FormatError {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Prefixes the location with a file path.
    pub fn in_file(mut self, path: &std::path::Path) -> Self {
        self.location = format!("{}#{}", path.display(), self.location);
        self
    }
}
