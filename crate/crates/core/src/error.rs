use std::io;
use std::path::PathBuf;

use crate::eps::EpsError;
use crate::expr::ParseError;
use crate::labeling::TexParseError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("duplicate psfrag tag `{tag}` used by {first} and {second}")]
    DuplicateTag { tag: String, first: String, second: String },
    #[error(transparent)]
    Eps(#[from] EpsError),
    #[error(transparent)]
    TexFile(#[from] TexParseError),
    /// Malformed scene or hook document.
    #[error("{0}")]
    Document(String),
    #[error("tags not found in the EPS: {}", .0.join(", "))]
    MissingTags(Vec<String>),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 1 for unparsable input, 2 for semantic errors,
    /// 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax(_) | Error::Eps(_) | Error::TexFile(_) | Error::Document(_) => 1,
            Error::InvalidScene(_) | Error::DuplicateTag { .. } | Error::MissingTags(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}
