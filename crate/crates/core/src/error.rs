use std::path::PathBuf;

use thiserror::Error;

use crate::querylang::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Query(#[from] ParseError),

    /// A structured text file (corpus, categories, rules, config) failed to parse.
    #[error("{what}, line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("unsupported corpus version: expected `{expected}`, found `{found}`")]
    Version { expected: String, found: String },

    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),

    #[error("label refers to unknown document `{0}`")]
    UnknownDocument(String),

    #[error("document `{doc_id}` is labeled `{label}`, which is not a known category")]
    UnknownLabel { doc_id: String, label: String },

    #[error("corpus has no labels")]
    NoLabels,

    #[error("invalid category `{name}`: {message}")]
    InvalidCategory { name: String, message: String },

    #[error("invalid synthetic corpus spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            line,
            message: message.into(),
        }
    }

    /// True for failures caused by the filesystem rather than by bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
