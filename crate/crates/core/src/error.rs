use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid atom {0:?}: atoms are 1-8 printable ASCII bytes without ( ) | or '")]
    InvalidAtom(String),

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("parse error at token {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid grammar: {0}")]
    Grammar(String),

    #[error("maxFlips {0} exceeds the enumeration limit of {limit}", limit = crate::dist::MAX_ENUMERATION_FLIPS)]
    TooManyFlips(usize),

    #[error("invalid language parameters: {0}")]
    Language(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
