use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("player index {index} out of range for a game with {n_players} players")]
    IndexOutOfRange { index: usize, n_players: usize },

    #[error("utility of coalition {coalition} is {value}, outside [0, 1]")]
    UtilityOutOfRange { coalition: String, value: f64 },

    #[error("{what} supports at most {limit} players, got {n_players}")]
    SizeLimit {
        what: &'static str,
        n_players: usize,
        limit: usize,
    },

    #[error("coalition has {found} players but the game has {expected}")]
    PlayerMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
