use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::phoneme::Phoneme;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{0}: zero valid entries")]
    NoValidEntries(String),

    #[error("out-of-vocabulary word: {0:?}")]
    OutOfVocabulary(String),

    #[error("unknown phoneme symbol: {0:?}")]
    UnknownPhoneme(String),

    #[error("index {index} out of bounds for pronunciation of length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("phoneme {0} is not covered by any illusion rule")]
    NotRulePhoneme(Phoneme),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("word {0:?} was never held out of training")]
    NeverOutOfFold(String),

    #[error("empty sentence")]
    EmptySentence,

    #[error("every word of the sentence is out of vocabulary")]
    AllWordsOutOfVocabulary,

    #[error("unsupported audio encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("malformed audio: {0}")]
    MalformedAudio(String),

    #[error("every spectrogram frame is silent")]
    AllSilent,

    #[error("audio source failed for {word:?}: {message}")]
    AudioSource { word: String, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
