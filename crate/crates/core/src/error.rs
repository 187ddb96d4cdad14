use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("regex parse error at byte {position}: {message}")]
    RegexParse { position: usize, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),

    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("subset construction exceeded the cap of {cap} states")]
    StateExplosion { cap: usize },

    #[error("invalid loss model: {0}")]
    InvalidLossModel(String),

    #[error("unsupported by the oracle: {0}")]
    OracleUnsupported(String),

    #[error("enumeration exceeded the cap of {cap} {what}")]
    EnumerationCap { what: &'static str, cap: usize },

    #[error("segment {index} is not a member of R^-1(`{gamma}`)")]
    InvalidSegment { index: usize, gamma: String },

    #[error("invalid keep-set: {0}")]
    InvalidKeepSet(String),

    #[error("monitor session is poisoned by an earlier error")]
    PoisonedSession,

    #[error("invalid property spec at `{path}`: {message}")]
    Spec { path: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec { path: path.into(), message: message.into() }
    }
}
