use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("XML parse error at line {line}: {message}")]
    Xml { line: u32, message: String },

    #[error("alignment error in sentence {sentence_id}: {message}")]
    Alignment { sentence_id: String, message: String },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn alignment(sentence_id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Alignment {
            sentence_id: sentence_id.into(),
            message: message.into(),
        }
    }
}
