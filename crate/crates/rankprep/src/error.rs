use thiserror::Error;

/// Every failure the library can report.
///
/// The CLI maps variants onto its exit-code contract via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("resource cap exceeded: {what} needs {requested} qubits, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        requested: u32,
        cap: u32,
    },
    #[error("postselection impossible: branch probability {prob:e}")]
    PostselectionImpossible { prob: f64 },
    #[error("function evaluation failed at j = {j} (x = {x})")]
    Evaluation { j: usize, x: f64 },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Shape(_) => 2,
            Error::ResourceCap { .. } => 3,
            Error::PostselectionImpossible { .. } => 4,
            Error::Evaluation { .. }
            | Error::Numeric(_)
            | Error::SearchExhausted(_)
            | Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
