use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] nyquist_core::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("bad arguments: {0}")]
    BadArgs(String),
}

impl BenchError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code: 2 bad arguments, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use nyquist_core::Error as E;
        match self {
            BenchError::BadArgs(_) => 2,
            BenchError::Core(
                E::InvalidArgument(_)
                | E::InvalidK(_)
                | E::NotInteger { .. }
                | E::NotMultiple { .. }
                | E::SpectrumError { .. },
            ) => 2,
            BenchError::Core(_) => 3,
            BenchError::Io { .. } | BenchError::Json { .. } | BenchError::Csv(_) => 4,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
