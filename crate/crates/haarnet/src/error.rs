use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in a text file something went wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub file: PathBuf,
    /// 1-based; `None` for binary files and whole-file problems.
    pub line: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{line}", self.file.display()),
            None => write!(f, "{}", self.file.display()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{at}: {msg}")]
    Format { at: Location, msg: String },
    #[error("{0}")]
    Data(String),
    #[error("graph {graph_id}: {source}")]
    Graph {
        graph_id: usize,
        #[source]
        source: haarnet_core::Error,
    },
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] haarnet_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(file: impl Into<PathBuf>, line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Format {
            at: Location {
                file: file.into(),
                line,
            },
            msg: msg.into(),
        }
    }

    /// Process exit status: 2 usage, 3 data or format, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        fn core_code(e: &haarnet_core::Error) -> i32 {
            match e {
                haarnet_core::Error::Numerical(_) => 4,
                _ => 3,
            }
        }
        match self {
            Error::Usage(_) => 2,
            Error::Io { .. } | Error::Format { .. } | Error::Data(_) | Error::Json(_) => 3,
            Error::Graph { source, .. } => core_code(source),
            Error::Core(e) => core_code(e),
            Error::Numerical(_) => 4,
        }
    }
}
