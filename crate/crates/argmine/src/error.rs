//! Crate-wide error type.

use std::fmt;
use std::path::PathBuf;

/// Errors produced by corpus ingestion, dataset handling, training and evaluation.
#[derive(Debug)]
pub enum Error {
    /// I/O failure with the path that was being accessed.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Malformed standoff annotation line.
    Annotation { line: usize, message: String },
    /// Component span inconsistent with the essay text.
    Span { essay: String, message: String },
    /// One or more corpus files failed to load; one entry per file.
    CorpusLoad { failures: Vec<(PathBuf, String)> },
    /// Corpus directory contains no essays.
    NoEssays { dir: PathBuf },
    /// Malformed lexicon or word-list file.
    Lexicon { line: usize, message: String },
    /// Malformed dataset file encountered during import.
    Import { line: usize, message: String },
    /// Dataset schema inconsistent with its contents or with another dataset.
    Schema { message: String },
    /// Training could not proceed (degenerate data, non-finite values).
    Train { message: String },
    /// Feature vector dimensionality differs from the model's.
    DimensionMismatch { expected: usize, found: usize },
    /// Invalid cross-validation fold request.
    Folds { message: String },
    /// Invalid run configuration.
    Config { message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Annotation { line, message } => {
                write!(f, "annotation line {line}: {message}")
            }
            Error::Span { essay, message } => write!(f, "essay {essay}: {message}"),
            Error::CorpusLoad { failures } => {
                writeln!(f, "{} corpus file(s) failed to load:", failures.len())?;
                for (path, message) in failures {
                    writeln!(f, "  {}: {message}", path.display())?;
                }
                Ok(())
            }
            Error::NoEssays { dir } => {
                write!(f, "no essays found in {}", dir.display())
            }
            Error::Lexicon { line, message } => write!(f, "lexicon line {line}: {message}"),
            Error::Import { line, message } => write!(f, "line {line}: {message}"),
            Error::Schema { message } => write!(f, "schema: {message}"),
            Error::Train { message } => write!(f, "training: {message}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Folds { message } => write!(f, "fold plan: {message}"),
            Error::Config { message } => write!(f, "config: {message}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
