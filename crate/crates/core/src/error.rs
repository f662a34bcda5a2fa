use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Parse-level variants carry a location (`line` is 1-based; `offset` is a
/// byte offset into a binary file) so malformed inputs can be fixed by hand.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate entry for frame {frame}, id {id}")]
    DuplicateEntry { frame: u32, id: u64 },

    #[error("degenerate box (w = {w}, h = {h})")]
    DegenerateBox { w: f64, h: f64 },

    #[error("non-finite value in {what}")]
    NonFiniteValue { what: &'static str },

    #[error("cost matrix contains a non-finite entry at ({row}, {col})")]
    NonFiniteCost { row: usize, col: usize },

    #[error("cost matrix is ragged: row {row} has {got} columns, expected {expected}")]
    RaggedMatrix { row: usize, got: usize, expected: usize },

    #[error("detections span several frames ({first} and {other})")]
    MixedFrames { first: u32, other: u32 },

    #[error("expected a {expected} detection, got {got}")]
    WrongKind { expected: &'static str, got: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gallery is empty")]
    EmptyGallery,

    #[error("frame {got} out of order, expected {expected}")]
    FrameOrderViolation { expected: u32, got: u32 },

    #[error("detection {det_id} has no embedding record")]
    MissingEmbedding { det_id: u64 },

    #[error("ground truth is empty")]
    EmptyGroundTruth,

    #[error("invalid scenario: {0}")]
    InvalidSpec(String),

    #[error("script for id {id} covers frame {frame}, outside the ground truth support")]
    ScriptOutOfRange { id: u64, frame: u32 },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}:{line}: {source}")]
    Invalid {
        path: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: duplicate det_id {det_id} at line {line}")]
    DuplicateDetId { path: PathBuf, line: usize, det_id: u64 },

    #[error("{path}: bad magic bytes")]
    BadMagic { path: PathBuf },

    #[error("{path}: truncated record at byte {offset}")]
    TruncatedRecord { path: PathBuf, offset: usize },

    #[error("{path}: embedding dimension {got} does not match {expected}")]
    DimMismatch { path: PathBuf, expected: usize, got: usize },

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
        Error::Io { path: path.into(), source }
    }

    /// The innermost error, unwrapping line-location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Invalid { source, .. } => source.root(),
            other => other,
        }
    }
}
