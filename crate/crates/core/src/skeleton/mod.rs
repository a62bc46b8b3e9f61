//! Skeleton point streams: layouts, canonical CSV parsing, corpus
//! adapters and windowing.

mod adapter;
mod layout;
mod stream;
mod window;

use thiserror::Error;

pub use adapter::{adapt_corpus, ColumnMapping, PointColumns};
pub use layout::{Modality, ModalityLayout, PointId, ARM_JOINTS, TRUNK_JOINTS};
pub use stream::{canonical_header, infer_frame_rate, parse_stream, SkeletonFrame, SkeletonStream, DEFAULT_FRAME_RATE_HZ};
pub use window::{windows, Window, DEFAULT_WINDOW_FRAMES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkeletonError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid stream{}: {message}", frame.map(|f| format!(" at frame {f}")).unwrap_or_default())]
    Validation { frame: Option<usize>, message: String },
    #[error("line {line}: {message}")]
    Mapping { line: usize, message: String },
    #[error("{0}")]
    Config(String),
    #[error("no frames in input")]
    Empty,
}
