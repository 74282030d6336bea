//! Binary and text storage of a [`Scheme`](crate::model::Scheme).
//!
//! Both formats write a compacted copy, so identifiers come back dense.

mod binary;
mod codes;
mod text;


use thiserror::Error;

pub use binary::{load_binary, save_binary, FORMAT_VERSION, MAGIC};
pub use text::{apply_setting, load_text, save_text, TEXT_VERSION};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BinaryError {
    #[error("not a scheme file")]
    BadMagic,
    #[error("file is truncated")]
    Truncated,
    #[error("format version {found} is newer than supported {supported}")]
    VersionTooNew { found: u16, supported: u16 },
    #[error("{list} index {index} out of range (list has {len})")]
    DanglingIndex { list: &'static str, index: u32, len: usize },
    #[error("too many {list}: {count}")]
    TooManyObjects { list: &'static str, count: usize },
    #[error("invalid data: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct TextError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}
