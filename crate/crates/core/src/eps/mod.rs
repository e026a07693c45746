//! EPS tokenizing, tag scanning, writing and in-place tag rewriting.

mod interp;
pub mod metrics;
mod rewrite;
mod token;
mod writer;

pub use interp::{scan, scan_tags, Scan, TagOccurrence};
pub use rewrite::{rewrite_tags, tag_bytes};
pub use token::{escape_string, tokenize, PsToken, TokenKind};
pub use writer::{format_num, write_eps, TextPlacement, TEXT_FONT, TEXT_FONT_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("EPS error at byte {offset}: {message}")]
pub struct EpsError {
    pub offset: usize,
    pub message: String,
}

impl EpsError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        Self { offset, message: message.into() }
    }
}
