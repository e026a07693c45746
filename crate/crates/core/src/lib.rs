//! Export plot scenes as tagged EPS plus `\psfrag` replacement macros.
//!
//! The pipeline is [`labeling::psfrag_export`]: expand decorations, wrap text
//! in label directives, build one `\psfrag` entry per tagged label, then write
//! the EPS ([`eps::write_eps`]) and the tex file ([`labeling::emit_tex`]).

pub mod eps;
mod error;
pub mod expr;
pub mod format;
pub mod geom;
pub mod labeling;
pub mod preview;
pub mod scene;

pub use error::Error;
