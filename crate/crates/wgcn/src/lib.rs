//! Dataset ingestion, file formats, evaluation harness, and CLI plumbing for
//! the word-grounded graph convolutional classifier. The algorithms live in
//! `wgcn-core`; this crate owns everything that touches the filesystem.

pub mod alloc_track;
pub mod artifacts;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod manifest;
pub mod matio;

mod error;

pub use error::{Error, Result};
