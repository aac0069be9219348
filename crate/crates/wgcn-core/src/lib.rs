//! Word-grounded graph convolutional text classification, core algorithms.
//!
//! This crate holds everything that is pure computation: CSR sparse kernels,
//! word-graph construction from co-occurrence or citation statistics, and the
//! linear graph-convolutional classifier with hand-derived gradients. The
//! graph is built over vocabulary terms rather than documents, so a trained
//! model can label documents that were never part of the graph.
//!
//! IO, file formats, dataset handling, and the CLI live in the companion
//! `wgcn` crate. This crate is `no_std`-compatible (with `alloc`); enable the
//! `libm` feature in place of `std` for math support.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod dense;
mod error;
mod fmath;
mod rng;
mod sparse;

pub mod model;
pub mod wgraph;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use rng::Rng;
pub use sparse::{
    matrix_power, normalize_symmetric, sp_sp_mm, spmm, Normalized, SparseMatrix, DROP_TOLERANCE,
    SYMMETRY_TOLERANCE,
};
