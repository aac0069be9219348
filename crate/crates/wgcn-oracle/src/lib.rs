// Index-style loops are the point here: the reference code mirrors the
// textbook formulas rather than idiomatic iterator chains.
#![allow(clippy::needless_range_loop)]

//! Brute-force reference implementations used only by tests.
//!
//! Everything here is deliberately naive and shares no code with the
//! production crates, so agreement between the two constitutes independent
//! verification. Scales are capped (dozens of rows, dozens of documents) to
//! keep test suites fast.

pub mod fd;
pub mod matrix;
pub mod planted;
pub mod scalar_adam;
pub mod textref;
pub mod windows;

pub use fd::central_difference;
pub use matrix::Mat;
pub use planted::{PlantedCorpus, PlantedCorpusSpec};
pub use scalar_adam::scalar_adam;
pub use windows::WindowCounts;
