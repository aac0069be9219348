use alloc::string::String;
use core::fmt;

/// Errors produced by matrix kernels, graph builders, and the model.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Inner dimensions of a product (or other shape pair) do not line up.
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Symmetry check failed beyond the allowed tolerance.
    NotSymmetric { max_abs_diff: f64 },
    /// A non-negative matrix was required.
    NegativeEntry { row: usize, col: usize, value: f64 },
    /// A class label at or above the configured number of classes.
    LabelOutOfRange { label: usize, num_classes: usize },
    /// Training produced a non-finite loss at the given 1-based epoch.
    NonFiniteLoss { epoch: usize },
    /// Catch-all for violated preconditions; the message names the argument.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, left, right } => write!(
                f,
                "{op}: dimension mismatch, {}x{} against {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            Error::NotSymmetric { max_abs_diff } => write!(
                f,
                "matrix is not symmetric (max |A - A^T| = {max_abs_diff:e})"
            ),
            Error::NegativeEntry { row, col, value } => write!(
                f,
                "expected a non-negative matrix, found {value} at ({row}, {col})"
            ),
            Error::LabelOutOfRange { label, num_classes } => {
                write!(f, "label {label} out of range for {num_classes} classes")
            }
            Error::NonFiniteLoss { epoch } => {
                write!(f, "training diverged: non-finite loss at epoch {epoch}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
