//! Document-side factorization of the linear (identity-activation) forward
//! map.
//!
//! With the activation removed and normalization disabled, the word-side
//! computation `X_hat (X^T X)^n W0` regroups by associativity into
//! `(X_hat X^T) (X X^T)^{n-1} (X W0)`, and the citation variant
//! `X_hat (X^T A^k X) W0` into `(X_hat X^T) A^k (X W0)`. This module
//! computes the document-side route; tests hold it against the word-side
//! route, so the two stay independent checks of the same map.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::{sp_sp_mm, spmm, SparseMatrix};

/// Which factorization to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum LinearizedMode<'a> {
    /// Gram chain of the given propagation order (must be at least 1).
    Gram { order: usize },
    /// Citation chain through the (already normalized) document graph.
    Citation {
        normalized_citation: &'a SparseMatrix,
        order: usize,
    },
}

/// Document representations computed document-side: similarity of the input
/// batch to the training documents, propagated among training documents,
/// then projected through `X W0`. Gram matrices are unnormalized.
pub fn linearized_document_forward(
    x_hat: &SparseMatrix,
    x_train: &SparseMatrix,
    w0: &DenseMatrix,
    mode: LinearizedMode<'_>,
) -> Result<DenseMatrix> {
    if x_hat.cols() != x_train.cols() {
        return Err(Error::DimensionMismatch {
            op: "linearized_document_forward",
            left: (x_hat.rows(), x_hat.cols()),
            right: (x_train.rows(), x_train.cols()),
        });
    }
    let xt = x_train.transpose();
    let mut doc_chain = sp_sp_mm(x_hat, &xt)?;
    match mode {
        LinearizedMode::Gram { order } => {
            if order == 0 {
                return Err(Error::InvalidArgument(
                    "gram mode needs a propagation order of at least 1".into(),
                ));
            }
            let doc_gram = sp_sp_mm(x_train, &xt)?;
            for _ in 1..order {
                doc_chain = sp_sp_mm(&doc_chain, &doc_gram)?;
            }
        }
        LinearizedMode::Citation {
            normalized_citation,
            order,
        } => {
            if normalized_citation.rows() != x_train.rows() {
                return Err(Error::DimensionMismatch {
                    op: "linearized_document_forward",
                    left: (normalized_citation.rows(), normalized_citation.cols()),
                    right: (x_train.rows(), x_train.cols()),
                });
            }
            for _ in 0..order {
                doc_chain = sp_sp_mm(&doc_chain, normalized_citation)?;
            }
        }
    }
    let projected = spmm(x_train, w0)?;
    spmm(&doc_chain, &projected)
}
