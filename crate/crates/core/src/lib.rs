//! Core library for building term-by-document matrices from text, factoring
//! them with nonnegative matrix factorization and reading the factors back as
//! topics.
//!
//! The modules are layered bottom-up:
//!
//! * [`matrix`]: dense matrices and vectors with labeled axes.
//! * [`nmf`]: multiplicative-update NMF with restarts and convergence tracking.
//! * [`text`]: tokenizer, Porter stemmer, stop words and corpus building.
//! * [`query`]: selection-vector queries over a term-by-document matrix.
//! * [`topics`]: topic views: sorted term weights, loadings, rank-one terms.
//! * [`workspace`]: on-disk store of corpora and factorizations.
//! * [`report`]: the JSON payloads shared by the CLI and the HTTP service.

pub mod matrix;
pub mod nmf;
pub mod query;
pub mod report;
pub mod text;
pub mod topics;
pub mod workspace;

pub use matrix::{Label, LabeledMatrix, LabeledVector, MatrixError};
pub use nmf::{factorize, Factorization, NmfConfig, NmfError};
pub use query::{QueryError, QueryResult};
pub use text::{build_corpus, Corpus, Document, PipelineConfig, TextError};
pub use topics::{TopicError, TopicView};
