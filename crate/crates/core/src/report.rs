//! JSON payloads shared by the CLI and the HTTP service.
//!
//! Both front ends serialize through [`to_json`], so a CLI `--json` run and
//! the matching HTTP response carry the same bytes.

use serde::{Deserialize, Serialize};

use crate::matrix::Label;
use crate::nmf::Factorization;
use crate::text::{term_totals, Corpus};

/// Compact JSON.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("payload types always serialize")
}

/// Number of term totals listed in a corpus summary.
pub const SUMMARY_TOP_TERMS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub corpus_id: String,
    pub n_terms: usize,
    pub n_docs: usize,
    pub top_terms: Vec<(Label, f64)>,
}

impl CorpusSummary {
    pub fn new(id: impl Into<String>, corpus: &Corpus) -> Self {
        let totals = term_totals(corpus);
        CorpusSummary {
            corpus_id: id.into(),
            n_terms: corpus.n_terms(),
            n_docs: corpus.n_docs(),
            top_terms: totals
                .iter()
                .take(SUMMARY_TOP_TERMS)
                .map(|(l, v)| (l.clone(), v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSummary {
    pub factorization_id: String,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FactorizationSummary {
    pub fn new(id: impl Into<String>, f: &Factorization) -> Self {
        FactorizationSummary {
            factorization_id: id.into(),
            residual: f.final_error(),
            iterations: f.iterations,
            converged: f.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCurve {
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusiveTerm {
    pub term: Label,
    pub document: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sparsity {
    pub sparsity: f64,
}

/// Error body of every failed HTTP response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

/// Body of a corpus-creation request: either documents run through the
/// text pipeline, or a ready-made term-by-document matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub documents: Option<Vec<crate::text::Document>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<crate::text::PipelineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<crate::matrix::LabeledMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenameRequest {
    pub name: String,
}

pub fn exclusive_terms(matrix: &crate::matrix::LabeledMatrix) -> Vec<ExclusiveTerm> {
    crate::query::exclusive_terms(matrix)
        .into_iter()
        .map(|(term, document)| ExclusiveTerm { term, document })
        .collect()
}
