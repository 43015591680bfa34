//! Raw text to term-by-document count matrix.
//!
//! Tokens are maximal runs of Unicode letters. Each token is down-cased,
//! checked against the stop-word list, stemmed, and checked again; the
//! survivors are counted per document. Terms whose corpus-wide total falls
//! below `min_total_count` are dropped. Rows come out sorted by descending
//! total, ties broken by term.

pub mod porter;
pub mod stopwords;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Label, LabeledMatrix, LabeledVector, MatrixError};

pub use porter::stem;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("duplicate document id {0:?}")]
    DuplicateDocumentId(String),
    #[error("no documents")]
    NoDocuments,
    #[error("no term survives filtering")]
    EmptyCorpus,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: Label,
    #[serde(default)]
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn new(id: &str, body: impl Into<String>) -> Result<Self, MatrixError> {
        Ok(Document {
            id: Label::new(id)?,
            title: id.to_string(),
            body: body.into(),
        })
    }
}

fn default_min_total_count() -> u64 {
    4
}

fn yes() -> bool {
    true
}

fn default_stopwords() -> BTreeSet<String> {
    stopwords::default_english()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_stopwords")]
    pub stopwords: BTreeSet<String>,
    #[serde(default = "default_min_total_count")]
    pub min_total_count: u64,
    #[serde(default = "yes")]
    pub stem: bool,
    #[serde(default = "yes")]
    pub lowercase: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stopwords: default_stopwords(),
            min_total_count: default_min_total_count(),
            stem: true,
            lowercase: true,
        }
    }
}

impl PipelineConfig {
    /// No stop words, no stemming, no count threshold.
    pub fn raw() -> Self {
        PipelineConfig {
            stopwords: BTreeSet::new(),
            min_total_count: 0,
            stem: false,
            lowercase: true,
        }
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    pub fn with_min_total_count(mut self, n: u64) -> Self {
        self.min_total_count = n;
        self
    }

    pub fn with_stem(mut self, stem: bool) -> Self {
        self.stem = stem;
        self
    }
}

/// Documents plus the term-by-document count matrix built from them.
///
/// A corpus may also wrap a hand-entered matrix, in which case `documents`
/// is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub config: PipelineConfig,
    pub matrix: LabeledMatrix,
    pub vocabulary: Vec<Label>,
}

impl Corpus {
    pub fn from_matrix(matrix: LabeledMatrix) -> Self {
        Corpus {
            documents: Vec::new(),
            config: PipelineConfig::default(),
            vocabulary: matrix.row_labels().to_vec(),
            matrix,
        }
    }

    pub fn n_terms(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_docs(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Maximal runs of Unicode letters, down-cased when `config.lowercase`.
pub fn tokenize(text: &str, config: &PipelineConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(|t| if config.lowercase { t.to_lowercase() } else { t.to_string() })
        .collect()
}

/// The surviving terms of one document, in order, before count filtering.
fn terms(text: &str, config: &PipelineConfig) -> Vec<String> {
    tokenize(text, config)
        .into_iter()
        .filter(|t| !config.stopwords.contains(&t.to_lowercase()))
        .map(|t| if config.stem { stem(&t) } else { t })
        .filter(|t| !config.stopwords.contains(&t.to_lowercase()))
        .collect()
}

/// Corpus-wide counts of every term after stop-word removal and stemming,
/// before the `min_total_count` threshold; sorted like corpus rows.
pub fn tally(documents: &[Document], config: &PipelineConfig) -> Vec<(String, u64)> {
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    for doc in documents {
        for t in terms(&doc.body, config) {
            *totals.entry(t).or_default() += 1;
        }
    }
    let mut out: Vec<(String, u64)> = totals.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn build_corpus(documents: Vec<Document>, config: PipelineConfig) -> Result<Corpus, TextError> {
    if documents.is_empty() {
        return Err(TextError::NoDocuments);
    }
    let mut seen = HashSet::new();
    for d in &documents {
        if !seen.insert(d.id.as_str()) {
            return Err(TextError::DuplicateDocumentId(d.id.to_string()));
        }
    }

    let per_doc: Vec<BTreeMap<String, u64>> = documents
        .iter()
        .map(|d| {
            let mut counts = BTreeMap::new();
            for t in terms(&d.body, &config) {
                *counts.entry(t).or_insert(0u64) += 1;
            }
            counts
        })
        .collect();

    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for counts in &per_doc {
        for (t, c) in counts {
            *totals.entry(t.as_str()).or_default() += c;
        }
    }
    let mut vocab: Vec<(&str, u64)> = totals
        .into_iter()
        .filter(|&(_, total)| total > 0 && total >= config.min_total_count)
        .collect();
    if vocab.is_empty() {
        return Err(TextError::EmptyCorpus);
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let m = documents.len();
    let mut values = Vec::with_capacity(vocab.len() * m);
    for (term, _) in &vocab {
        for counts in &per_doc {
            values.push(counts.get(*term).copied().unwrap_or(0) as f64);
        }
    }
    let vocabulary = vocab
        .iter()
        .map(|(t, _)| Label::new(t))
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = LabeledMatrix::from_flat(
        vocabulary.clone(),
        documents.iter().map(|d| d.id.clone()).collect(),
        values,
    )?;
    Ok(Corpus {
        documents,
        config,
        matrix,
        vocabulary,
    })
}

/// Row sums of the corpus matrix, sorted descending (ties by term).
pub fn term_totals(corpus: &Corpus) -> LabeledVector {
    corpus.matrix.row_sums().sorted_descending()
}

/// Load documents from a directory of `.txt` files (file stem = id) or from
/// a JSON file holding `[{"id", "title", "body"}]`.
pub fn load_documents(path: &Path) -> Result<Vec<Document>, TextError> {
    let display = path.display().to_string();
    let io = |source| TextError::Io {
        path: display.clone(),
        source,
    };
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(TextError::NoDocuments);
        }
        files
            .iter()
            .map(|p| {
                let body = fs::read_to_string(p).map_err(|source| TextError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                Ok(Document::new(id, body)?)
            })
            .collect()
    } else {
        let text = fs::read_to_string(path).map_err(io)?;
        let docs: Vec<Document> = serde_json::from_str(&text).map_err(|e| TextError::Parse {
            path: display.clone(),
            message: e.to_string(),
        })?;
        Ok(docs
            .into_iter()
            .map(|mut d| {
                if d.title.is_empty() {
                    d.title = d.id.to_string();
                }
                d
            })
            .collect())
    }
}

/// Read a stop-word file.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>, TextError> {
    let text = fs::read_to_string(path).map_err(|source| TextError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(stopwords::parse(&text))
}
