//! Reading a factorization as topics.
//!
//! Topic `g` is column `g` of W (term weights) together with row `g` of H
//! (document loadings). Topics are addressed by zero-based index in the API
//! and by one-based index or current name on the CLI/HTTP surface (see
//! [`TopicView::resolve`]). Names are chosen by the user; nothing here
//! guesses them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{Label, LabeledMatrix, MatrixError};
use crate::nmf::Factorization;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopicError {
    #[error("unknown topic {0:?}")]
    UnknownTopic(String),
    #[error("unknown document {0:?}")]
    UnknownDocument(String),
    #[error("k = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("topic name {0:?} is already in use")]
    DuplicateName(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn check_topic(f: &Factorization, topic: usize) -> Result<(), TopicError> {
    if topic >= f.rank() {
        return Err(TopicError::UnknownTopic((topic + 1).to_string()));
    }
    Ok(())
}

/// The `k` largest weights of W's column `topic`, descending, ties by term.
pub fn top_terms(f: &Factorization, topic: usize, k: usize) -> Result<Vec<(Label, f64)>, TopicError> {
    check_topic(f, topic)?;
    let n = f.w.nrows();
    if k == 0 || k > n {
        return Err(TopicError::KOutOfRange { k, max: n });
    }
    let mut col: Vec<(Label, f64)> = f
        .w
        .row_labels()
        .iter()
        .cloned()
        .zip(f.w.column(topic))
        .collect();
    col.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    col.truncate(k);
    Ok(col)
}

/// Outer product of W's column `topic` with H's row `topic`.
pub fn rank_one_term(f: &Factorization, topic: usize) -> Result<LabeledMatrix, TopicError> {
    check_topic(f, topic)?;
    let wcol = f.w.column(topic);
    let hrow = f.h.row(topic);
    let values = wcol
        .iter()
        .map(|&a| hrow.iter().map(|&b| a * b).collect())
        .collect();
    Ok(LabeledMatrix::new(
        f.w.row_labels().to_vec(),
        f.h.col_labels().to_vec(),
        values,
    )?)
}

/// The approximation WH.
pub fn reconstruct(f: &Factorization) -> LabeledMatrix {
    f.reconstruction()
}

/// A factorization plus user-assigned topic names.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicView {
    factorization: Factorization,
    names: Vec<Label>,
}

impl TopicView {
    /// Default names are the topic labels of W (`topic-1 .. topic-r`).
    pub fn new(factorization: Factorization) -> Self {
        let names = factorization.w.col_labels().to_vec();
        TopicView {
            factorization,
            names,
        }
    }

    /// Restore a view with previously assigned names.
    pub fn with_names(factorization: Factorization, names: Vec<Label>) -> Result<Self, TopicError> {
        if names.len() != factorization.rank() {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} topic names", factorization.rank()),
                actual: format!("{}", names.len()),
            }
            .into());
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(TopicError::DuplicateName(dup.to_string()));
        }
        Ok(TopicView {
            factorization,
            names,
        })
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn names(&self) -> &[Label] {
        &self.names
    }

    /// Find a topic by one-based index or by current name.
    pub fn resolve(&self, topic: &str) -> Result<usize, TopicError> {
        if let Some(g) = self.names.iter().position(|n| n.as_str() == topic) {
            return Ok(g);
        }
        match topic.trim().parse::<usize>() {
            Ok(g) if g >= 1 && g <= self.names.len() => Ok(g - 1),
            _ => Err(TopicError::UnknownTopic(topic.to_string())),
        }
    }

    /// Rename topic `topic` (zero-based).
    pub fn name_topic(&self, topic: usize, name: &str) -> Result<TopicView, TopicError> {
        check_topic(&self.factorization, topic)?;
        let label = Label::new(name)?;
        if self
            .names
            .iter()
            .enumerate()
            .any(|(g, n)| g != topic && *n == label)
        {
            return Err(TopicError::DuplicateName(label.into_string()));
        }
        let mut view = self.clone();
        view.names[topic] = label;
        Ok(view)
    }

    pub fn top_terms(&self, topic: usize, k: usize) -> Result<Vec<(Label, f64)>, TopicError> {
        top_terms(&self.factorization, topic, k)
    }

    /// H with rows relabeled by topic name.
    pub fn loadings(&self) -> LabeledMatrix {
        self.factorization
            .h
            .relabel(self.names.clone(), self.factorization.h.col_labels().to_vec())
            .expect("names are unique and match the rank")
    }

    /// H column for one document, labeled by topic name.
    pub fn loadings_for(&self, document: &str) -> Result<Vec<(Label, f64)>, TopicError> {
        let h = &self.factorization.h;
        let j = h
            .col_index(document)
            .ok_or_else(|| TopicError::UnknownDocument(document.to_string()))?;
        Ok(self.names.iter().cloned().zip(h.column(j)).collect())
    }

    pub fn rank_one_term(&self, topic: usize) -> Result<LabeledMatrix, TopicError> {
        rank_one_term(&self.factorization, topic)
    }

    /// Topic report with up to `k` terms per topic (clamped to the vocabulary size).
    pub fn report(&self, k: usize) -> Result<TopicReport, TopicError> {
        let n = self.factorization.w.nrows();
        if k == 0 {
            return Err(TopicError::KOutOfRange { k, max: n });
        }
        let k = k.min(n);
        let topics = (0..self.names.len())
            .map(|g| {
                Ok(TopicEntry {
                    name: self.names[g].clone(),
                    top_terms: self.top_terms(g, k)?,
                })
            })
            .collect::<Result<_, TopicError>>()?;
        Ok(TopicReport {
            topics,
            loadings: self.loadings(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEntry {
    pub name: Label,
    pub top_terms: Vec<(Label, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub topics: Vec<TopicEntry>,
    pub loadings: LabeledMatrix,
}

/// Plain-text rendering: topics side by side as `term  weight` columns,
/// then the loadings table. Loadings below `threshold` print as 0.
pub fn render_text(report: &TopicReport, threshold: Option<f64>) -> String {
    let mut out = String::new();
    let cells: Vec<Vec<(String, String)>> = report
        .topics
        .iter()
        .map(|t| {
            t.top_terms
                .iter()
                .map(|(term, w)| (term.to_string(), format!("{w:.3}")))
                .collect()
        })
        .collect();
    let widths: Vec<(usize, usize)> = report
        .topics
        .iter()
        .zip(&cells)
        .map(|(t, c)| {
            let tw = c.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
            let ww = c.iter().map(|(_, b)| b.len()).max().unwrap_or(0);
            let name = t.name.as_str().chars().count();
            (tw.max(name.saturating_sub(ww + 2)), ww)
        })
        .collect();

    let header: Vec<String> = report
        .topics
        .iter()
        .zip(&widths)
        .map(|(t, (tw, ww))| format!("{:<width$}", t.name, width = tw + 2 + ww))
        .collect();
    let _ = writeln!(out, "{}", header.join("    ").trim_end());
    let rule: Vec<String> = widths.iter().map(|(tw, ww)| "-".repeat(tw + 2 + ww)).collect();
    let _ = writeln!(out, "{}", rule.join("    "));
    let rows = cells.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..rows {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, (tw, ww))| match c.get(i) {
                Some((term, w)) => format!("{term:<tw$}  {w:>ww$}"),
                None => " ".repeat(tw + 2 + ww),
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("    ").trim_end());
    }

    let l = &report.loadings;
    out.push('\n');
    let name_w = l.row_labels().iter().map(|r| r.as_str().chars().count()).max().unwrap_or(0);
    let col_w: Vec<usize> = l
        .col_labels()
        .iter()
        .map(|c| c.as_str().chars().count().max(7))
        .collect();
    let mut line = " ".repeat(name_w);
    for (c, w) in l.col_labels().iter().zip(&col_w) {
        let _ = write!(line, "  {:>w$}", c.as_str());
    }
    let _ = writeln!(out, "{line}");
    for (i, r) in l.row_labels().iter().enumerate() {
        let mut line = format!("{:<name_w$}", r.as_str());
        for (j, w) in col_w.iter().enumerate() {
            let mut v = l.get(i, j);
            if threshold.is_some_and(|t| v < t) {
                v = 0.0;
            }
            let _ = write!(line, "  {v:>w$.3}");
        }
        let _ = writeln!(out, "{line}");
    }
    out
}
