//! Selection-vector queries over a term-by-document matrix.
//!
//! Every query is a matrix-vector product: `A·e_S` gives term frequencies
//! over a set S of documents, `Aᵀ·e_T` gives document counts over a set T of
//! terms. The functions take any [`LabeledMatrix`] with terms on the rows
//! and documents on the columns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{indicator, Label, LabeledMatrix, LabeledVector, MatrixError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("empty selection")]
    EmptySelection,
    #[error(transparent)]
    Matrix(MatrixError),
}

impl From<MatrixError> for QueryError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::UnknownLabel(l) => QueryError::UnknownLabel(l),
            other => QueryError::Matrix(other),
        }
    }
}

/// A labeled result vector plus a plain restatement of the query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub vector: LabeledVector,
    pub description: String,
}

#[derive(Serialize, Deserialize)]
struct QueryResultJson {
    labels: Vec<Label>,
    values: Vec<f64>,
    description: String,
}

impl Serialize for QueryResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QueryResultJson {
            labels: self.vector.labels().to_vec(),
            values: self.vector.values().to_vec(),
            description: self.description.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QueryResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = QueryResultJson::deserialize(d)?;
        Ok(QueryResult {
            vector: LabeledVector::new(j.labels, j.values).map_err(serde::de::Error::custom)?,
            description: j.description,
        })
    }
}

fn selection<S: AsRef<str>>(axis: &[Label], subset: &[S]) -> Result<LabeledVector, QueryError> {
    if subset.is_empty() {
        return Err(QueryError::EmptySelection);
    }
    Ok(indicator(axis, subset)?)
}

fn join<S: AsRef<str>>(subset: &[S]) -> String {
    subset.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(", ")
}

/// Term frequencies summed over the selected documents.
pub fn terms_for_docs<S: AsRef<str>>(a: &LabeledMatrix, docs: &[S]) -> Result<QueryResult, QueryError> {
    let e = selection(a.col_labels(), docs)?;
    Ok(QueryResult {
        vector: a.matvec(&e)?,
        description: format!("term frequencies in documents {{{}}}", join(docs)),
    })
}

/// Per-document counts summed over the selected terms.
pub fn docs_for_terms<S: AsRef<str>>(a: &LabeledMatrix, terms: &[S]) -> Result<QueryResult, QueryError> {
    let e = selection(a.row_labels(), terms)?;
    Ok(QueryResult {
        vector: a.transpose().matvec(&e)?,
        description: format!("document counts of terms {{{}}}", join(terms)),
    })
}

/// Term frequencies of `doc_a` minus those of `doc_b`.
pub fn doc_difference(a: &LabeledMatrix, doc_a: &str, doc_b: &str) -> Result<QueryResult, QueryError> {
    let ea = indicator(a.col_labels(), &[doc_a])?;
    let eb = indicator(a.col_labels(), &[doc_b])?;
    Ok(QueryResult {
        vector: a.matvec(&ea.sub(&eb)?)?,
        description: format!("term frequencies in {doc_a} minus {doc_b}"),
    })
}

/// Terms that occur in exactly one document, paired with that document.
pub fn exclusive_terms(a: &LabeledMatrix) -> Vec<(Label, Label)> {
    (0..a.nrows())
        .filter_map(|i| {
            let mut nonzero = a.row(i).iter().enumerate().filter(|(_, &v)| v != 0.0);
            match (nonzero.next(), nonzero.next()) {
                (Some((j, _)), None) => Some((a.row_labels()[i].clone(), a.col_labels()[j].clone())),
                _ => None,
            }
        })
        .collect()
}

/// Fraction of entries that are exactly zero.
pub fn sparsity(a: &LabeledMatrix) -> f64 {
    let zeros = a.as_slice().iter().filter(|&&v| v == 0.0).count();
    zeros as f64 / a.as_slice().len() as f64
}

/// One of the selection queries, as parsed from CLI flags or URL parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Docs(Vec<String>),
    Terms(Vec<String>),
    Diff(String, String),
}

impl Query {
    pub fn run(&self, a: &LabeledMatrix) -> Result<QueryResult, QueryError> {
        match self {
            Query::Docs(d) => terms_for_docs(a, d),
            Query::Terms(t) => docs_for_terms(a, t),
            Query::Diff(x, y) => doc_difference(a, x, y),
        }
    }
}

/// Split a comma-separated label list, dropping empty items.
pub fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn animals() -> LabeledMatrix {
        LabeledMatrix::from_rows(
            &["venom", "death", "danger", "survive", "madagascar"],
            &["Jellyfish", "Cobra", "Snail", "Octopus"],
            vec![
                vec![32.0, 44.0, 1.0, 18.0],
                vec![9.0, 3.0, 0.0, 2.0],
                vec![6.0, 4.0, 0.0, 4.0],
                vec![2.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 2.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn document_selections() {
        let a = animals();
        assert_eq!(terms_for_docs(&a, &["Jellyfish", "Snail"]).unwrap().vector.values(), &[33.0, 9.0, 6.0, 2.0, 2.0]);
        assert_eq!(terms_for_docs(&a, &["Snail"]).unwrap().vector.values(), &[1.0, 0.0, 0.0, 0.0, 2.0]);
        let all = terms_for_docs(&a, &["Jellyfish", "Cobra", "Snail", "Octopus"]).unwrap();
        assert_eq!(all.vector.values(), &[95.0, 14.0, 14.0, 3.0, 2.0]);
        assert_eq!(all.vector.labels()[0].as_str(), "venom");
    }

    #[test]
    fn term_selections() {
        let a = animals();
        assert_eq!(docs_for_terms(&a, &["danger"]).unwrap().vector.values(), &[6.0, 4.0, 0.0, 4.0]);
        assert_eq!(docs_for_terms(&a, &["madagascar"]).unwrap().vector.values(), &[0.0, 0.0, 2.0, 0.0]);
        assert_eq!(
            docs_for_terms(&a, &["danger", "madagascar"]).unwrap().vector.values(),
            &[6.0, 4.0, 2.0, 4.0]
        );
    }

    #[test]
    fn selection_errors() {
        let a = animals();
        let none: [&str; 0] = [];
        assert_eq!(terms_for_docs(&a, &none), Err(QueryError::EmptySelection));
        assert_eq!(docs_for_terms(&a, &none), Err(QueryError::EmptySelection));
        assert_eq!(terms_for_docs(&a, &["Shark"]), Err(QueryError::UnknownLabel("Shark".into())));
        assert_eq!(doc_difference(&a, "Shark", "Snail"), Err(QueryError::UnknownLabel("Shark".into())));
    }

    #[test]
    fn differences() {
        let a = animals();
        assert_eq!(doc_difference(&a, "Jellyfish", "Cobra").unwrap().vector.values(), &[-12.0, 6.0, 2.0, 2.0, 0.0]);
        assert_eq!(doc_difference(&a, "Snail", "Snail").unwrap().vector.values(), &[0.0; 5]);
        assert_eq!(doc_difference(&a, "Snail", "Octopus").unwrap().vector.values(), &[-17.0, -2.0, -4.0, -1.0, 2.0]);
    }

    #[test]
    fn exclusive_and_sparsity() {
        let a = animals();
        let ex = exclusive_terms(&a);
        assert_eq!(ex.len(), 1);
        assert_eq!((ex[0].0.as_str(), ex[0].1.as_str()), ("madagascar", "Snail"));
        assert_eq!(sparsity(&a), 7.0 / 20.0);
        let ones = a.map(|_| 1.0).unwrap();
        assert!(exclusive_terms(&ones).is_empty());
        assert_eq!(sparsity(&ones), 0.0);
        assert_eq!(sparsity(&a.map(|_| 0.0).unwrap()), 1.0);
    }

    #[test]
    fn result_json_shape() {
        let a = animals();
        let r = docs_for_terms(&a, &["madagascar"]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"labels":["Jellyfish","Cobra","Snail","Octopus"],"values":[0.0,0.0,2.0,0.0],"description":"document counts of terms {madagascar}"}"#
        );
    }
}
