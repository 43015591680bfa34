//! Dense real matrices whose rows and columns carry unique string labels.
//!
//! A [`LabeledMatrix`] is immutable once built. Every operation returns a new
//! value, so matrices can be shared freely between threads.
//!
//! Binary operations check labels, not just shapes: multiplying a
//! terms × documents matrix by a vector indexed by topics is rejected with
//! [`MatrixError::LabelMismatch`] even when the lengths happen to agree. Use
//! [`LabeledMatrix::relabel`] when positional coercion is really intended.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which axis of a matrix an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Rows => f.write_str("row"),
            Axis::Cols => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("label is empty")]
    EmptyLabel,
    #[error("duplicate {axis} label {label:?}")]
    DuplicateLabel { axis: Axis, label: String },
    #[error("{axis} axis has no labels")]
    EmptyAxis { axis: Axis },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("not a permutation of the {axis} labels")]
    NotAPermutation { axis: Axis },
    #[error("division by zero at ({row}, {col})")]
    DivisionByZero { row: usize, col: usize },
    #[error("csv: {0}")]
    Csv(String),
}

/// A nonempty, whitespace-trimmed row or column name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl AsRef<str>) -> Result<Self, MatrixError> {
        let trimmed = text.as_ref().trim();
        if trimmed.is_empty() {
            return Err(MatrixError::EmptyLabel);
        }
        Ok(Label(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::new(s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Build labels from plain strings, rejecting empty ones.
pub fn labels<I, S>(items: I) -> Result<Vec<Label>, MatrixError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items.into_iter().map(Label::new).collect()
}

fn check_unique(labels: &[Label], axis: Axis) -> Result<(), MatrixError> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(MatrixError::DuplicateLabel {
                axis,
                label: l.0.clone(),
            });
        }
    }
    Ok(())
}

fn index_of(labels: &[Label], name: &str) -> Option<usize> {
    labels.iter().position(|l| l.as_str() == name)
}

/// A dense vector indexed by labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    labels: Vec<Label>,
    values: Vec<f64>,
}

impl LabeledVector {
    pub fn new(labels: Vec<Label>, values: Vec<f64>) -> Result<Self, MatrixError> {
        if labels.len() != values.len() {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} values", labels.len()),
                actual: format!("{} values", values.len()),
            });
        }
        check_unique(&labels, Axis::Rows)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFiniteEntry { row: i, col: 0 });
        }
        Ok(LabeledVector { labels, values })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        index_of(&self.labels, label).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, f64)> {
        self.labels.iter().zip(self.values.iter().copied())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, MatrixError> {
        if self.labels != other.labels {
            return Err(MatrixError::LabelMismatch(
                "vector labels differ".to_string(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(LabeledVector {
            labels: self.labels.clone(),
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Reorder entries by descending value; ties keep lexicographic label order.
    pub fn sorted_descending(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.values[b]
                .total_cmp(&self.values[a])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });
        LabeledVector {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Vector with 1.0 at the selected labels and 0.0 elsewhere.
pub fn indicator<S: AsRef<str>>(
    labels: &[Label],
    selected: &[S],
) -> Result<LabeledVector, MatrixError> {
    let mut values = vec![0.0; labels.len()];
    for s in selected {
        let i = index_of(labels, s.as_ref())
            .ok_or_else(|| MatrixError::UnknownLabel(s.as_ref().to_string()))?;
        values[i] = 1.0;
    }
    LabeledVector::new(labels.to_vec(), values)
}

/// Dense row-major matrix with labeled rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
    values: Vec<f64>,
}

impl LabeledMatrix {
    /// Build a matrix from row-major nested values.
    pub fn new(
        row_labels: Vec<Label>,
        col_labels: Vec<Label>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, MatrixError> {
        if values.len() != row_labels.len() {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows", row_labels.len()),
                actual: format!("{} rows", values.len()),
            });
        }
        let ncols = col_labels.len();
        let mut flat = Vec::with_capacity(row_labels.len() * ncols);
        for (i, row) in values.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(MatrixError::DimensionMismatch {
                    expected: format!("{ncols} columns"),
                    actual: format!("{} columns in row {i}", row.len()),
                });
            }
            flat.extend(row);
        }
        Self::from_flat(row_labels, col_labels, flat)
    }

    /// Build a matrix from row-major flat storage.
    pub fn from_flat(
        row_labels: Vec<Label>,
        col_labels: Vec<Label>,
        values: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        if row_labels.is_empty() {
            return Err(MatrixError::EmptyAxis { axis: Axis::Rows });
        }
        if col_labels.is_empty() {
            return Err(MatrixError::EmptyAxis { axis: Axis::Cols });
        }
        check_unique(&row_labels, Axis::Rows)?;
        check_unique(&col_labels, Axis::Cols)?;
        let ncols = col_labels.len();
        if values.len() != row_labels.len() * ncols {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} entries", row_labels.len() * ncols),
                actual: format!("{} entries", values.len()),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFiniteEntry {
                row: k / ncols,
                col: k % ncols,
            });
        }
        Ok(LabeledMatrix {
            row_labels,
            col_labels,
            values,
        })
    }

    /// Convenience constructor from string labels.
    pub fn from_rows<R, C>(rows: &[R], cols: &[C], values: Vec<Vec<f64>>) -> Result<Self, MatrixError>
    where
        R: AsRef<str>,
        C: AsRef<str>,
    {
        Self::new(labels(rows)?, labels(cols)?, values)
    }

    pub fn filled(row_labels: Vec<Label>, col_labels: Vec<Label>, value: f64) -> Result<Self, MatrixError> {
        let n = row_labels.len() * col_labels.len();
        Self::from_flat(row_labels, col_labels, vec![value; n])
    }

    /// Square identity matrix with the given labels on both axes.
    pub fn identity(labels: Vec<Label>) -> Result<Self, MatrixError> {
        let n = labels.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        Self::from_flat(labels.clone(), labels, values)
    }

    pub fn nrows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    /// Row-major flat entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ncols() + j]
    }

    pub fn get_by_label(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.row_index(row)?;
        let j = self.col_index(col)?;
        Some(self.get(i, j))
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        index_of(&self.row_labels, label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        index_of(&self.col_labels, label)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ncols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Replace the labels while keeping entries positionally.
    pub fn relabel(&self, row_labels: Vec<Label>, col_labels: Vec<Label>) -> Result<Self, MatrixError> {
        Self::from_flat(row_labels, col_labels, self.values.clone())
    }

    /// Entries mapped through `f`, labels unchanged.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, MatrixError> {
        Self::from_flat(
            self.row_labels.clone(),
            self.col_labels.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn matvec(&self, v: &LabeledVector) -> Result<LabeledVector, MatrixError> {
        if v.labels() != self.col_labels.as_slice() {
            return Err(MatrixError::LabelMismatch(
                "vector labels must equal the matrix column labels".to_string(),
            ));
        }
        let values = (0..self.nrows())
            .map(|i| self.row(i).iter().zip(v.values()).map(|(a, b)| a * b).sum())
            .collect();
        LabeledVector::new(self.row_labels.clone(), values)
    }

    pub fn transpose(&self) -> Self {
        let (n, m) = self.shape();
        let mut values = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                values[j * n + i] = self.values[i * m + j];
            }
        }
        LabeledMatrix {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            values,
        }
    }

    /// Matrix product. The inner labels must agree as ordered lists.
    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.ncols() != other.nrows() {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows on the right", self.ncols()),
                actual: format!("{} rows", other.nrows()),
            });
        }
        if self.col_labels != other.row_labels {
            return Err(MatrixError::LabelMismatch(
                "left column labels must equal right row labels".to_string(),
            ));
        }
        let values = dense::matmul(&self.values, &other.values, self.nrows(), self.ncols(), other.ncols());
        Self::from_flat(self.row_labels.clone(), other.col_labels.clone(), values)
    }

    fn check_same_axes(&self, other: &Self) -> Result<(), MatrixError> {
        if self.shape() != other.shape() {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{}x{}", self.nrows(), self.ncols()),
                actual: format!("{}x{}", other.nrows(), other.ncols()),
            });
        }
        if self.row_labels != other.row_labels || self.col_labels != other.col_labels {
            return Err(MatrixError::LabelMismatch(
                "elementwise operands must share labels".to_string(),
            ));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, MatrixError> {
        self.check_same_axes(other)?;
        Self::from_flat(
            self.row_labels.clone(),
            self.col_labels.clone(),
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn subtract(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Result<Self, MatrixError> {
        self.map(|v| v * factor)
    }

    pub fn hadamard_mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Elementwise division; any zero denominator is an error.
    pub fn hadamard_div(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_axes(other)?;
        let m = self.ncols();
        if let Some(k) = other.values.iter().position(|&b| b == 0.0) {
            return Err(MatrixError::DivisionByZero { row: k / m, col: k % m });
        }
        self.zip_with(other, |a, b| a / b)
    }

    /// Elementwise division with `epsilon` added to every denominator.
    pub fn hadamard_div_eps(&self, other: &Self, epsilon: f64) -> Result<Self, MatrixError> {
        self.zip_with(other, |a, b| a / (b + epsilon))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dense::frobenius(&self.values)
    }

    /// Row sums, labeled by rows.
    pub fn row_sums(&self) -> LabeledVector {
        let values = (0..self.nrows()).map(|i| self.row(i).iter().sum()).collect();
        LabeledVector {
            labels: self.row_labels.clone(),
            values,
        }
    }

    /// Reorder rows and columns by label; data travels with its labels.
    pub fn permute<R: AsRef<str>, C: AsRef<str>>(
        &self,
        row_order: &[R],
        col_order: &[C],
    ) -> Result<Self, MatrixError> {
        let rows = permutation(&self.row_labels, row_order, Axis::Rows)?;
        let cols = permutation(&self.col_labels, col_order, Axis::Cols)?;
        Ok(self.select(&rows, &cols))
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                values.push(self.get(i, j));
            }
        }
        LabeledMatrix {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j].clone()).collect(),
            values,
        }
    }

    /// True when both matrices carry the same label sets and agree entrywise
    /// within `tol` once `other` is aligned to this matrix's label order.
    pub fn label_aligned_equal(&self, other: &Self, tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let Ok(aligned) = other.permute(&self.row_labels, &self.col_labels) else {
            return false;
        };
        self.values
            .iter()
            .zip(&aligned.values)
            .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Write the CSV form: header row of an empty cell then column labels,
    /// then one row per row label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), MatrixError> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| MatrixError::Csv(e.to_string());
        let mut header = vec![String::new()];
        header.extend(self.col_labels.iter().map(|l| l.0.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for (i, label) in self.row_labels.iter().enumerate() {
            let mut record = vec![label.0.clone()];
            record.extend(self.row(i).iter().map(|v| format_number(*v)));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| MatrixError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, MatrixError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(input);
        let csv_err = |e: csv::Error| MatrixError::Csv(e.to_string());
        let mut records = r.records();
        let header = records
            .next()
            .ok_or_else(|| MatrixError::Csv("missing header row".to_string()))?
            .map_err(csv_err)?;
        let cols = labels(header.iter().skip(1))?;
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for record in records {
            let record = record.map_err(csv_err)?;
            let mut fields = record.iter();
            let label = fields.next().unwrap_or_default();
            rows.push(Label::new(label)?);
            let row: Vec<f64> = fields
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| MatrixError::Csv(format!("bad number {f:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            values.push(row);
        }
        Self::new(rows, cols, values)
    }
}

fn format_number(v: f64) -> String {
    // `{}` on f64 is the shortest representation that round-trips.
    format!("{v}")
}

fn permutation<S: AsRef<str>>(labels: &[Label], order: &[S], axis: Axis) -> Result<Vec<usize>, MatrixError> {
    if order.len() != labels.len() {
        return Err(MatrixError::NotAPermutation { axis });
    }
    let lookup: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut used = vec![false; labels.len()];
    let mut idx = Vec::with_capacity(order.len());
    for name in order {
        let name = name.as_ref();
        let &i = lookup
            .get(name)
            .ok_or_else(|| MatrixError::UnknownLabel(name.to_string()))?;
        if used[i] {
            return Err(MatrixError::NotAPermutation { axis });
        }
        used[i] = true;
        idx.push(i);
    }
    Ok(idx)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: Vec<Label>,
    cols: Vec<Label>,
    values: Vec<Vec<f64>>,
}

impl Serialize for LabeledMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.row_labels.clone(),
            cols: self.col_labels.clone(),
            values: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        LabeledMatrix::new(j.rows, j.cols, j.values).map_err(serde::de::Error::custom)
    }
}

/// Unlabeled row-major kernels shared by the matrix type and the solver.
pub(crate) mod dense {
    /// `a` is n×k, `b` is k×m.
    pub fn matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let aip = a[i * k + p];
                if aip == 0.0 {
                    continue;
                }
                let b_row = &b[p * m..(p + 1) * m];
                for (o, &bv) in out_row.iter_mut().zip(b_row) {
                    *o += aip * bv;
                }
            }
        }
        out
    }

    /// aᵀ·b where `a` is k×n and `b` is k×m; result n×m.
    pub fn matmul_tn(a: &[f64], b: &[f64], k: usize, n: usize, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * m];
        for p in 0..k {
            let b_row = &b[p * m..(p + 1) * m];
            for i in 0..n {
                let api = a[p * n + i];
                if api == 0.0 {
                    continue;
                }
                let out_row = &mut out[i * m..(i + 1) * m];
                for (o, &bv) in out_row.iter_mut().zip(b_row) {
                    *o += api * bv;
                }
            }
        }
        out
    }

    /// a·bᵀ where `a` is n×k and `b` is m×k; result n×m.
    pub fn matmul_nt(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let a_row = &a[i * k..(i + 1) * k];
            for j in 0..m {
                let b_row = &b[j * k..(j + 1) * k];
                out[i * m + j] = a_row.iter().zip(b_row).map(|(x, y)| x * y).sum();
            }
        }
        out
    }

    pub fn frobenius(values: &[f64]) -> f64 {
        values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// ‖a − b‖_F for equally sized buffers.
    pub fn frobenius_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
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
    fn new_matrix_stores_entries() {
        let a = animals();
        assert_eq!(a.shape(), (5, 4));
        assert_eq!(a.row(0), &[32.0, 44.0, 1.0, 18.0]);
        assert_eq!(a.get_by_label("madagascar", "Snail"), Some(2.0));
    }

    #[test]
    fn one_by_one_zero_is_valid() {
        let m = LabeledMatrix::from_rows(&["r"], &["c"], vec![vec![0.0]]).unwrap();
        assert_eq!(m.frobenius_norm(), 0.0);
    }

    #[test]
    fn rejects_duplicates_shape_and_nan() {
        let dup = LabeledMatrix::from_rows(&["x", "x"], &["c"], vec![vec![1.0], vec![2.0]]);
        assert!(matches!(dup, Err(MatrixError::DuplicateLabel { axis: Axis::Rows, .. })));
        let shape = LabeledMatrix::from_rows(&["a"], &["b", "c"], vec![vec![1.0]]);
        assert!(matches!(shape, Err(MatrixError::DimensionMismatch { .. })));
        let nan = LabeledMatrix::from_rows(&["a"], &["b"], vec![vec![f64::NAN]]);
        assert!(matches!(nan, Err(MatrixError::NonFiniteEntry { row: 0, col: 0 })));
        assert_eq!(Label::new("   "), Err(MatrixError::EmptyLabel));
    }

    #[test]
    fn indicator_vectors() {
        let a = animals();
        let e = indicator(a.col_labels(), &["Jellyfish"]).unwrap();
        assert_eq!(e.values(), &[1.0, 0.0, 0.0, 0.0]);
        let none: [&str; 0] = [];
        assert_eq!(indicator(a.col_labels(), &none).unwrap().values(), &[0.0; 4]);
        let two = indicator(a.col_labels(), &["Jellyfish", "Snail"]).unwrap();
        assert_eq!(two.values(), &[1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            indicator(a.col_labels(), &["Shark"]),
            Err(MatrixError::UnknownLabel(_))
        ));
    }

    #[test]
    fn matvec_and_transpose() {
        let a = animals();
        let e1 = indicator(a.col_labels(), &["Jellyfish"]).unwrap();
        assert_eq!(a.matvec(&e1).unwrap().values(), &[32.0, 9.0, 6.0, 2.0, 0.0]);
        let all = indicator(a.col_labels(), &["Jellyfish", "Cobra", "Snail", "Octopus"]).unwrap();
        assert_eq!(a.matvec(&all).unwrap().values(), &[95.0, 14.0, 14.0, 3.0, 2.0]);
        let zero = LabeledVector::new(a.col_labels().to_vec(), vec![0.0; 4]).unwrap();
        assert_eq!(a.matvec(&zero).unwrap().values(), &[0.0; 5]);
        let wrong = LabeledVector::new(a.row_labels().to_vec(), vec![0.0; 5]).unwrap();
        assert!(matches!(a.matvec(&wrong), Err(MatrixError::LabelMismatch(_))));

        let t = a.transpose();
        assert_eq!(t.shape(), (4, 5));
        assert_eq!(t.row(0), &[32.0, 9.0, 6.0, 2.0, 0.0]);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn matmul_checks_inner_labels() {
        let a = LabeledMatrix::from_rows(&["r"], &["x", "y"], vec![vec![1.0, 2.0]]).unwrap();
        let b = LabeledMatrix::from_rows(&["y", "x"], &["c"], vec![vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(a.matmul(&b), Err(MatrixError::LabelMismatch(_))));
        let c = LabeledMatrix::from_rows(&["x"], &["c"], vec![vec![1.0]]).unwrap();
        assert!(matches!(a.matmul(&c), Err(MatrixError::DimensionMismatch { .. })));
        let id = LabeledMatrix::identity(a.col_labels().to_vec()).unwrap();
        assert_eq!(a.matmul(&id).unwrap(), a);
    }

    #[test]
    fn elementwise_ops() {
        let a = animals();
        let z = a.subtract(&a).unwrap();
        assert!(z.as_slice().iter().all(|&v| v == 0.0));
        let m = LabeledMatrix::from_rows(&["a", "b"], &["c", "d"], vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let ones = m.map(|_| 1.0).unwrap();
        assert_eq!(ones.hadamard_mul(&m).unwrap(), m);
        let x = LabeledMatrix::from_rows(&["r"], &["a", "b"], vec![vec![2.0, 4.0]]).unwrap();
        let y = LabeledMatrix::from_rows(&["r"], &["a", "b"], vec![vec![2.0, 2.0]]).unwrap();
        assert_eq!(x.hadamard_div(&y).unwrap().row(0), &[1.0, 2.0]);
        let zero = y.map(|_| 0.0).unwrap();
        assert!(matches!(x.hadamard_div(&zero), Err(MatrixError::DivisionByZero { .. })));
        assert_eq!(x.hadamard_div_eps(&zero, 1.0).unwrap().row(0), &[2.0, 4.0]);
        assert_eq!(x.scale(0.5).unwrap().row(0), &[1.0, 2.0]);
        assert!(matches!(x.add(&m), Err(MatrixError::DimensionMismatch { .. })));
    }

    #[test]
    fn permute_keeps_labels_with_data() {
        let a = animals();
        let p = a
            .permute(
                &["madagascar", "venom", "death", "danger", "survive"],
                &["Octopus", "Snail", "Cobra", "Jellyfish"],
            )
            .unwrap();
        assert_eq!(p.row(0), &[0.0, 2.0, 0.0, 0.0]);
        assert!(a.label_aligned_equal(&p, 0.0));
        assert!(matches!(
            a.permute(&["venom", "venom", "death", "danger", "survive"], a.col_labels()),
            Err(MatrixError::NotAPermutation { .. })
        ));
        assert!(matches!(
            a.permute(&["venom"], a.col_labels()),
            Err(MatrixError::NotAPermutation { .. })
        ));
        assert!(matches!(
            a.permute(&["venom", "death", "danger", "survive", "zebra"], a.col_labels()),
            Err(MatrixError::UnknownLabel(_))
        ));
    }

    #[test]
    fn label_aligned_equal_detects_differences() {
        let a = animals();
        let mut rows = a.to_rows();
        rows[0][0] += 1.0;
        let b = LabeledMatrix::new(a.row_labels().to_vec(), a.col_labels().to_vec(), rows).unwrap();
        assert!(!a.label_aligned_equal(&b, 0.0));
        let c = a.relabel(labels(["a", "b", "c", "d", "e"]).unwrap(), a.col_labels().to_vec()).unwrap();
        assert!(!a.label_aligned_equal(&c, 0.0));
    }

    #[test]
    fn csv_quotes_labels() {
        let m = LabeledMatrix::from_rows(&["a,b", "say \"hi\""], &["x"], vec![vec![1.5], vec![2.0]]).unwrap();
        let s = m.to_csv_string();
        assert_eq!(s, ",x\n\"a,b\",1.5\n\"say \"\"hi\"\"\",2\n");
        let back = LabeledMatrix::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_shape() {
        let m = LabeledMatrix::from_rows(&["a"], &["x", "y"], vec![vec![1.0, 0.5]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":["a"],"cols":["x","y"],"values":[[1.0,0.5]]}"#);
        let back: LabeledMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":["a","a"],"cols":["x"],"values":[[1],[2]]}"#;
        assert!(serde_json::from_str::<LabeledMatrix>(bad).is_err());
    }
}
