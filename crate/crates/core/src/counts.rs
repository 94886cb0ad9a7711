//! Dense matrices and the sufficient statistics kept by the LDA-style samplers.

use std::ops::{AddAssign, SubAssign};

use crate::error::{Error, Result};
use crate::sampling::log_rising_factorial_unchecked;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }
}

impl<T> Matrix<T> {
    /// Builds a matrix from row-major data. Fails if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(
                "matrix",
                format!("{} values for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        // `max(1)` keeps chunks_exact valid for zero-column matrices.
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T: Copy> Matrix<T> {
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }
}

impl<T: Copy + AddAssign> Matrix<T> {
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] += value;
    }
}

impl<T: Copy + SubAssign> Matrix<T> {
    #[inline]
    pub fn sub(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] -= value;
    }
}

impl Matrix<f64> {
    /// Largest absolute deviation of any row sum from 1.
    pub fn max_row_sum_error(&self) -> f64 {
        self.iter_rows()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Count type usable in [`Tables`].
pub trait Count: Copy + Default + PartialEq + AddAssign + SubAssign + std::fmt::Debug {
    fn as_f64(self) -> f64;
}

impl Count for u32 {
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Count for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}

/// Document-topic and topic-word statistics with their marginals.
///
/// `n_m^k`, `n_k^v`, `n_k^*` and `n_m^*`. Integer for Gibbs samplers,
/// real-valued expectations for CVB0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables<T> {
    pub doc_topic: Matrix<T>,
    pub topic_word: Matrix<T>,
    pub topic_total: Vec<T>,
    pub doc_total: Vec<T>,
}

/// Integer tables of a Gibbs sampler.
pub type CountTables = Tables<u32>;
/// Expected counts of a CVB0 fit.
pub type ExpectedTables = Tables<f64>;

impl<T: Count> Tables<T> {
    pub fn zeros(docs: usize, topics: usize, vocab: usize) -> Self {
        Tables {
            doc_topic: Matrix::zeros(docs, topics),
            topic_word: Matrix::zeros(topics, vocab),
            topic_total: vec![T::default(); topics],
            doc_total: vec![T::default(); docs],
        }
    }

    pub fn topics(&self) -> usize {
        self.topic_word.rows()
    }

    pub fn vocab_size(&self) -> usize {
        self.topic_word.cols()
    }

    pub fn docs(&self) -> usize {
        self.doc_topic.rows()
    }

    #[inline]
    pub fn add(&mut self, m: usize, k: usize, v: usize, amount: T) {
        self.doc_topic.add(m, k, amount);
        self.topic_word.add(k, v, amount);
        self.topic_total[k] += amount;
        self.doc_total[m] += amount;
    }

    #[inline]
    pub fn remove(&mut self, m: usize, k: usize, v: usize, amount: T) {
        self.doc_topic.sub(m, k, amount);
        self.topic_word.sub(k, v, amount);
        self.topic_total[k] -= amount;
        self.doc_total[m] -= amount;
    }
}

impl CountTables {
    /// Checks that the marginals agree with the cells.
    pub fn check(&self) -> Result<(), String> {
        for m in 0..self.docs() {
            let s: u32 = self.doc_topic.row(m).iter().sum();
            if s != self.doc_total[m] {
                return Err(format!("doc {m}: sum n_m^k = {s} but n_m^* = {}", self.doc_total[m]));
            }
        }
        for k in 0..self.topics() {
            let s: u32 = self.topic_word.row(k).iter().sum();
            if s != self.topic_total[k] {
                return Err(format!("topic {k}: sum n_k^v = {s} but n_k^* = {}", self.topic_total[k]));
            }
        }
        let by_doc: u32 = self.doc_total.iter().sum();
        let by_topic: u32 = self.topic_total.iter().sum();
        if by_doc != by_topic {
            return Err(format!("grand totals differ: {by_doc} vs {by_topic}"));
        }
        Ok(())
    }
}

/// Builds count tables from per-token topic assignments.
pub fn counts_from_assignments(
    docs: &[Vec<usize>],
    vocab_size: usize,
    topics: usize,
    z: &[Vec<usize>],
) -> Result<CountTables> {
    if z.len() != docs.len() {
        return Err(Error::invalid(
            "assignments",
            format!("{} assignment rows for {} documents", z.len(), docs.len()),
        ));
    }
    let mut tables = CountTables::zeros(docs.len(), topics, vocab_size);
    for (m, (doc, zm)) in docs.iter().zip(z).enumerate() {
        if doc.len() != zm.len() {
            return Err(Error::invalid(
                "assignments",
                format!("document {m} has {} tokens but {} assignments", doc.len(), zm.len()),
            ));
        }
        for (&v, &k) in doc.iter().zip(zm) {
            if k >= topics {
                return Err(Error::invalid(
                    "assignments",
                    format!("topic {k} out of range in document {m}"),
                ));
            }
            if v >= vocab_size {
                return Err(Error::invalid(
                    "assignments",
                    format!("word {v} out of range in document {m}"),
                ));
            }
            tables.add(m, k, v, 1);
        }
    }
    Ok(tables)
}

/// Row-wise Dirichlet-smoothed estimate `(n_rc + prior) / (sum_c n_rc + cols * prior)`.
pub fn smoothed_rows<T: Count>(counts: &Matrix<T>, prior: f64) -> Matrix<f64> {
    let cols = counts.cols();
    let mut out = Matrix::zeros(counts.rows(), cols);
    for r in 0..counts.rows() {
        let row = counts.row(r);
        let total: f64 = row.iter().map(|c| c.as_f64()).sum();
        let denom = total + cols as f64 * prior;
        for (o, c) in out.row_mut(r).iter_mut().zip(row) {
            *o = (c.as_f64() + prior) / denom;
        }
    }
    out
}

/// Word multiset as `(word, count)` pairs sorted by word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordBag {
    pub words: Vec<(usize, u32)>,
    pub len: u32,
}

impl WordBag {
    pub fn from_tokens(tokens: &[usize]) -> Self {
        let mut sorted = tokens.to_vec();
        sorted.sort_unstable();
        let mut words: Vec<(usize, u32)> = Vec::new();
        for v in sorted {
            match words.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => words.push((v, 1)),
            }
        }
        WordBag {
            words,
            len: tokens.len() as u32,
        }
    }
}

/// Log predictive weight of a whole bag under one topic's counts:
/// `sum_w lnRF(n^w + beta, N^w) - lnRF(n^* + V beta, N)` with `V = row.len()`
/// and `lnRF` the log rising factorial.
pub fn bag_log_likelihood(row: &[u32], total: u32, bag: &WordBag, beta: f64) -> f64 {
    let mut lw = 0.0;
    for &(v, c) in &bag.words {
        lw += log_rising_factorial_unchecked(f64::from(row[v]) + beta, c);
    }
    lw - log_rising_factorial_unchecked(f64::from(total) + row.len() as f64 * beta, bag.len)
}
