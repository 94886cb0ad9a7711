//! Document co-occurrence coherence of topic top-word lists.

use crate::counts::Matrix;
use crate::error::{Error, Result};

/// Indices of the `n` largest entries, ordered by descending value then ascending index.
pub fn top_indices(row: &[f64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    idx.truncate(n);
    idx
}

/// Per-word sorted lists of the documents containing the word.
#[derive(Debug, Clone)]
pub struct DocumentIndex {
    postings: Vec<Vec<usize>>,
}

impl DocumentIndex {
    pub fn new(docs: &[Vec<usize>]) -> Self {
        let vocab = docs.iter().flatten().max().map_or(0, |&v| v + 1);
        let mut postings = vec![Vec::new(); vocab];
        for (m, doc) in docs.iter().enumerate() {
            for &v in doc {
                let list: &mut Vec<usize> = &mut postings[v];
                if list.last() != Some(&m) {
                    list.push(m);
                }
            }
        }
        DocumentIndex { postings }
    }

    fn list(&self, v: usize) -> &[usize] {
        self.postings.get(v).map_or(&[], Vec::as_slice)
    }

    /// Number of documents containing `v`.
    pub fn doc_freq(&self, v: usize) -> usize {
        self.list(v).len()
    }

    /// Number of documents containing both `a` and `b`.
    pub fn co_doc_freq(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.list(a), self.list(b));
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// `sum_{n>=2} sum_{l<n} ln((D(v_n, v_l) + 1) / D(v_l))` over the ordered list.
    pub fn coherence(&self, top: &[usize]) -> Result<f64> {
        if let Some(&v) = top.iter().find(|&&v| self.doc_freq(v) == 0) {
            return Err(Error::UnseenWord { word: format!("#{v}") });
        }
        let mut score = 0.0;
        for n in 1..top.len() {
            for l in 0..n {
                let joint = self.co_doc_freq(top[n], top[l]) as f64;
                score += ((joint + 1.0) / self.doc_freq(top[l]) as f64).ln();
            }
        }
        Ok(score)
    }
}

/// Coherence of one topic given its ordered top words.
pub fn topic_coherence(docs: &[Vec<usize>], top: &[usize]) -> Result<f64> {
    DocumentIndex::new(docs).coherence(top)
}

/// Mean coherence over the topics of `phi`, each using its `top_n` most probable words.
pub fn average_coherence(docs: &[Vec<usize>], phi: &Matrix<f64>, top_n: usize) -> Result<f64> {
    if top_n == 0 {
        return Err(Error::invalid("top_n", "must be at least 1"));
    }
    if phi.rows() == 0 {
        return Err(Error::invalid("phi", "has no topics"));
    }
    let index = DocumentIndex::new(docs);
    let mut total = 0.0;
    for row in phi.iter_rows() {
        total += index.coherence(&top_indices(row, top_n))?;
    }
    Ok(total / phi.rows() as f64)
}
