use crate::corpus::Corpus;
use crate::counts::ExpectedTables;
use crate::error::{Error, Result};
use crate::sampling::{normalize, SeededRng};

use super::{FittedLda, LdaHyper};

/// Per-token topic responsibilities, stored flat in document order.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    topics: usize,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl Responsibilities {
    /// Normalized uniform random positives for every token.
    pub fn random(corpus: &Corpus, topics: usize, rng: &mut SeededRng) -> Self {
        let mut r = Self::uniform(corpus, topics);
        for token in r.data.chunks_exact_mut(topics) {
            for g in token.iter_mut() {
                // 1 - u lies in (0, 1], so every entry is strictly positive.
                *g = 1.0 - rng.uniform();
            }
            normalize(token);
        }
        r
    }

    /// `1/K` for every token.
    pub fn uniform(corpus: &Corpus, topics: usize) -> Self {
        let mut offsets = Vec::with_capacity(corpus.num_docs() + 1);
        let mut total = 0;
        offsets.push(0);
        for d in corpus.docs() {
            total += d.len();
            offsets.push(total);
        }
        Responsibilities {
            topics,
            offsets,
            data: vec![1.0 / topics as f64; total * topics],
        }
    }

    /// Builds from explicit per-token vectors, one list per document.
    pub fn from_rows(corpus: &Corpus, topics: usize, rows: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mut r = Self::uniform(corpus, topics);
        if rows.len() != corpus.num_docs() {
            return Err(Error::invalid("responsibilities", "one list per document"));
        }
        for (m, doc) in rows.iter().enumerate() {
            if doc.len() != corpus.docs()[m].len() {
                return Err(Error::invalid("responsibilities", format!("length mismatch in document {m}")));
            }
            for (n, g) in doc.iter().enumerate() {
                if g.len() != topics || g.iter().any(|&x| !(x >= 0.0)) {
                    return Err(Error::invalid("responsibilities", format!("bad vector at ({m}, {n})")));
                }
                r.token_mut(m, n).copy_from_slice(g);
                normalize(r.token_mut(m, n));
            }
        }
        Ok(r)
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn token(&self, m: usize, n: usize) -> &[f64] {
        let i = (self.offsets[m] + n) * self.topics;
        &self.data[i..i + self.topics]
    }

    pub fn token_mut(&mut self, m: usize, n: usize) -> &mut [f64] {
        let i = (self.offsets[m] + n) * self.topics;
        &mut self.data[i..i + self.topics]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Expected counts implied by these responsibilities.
    pub fn expected_tables(&self, corpus: &Corpus) -> ExpectedTables {
        let mut t = ExpectedTables::zeros(corpus.num_docs(), self.topics, corpus.vocab_size());
        for (m, doc) in corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                for (k, &g) in self.token(m, n).iter().enumerate() {
                    t.add(m, k, v, g);
                }
            }
        }
        t
    }
}

/// Unnormalized CVB0 update for one token; `tables` must exclude the token.
///
/// `gamma_k = (n_m^k + alpha) (n_k^v + beta) / (n_k^* + V beta)`.
pub fn cvb0_update(tables: &ExpectedTables, m: usize, v: usize, hyper: &LdaHyper, out: &mut [f64]) {
    let vbeta = tables.vocab_size() as f64 * hyper.beta;
    let doc_row = tables.doc_topic.row(m);
    for (k, g) in out.iter_mut().enumerate() {
        *g = (doc_row[k] + hyper.alpha) * (tables.topic_word.get(k, v) + hyper.beta)
            / (tables.topic_total[k] + vbeta);
    }
}

/// CVB0 state for LDA.
#[derive(Debug, Clone)]
pub struct Cvb0<'c> {
    corpus: &'c Corpus,
    hyper: LdaHyper,
    gamma: Responsibilities,
    tables: ExpectedTables,
    scratch: Vec<f64>,
}

impl<'c> Cvb0<'c> {
    /// Random initial responsibilities.
    pub fn new(corpus: &'c Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let gamma = Responsibilities::random(corpus, hyper.topics, rng);
        Self::with_gamma(corpus, hyper, gamma)
    }

    /// Starts from explicit responsibilities.
    pub fn with_gamma(corpus: &'c Corpus, hyper: LdaHyper, gamma: Responsibilities) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        if gamma.topics() != hyper.topics || gamma.as_slice().len() != corpus.num_tokens() * hyper.topics {
            return Err(Error::invalid("responsibilities", "shape does not match corpus and topics"));
        }
        let tables = gamma.expected_tables(corpus);
        Ok(Cvb0 {
            corpus,
            hyper,
            gamma,
            tables,
            scratch: vec![0.0; hyper.topics],
        })
    }

    /// Updates every token once, documents and positions in order.
    pub fn sweep(&mut self) {
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                for (k, &g) in self.gamma.token(m, n).iter().enumerate() {
                    self.tables.remove(m, k, v, g);
                }
                cvb0_update(&self.tables, m, v, &self.hyper, &mut self.scratch);
                normalize(&mut self.scratch);
                let token = self.gamma.token_mut(m, n);
                token.copy_from_slice(&self.scratch);
                for (k, &g) in self.scratch.iter().enumerate() {
                    self.tables.add(m, k, v, g);
                }
            }
        }
    }

    pub fn run(&mut self) {
        for it in 0..self.hyper.iterations {
            self.sweep();
            crate::progress("lda-cvb0", it + 1, self.hyper.iterations);
        }
    }

    pub fn gamma(&self) -> &Responsibilities {
        &self.gamma
    }

    pub fn tables(&self) -> &ExpectedTables {
        &self.tables
    }

    pub fn estimate(&self) -> FittedLda {
        FittedLda::from_tables(&self.tables, self.hyper.alpha, self.hyper.beta)
    }
}

/// Runs `hyper.iterations` CVB0 sweeps from a random start.
pub fn fit_cvb0(corpus: &Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<FittedLda> {
    let mut state = Cvb0::new(corpus, hyper, rng)?;
    state.run();
    Ok(state.estimate())
}
