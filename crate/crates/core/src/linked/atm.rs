use crate::corpus::{Corpus, Tags};
use crate::counts::{smoothed_rows, Matrix};
use crate::error::{Error, Result};
use crate::lda::LdaHyper;
use crate::sampling::{sample_categorical, SeededRng};

/// Author-topic and topic-word distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmFit {
    /// A x K, `theta_{a,k} = (n_a^k + alpha) / (n_a^* + K alpha)`.
    pub theta: Matrix<f64>,
    pub phi: Matrix<f64>,
}

/// Collapsed Gibbs state drawing an (author, topic) pair per token.
#[derive(Debug, Clone)]
pub struct Atm<'c> {
    corpus: &'c Corpus,
    authors: &'c Tags,
    hyper: LdaHyper,
    z: Vec<Vec<usize>>,
    x: Vec<Vec<usize>>,
    author_topic: Matrix<u32>,
    author_total: Vec<u32>,
    topic_word: Matrix<u32>,
    topic_total: Vec<u32>,
    weights: Vec<f64>,
}

/// Joint weights over the document's authors (rows) and topics (columns),
/// flattened row-major, for word `v` with the token excluded:
/// `(n_a^k+alpha)/(n_a^*+K alpha) (n_k^v+beta)/(n_k^*+V beta)`.
pub fn atm_full_conditional(state: &Atm<'_>, m: usize, v: usize, out: &mut Vec<f64>) {
    let h = &state.hyper;
    let vbeta = state.corpus.vocab_size() as f64 * h.beta;
    out.clear();
    for &a in &state.authors.docs[m] {
        let ad = f64::from(state.author_total[a]) + h.topics as f64 * h.alpha;
        for k in 0..h.topics {
            out.push(
                (f64::from(state.author_topic.get(a, k)) + h.alpha) / ad
                    * (f64::from(state.topic_word.get(k, v)) + h.beta)
                    / (f64::from(state.topic_total[k]) + vbeta),
            );
        }
    }
}

impl<'c> Atm<'c> {
    pub fn new(corpus: &'c Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        let authors = Self::authors(corpus)?;
        let mut z = Vec::with_capacity(corpus.num_docs());
        let mut x = Vec::with_capacity(corpus.num_docs());
        for (m, doc) in corpus.docs().iter().enumerate() {
            let a_m = &authors.docs[m];
            x.push(doc.iter().map(|_| a_m[rng.index(a_m.len())]).collect());
            z.push(doc.iter().map(|_| rng.index(hyper.topics)).collect());
        }
        Self::from_assignments(corpus, hyper, x, z)
    }

    fn authors(corpus: &Corpus) -> Result<&Tags> {
        corpus.require_nonempty()?;
        let authors = corpus.authors().ok_or(Error::MissingStructure("author lists"))?;
        if let Some(m) = authors.docs.iter().position(Vec::is_empty) {
            return Err(Error::Domain(format!("document {m} has no authors")));
        }
        Ok(authors)
    }

    /// `x[m][n]` is an author id that must belong to document `m`.
    pub fn from_assignments(corpus: &'c Corpus, hyper: LdaHyper, x: Vec<Vec<usize>>, z: Vec<Vec<usize>>) -> Result<Self> {
        hyper.validate()?;
        let authors = Self::authors(corpus)?;
        if x.len() != corpus.num_docs() || z.len() != corpus.num_docs() {
            return Err(Error::invalid("assignments", "one list per document"));
        }
        let a_count = authors.vocab.len();
        let mut s = Atm {
            corpus,
            authors,
            hyper,
            z,
            x,
            author_topic: Matrix::zeros(a_count, hyper.topics),
            author_total: vec![0; a_count],
            topic_word: Matrix::zeros(hyper.topics, corpus.vocab_size()),
            topic_total: vec![0; hyper.topics],
            weights: Vec::new(),
        };
        for (m, doc) in corpus.docs().iter().enumerate() {
            if s.x[m].len() != doc.len() || s.z[m].len() != doc.len() {
                return Err(Error::invalid("assignments", format!("length mismatch in document {m}")));
            }
            for (n, &v) in doc.iter().enumerate() {
                let (a, k) = (s.x[m][n], s.z[m][n]);
                if !authors.docs[m].contains(&a) || k >= hyper.topics {
                    return Err(Error::invalid("assignments", format!("bad (author, topic) at ({m}, {n})")));
                }
                s.shift(a, k, v, true);
            }
        }
        Ok(s)
    }

    fn shift(&mut self, a: usize, k: usize, v: usize, add: bool) {
        if add {
            self.author_topic.add(a, k, 1);
            self.author_total[a] += 1;
            self.topic_word.add(k, v, 1);
            self.topic_total[k] += 1;
        } else {
            self.author_topic.sub(a, k, 1);
            self.author_total[a] -= 1;
            self.topic_word.sub(k, v, 1);
            self.topic_total[k] -= 1;
        }
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        let k_count = self.hyper.topics;
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                self.shift(self.x[m][n], self.z[m][n], v, false);
                let mut w = std::mem::take(&mut self.weights);
                atm_full_conditional(self, m, v, &mut w);
                let cell = sample_categorical(&w, rng)?;
                self.weights = w;
                let (a, k) = (self.authors.docs[m][cell / k_count], cell % k_count);
                self.shift(a, k, v, true);
                self.x[m][n] = a;
                self.z[m][n] = k;
            }
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("atm", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn author_assignments(&self) -> &[Vec<usize>] {
        &self.x
    }

    pub fn topic_assignments(&self) -> &[Vec<usize>] {
        &self.z
    }

    /// Recounts from the assignments and compares.
    pub fn check(&self) -> Result<(), String> {
        let fresh = Atm::from_assignments(self.corpus, self.hyper, self.x.clone(), self.z.clone())
            .map_err(|e| e.to_string())?;
        if fresh.author_topic == self.author_topic
            && fresh.author_total == self.author_total
            && fresh.topic_word == self.topic_word
            && fresh.topic_total == self.topic_total
        {
            Ok(())
        } else {
            Err("counts disagree with assignments".into())
        }
    }

    pub fn estimate(&self) -> AtmFit {
        AtmFit {
            theta: smoothed_rows(&self.author_topic, self.hyper.alpha),
            phi: smoothed_rows(&self.topic_word, self.hyper.beta),
        }
    }
}

pub fn fit_atm(corpus: &Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<AtmFit> {
    let mut s = Atm::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
