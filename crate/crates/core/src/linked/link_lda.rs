use crate::corpus::{Corpus, Tags};
use crate::counts::{smoothed_rows, Matrix};
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_positive, check_topics};
use crate::sampling::{sample_categorical, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkLdaHyper {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Topic-link smoothing.
    pub gamma: f64,
    pub iterations: usize,
}

impl LinkLdaHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics)?;
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_positive("gamma", self.gamma)?;
        check_iterations(self.iterations)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkLdaFit {
    /// M x K, `(n_m^k + c_m^k + alpha) / (sum_k (n_m^k + c_m^k) + K alpha)`.
    pub theta: Matrix<f64>,
    /// K x V.
    pub phi: Matrix<f64>,
    /// K x L, `(c_k^l + gamma) / (c_k^* + L gamma)`.
    pub link_phi: Matrix<f64>,
}

/// Collapsed Gibbs state; words and links of a document share its topic mixture.
#[derive(Debug, Clone)]
pub struct LinkLda<'c> {
    corpus: &'c Corpus,
    links: &'c Tags,
    hyper: LinkLdaHyper,
    z: Vec<Vec<usize>>,
    x: Vec<Vec<usize>>,
    doc_word_topic: Matrix<u32>,
    doc_link_topic: Matrix<u32>,
    topic_word: Matrix<u32>,
    topic_total: Vec<u32>,
    topic_link: Matrix<u32>,
    topic_link_total: Vec<u32>,
    weights: Vec<f64>,
}

/// Word-topic weights, token excluded: `(n_k^v+beta)/(n_k^*+V beta) (n_m^k + c_m^k + alpha)`.
pub fn word_conditional(state: &LinkLda<'_>, m: usize, v: usize, out: &mut [f64]) {
    let h = &state.hyper;
    let vbeta = state.topic_word.cols() as f64 * h.beta;
    for (k, w) in out.iter_mut().enumerate().take(h.topics) {
        *w = (f64::from(state.topic_word.get(k, v)) + h.beta) / (f64::from(state.topic_total[k]) + vbeta)
            * (f64::from(state.doc_word_topic.get(m, k)) + f64::from(state.doc_link_topic.get(m, k)) + h.alpha);
    }
}

/// Link-topic weights, link excluded: `(c_k^l+gamma)/(c_k^*+L gamma) (c_m^k + n_m^k + alpha)`.
pub fn link_conditional(state: &LinkLda<'_>, m: usize, l: usize, out: &mut [f64]) {
    let h = &state.hyper;
    let lgamma = state.topic_link.cols() as f64 * h.gamma;
    for (k, w) in out.iter_mut().enumerate().take(h.topics) {
        *w = (f64::from(state.topic_link.get(k, l)) + h.gamma) / (f64::from(state.topic_link_total[k]) + lgamma)
            * (f64::from(state.doc_link_topic.get(m, k)) + f64::from(state.doc_word_topic.get(m, k)) + h.alpha);
    }
}

impl<'c> LinkLda<'c> {
    pub fn new(corpus: &'c Corpus, hyper: LinkLdaHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let links = corpus.links().ok_or(Error::MissingStructure("link lists"))?;
        let z = corpus.docs().iter().map(|d| d.iter().map(|_| rng.index(hyper.topics)).collect()).collect();
        let x = links.docs.iter().map(|d| d.iter().map(|_| rng.index(hyper.topics)).collect()).collect();
        Self::from_assignments(corpus, hyper, z, x)
    }

    /// `z` gives word topics, `x` link topics.
    pub fn from_assignments(corpus: &'c Corpus, hyper: LinkLdaHyper, z: Vec<Vec<usize>>, x: Vec<Vec<usize>>) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let links = corpus.links().ok_or(Error::MissingStructure("link lists"))?;
        let (m_count, k_count) = (corpus.num_docs(), hyper.topics);
        if z.len() != m_count || x.len() != m_count {
            return Err(Error::invalid("assignments", "one list per document"));
        }
        let mut s = LinkLda {
            corpus,
            links,
            hyper,
            z,
            x,
            doc_word_topic: Matrix::zeros(m_count, k_count),
            doc_link_topic: Matrix::zeros(m_count, k_count),
            topic_word: Matrix::zeros(k_count, corpus.vocab_size()),
            topic_total: vec![0; k_count],
            topic_link: Matrix::zeros(k_count, links.vocab.len()),
            topic_link_total: vec![0; k_count],
            weights: vec![0.0; k_count],
        };
        for m in 0..m_count {
            if s.z[m].len() != corpus.docs()[m].len() || s.x[m].len() != links.docs[m].len() {
                return Err(Error::invalid("assignments", format!("length mismatch in document {m}")));
            }
            if s.z[m].iter().chain(&s.x[m]).any(|&k| k >= k_count) {
                return Err(Error::invalid("assignments", format!("topic out of range in document {m}")));
            }
            for n in 0..s.z[m].len() {
                s.shift_word(m, n, s.z[m][n], true);
            }
            for e in 0..s.x[m].len() {
                s.shift_link(m, e, s.x[m][e], true);
            }
        }
        Ok(s)
    }

    fn shift_word(&mut self, m: usize, n: usize, k: usize, add: bool) {
        let v = self.corpus.docs()[m][n];
        if add {
            self.doc_word_topic.add(m, k, 1);
            self.topic_word.add(k, v, 1);
            self.topic_total[k] += 1;
        } else {
            self.doc_word_topic.sub(m, k, 1);
            self.topic_word.sub(k, v, 1);
            self.topic_total[k] -= 1;
        }
    }

    fn shift_link(&mut self, m: usize, e: usize, k: usize, add: bool) {
        let l = self.links.docs[m][e];
        if add {
            self.doc_link_topic.add(m, k, 1);
            self.topic_link.add(k, l, 1);
            self.topic_link_total[k] += 1;
        } else {
            self.doc_link_topic.sub(m, k, 1);
            self.topic_link.sub(k, l, 1);
            self.topic_link_total[k] -= 1;
        }
    }

    /// Per document: every word, then every link.
    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        let mut w = std::mem::take(&mut self.weights);
        for m in 0..self.corpus.num_docs() {
            for n in 0..self.z[m].len() {
                self.shift_word(m, n, self.z[m][n], false);
                word_conditional(self, m, self.corpus.docs()[m][n], &mut w);
                let k = sample_categorical(&w, rng)?;
                self.shift_word(m, n, k, true);
                self.z[m][n] = k;
            }
            for e in 0..self.x[m].len() {
                self.shift_link(m, e, self.x[m][e], false);
                link_conditional(self, m, self.links.docs[m][e], &mut w);
                let k = sample_categorical(&w, rng)?;
                self.shift_link(m, e, k, true);
                self.x[m][e] = k;
            }
        }
        self.weights = w;
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("link-lda", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    /// Recounts both table families from the assignments and compares.
    pub fn check(&self) -> Result<(), String> {
        let fresh = LinkLda::from_assignments(self.corpus, self.hyper, self.z.clone(), self.x.clone())
            .map_err(|e| e.to_string())?;
        let same = fresh.doc_word_topic == self.doc_word_topic
            && fresh.doc_link_topic == self.doc_link_topic
            && fresh.topic_word == self.topic_word
            && fresh.topic_total == self.topic_total
            && fresh.topic_link == self.topic_link
            && fresh.topic_link_total == self.topic_link_total;
        if same {
            Ok(())
        } else {
            Err("counts disagree with assignments".into())
        }
    }

    pub fn estimate(&self) -> LinkLdaFit {
        let (m_count, k_count) = (self.corpus.num_docs(), self.hyper.topics);
        let mut combined = Matrix::<u32>::zeros(m_count, k_count);
        for m in 0..m_count {
            for k in 0..k_count {
                combined.set(m, k, self.doc_word_topic.get(m, k) + self.doc_link_topic.get(m, k));
            }
        }
        LinkLdaFit {
            theta: smoothed_rows(&combined, self.hyper.alpha),
            phi: smoothed_rows(&self.topic_word, self.hyper.beta),
            link_phi: smoothed_rows(&self.topic_link, self.hyper.gamma),
        }
    }
}

pub fn fit_link_lda(corpus: &Corpus, hyper: LinkLdaHyper, rng: &mut SeededRng) -> Result<LinkLdaFit> {
    let mut s = LinkLda::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
