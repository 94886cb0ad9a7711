use crate::corpus::Corpus;
use crate::counts::{bag_log_likelihood, smoothed_rows, Matrix, WordBag};
use crate::error::Result;
use crate::lda::{check_iterations, check_positive, check_topics};
use crate::sampling::{exp_normalize_max, sample_categorical, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtmHyper {
    pub pseudo_docs: usize,
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Smoothing of pseudo-document sizes.
    pub lambda: f64,
    pub iterations: usize,
}

impl PtmHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics)?;
        if self.pseudo_docs == 0 {
            return Err(crate::Error::invalid("pseudo_docs", "must be at least 1"));
        }
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_positive("lambda", self.lambda)?;
        check_iterations(self.iterations)
    }
}

/// Per-document and per-pseudo-document topic mixtures plus topic-word distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PtmFit {
    /// M x K from each document's own tokens.
    pub theta: Matrix<f64>,
    /// P x K.
    pub pseudo_theta: Matrix<f64>,
    pub phi: Matrix<f64>,
    pub pseudo_of_doc: Vec<usize>,
}

/// Collapsed Gibbs state with short documents pooled into pseudo documents.
#[derive(Debug, Clone)]
pub struct Ptm<'c> {
    corpus: &'c Corpus,
    hyper: PtmHyper,
    l: Vec<usize>,
    z: Vec<Vec<usize>>,
    docs_per_pseudo: Vec<u32>,
    pseudo_topic: Matrix<u32>,
    pseudo_total: Vec<u32>,
    doc_topic: Matrix<u32>,
    topic_word: Matrix<u32>,
    topic_total: Vec<u32>,
    weights: Vec<f64>,
}

/// Log weights for moving document `m` to each pseudo document. The state
/// must exclude `m` from its pseudo document:
/// `ln((n_l+lambda)/(M-1+P lambda)) + sum_k lnRF(N_l^k+alpha, N_m^k) - lnRF(N_l^*+K alpha, N_m)`.
pub fn ptm_pseudo_log_weights(state: &Ptm<'_>, m: usize, out: &mut [f64]) {
    let h = &state.hyper;
    let bag = state.doc_topic_bag(m);
    let others: u32 = state.docs_per_pseudo.iter().sum();
    let denom = (f64::from(others) + h.pseudo_docs as f64 * h.lambda).ln();
    for (l, w) in out.iter_mut().enumerate().take(h.pseudo_docs) {
        *w = (f64::from(state.docs_per_pseudo[l]) + h.lambda).ln() - denom
            + bag_log_likelihood(state.pseudo_topic.row(l), state.pseudo_total[l], &bag, h.alpha);
    }
}

/// Unnormalized topic weights for token `v` of a document in pseudo document
/// `l`, token excluded: `(N_l^k+alpha)/(N_l^*+K alpha) (n_k^v+beta)/(n_k^*+V beta)`.
pub fn ptm_topic_weights(state: &Ptm<'_>, l: usize, v: usize, out: &mut [f64]) {
    let h = &state.hyper;
    let k_count = h.topics;
    let vbeta = state.corpus.vocab_size() as f64 * h.beta;
    let pd = f64::from(state.pseudo_total[l]) + k_count as f64 * h.alpha;
    for (k, w) in out.iter_mut().enumerate().take(k_count) {
        *w = (f64::from(state.pseudo_topic.get(l, k)) + h.alpha) / pd * (f64::from(state.topic_word.get(k, v)) + h.beta)
            / (f64::from(state.topic_total[k]) + vbeta);
    }
}

impl<'c> Ptm<'c> {
    pub fn new(corpus: &'c Corpus, hyper: PtmHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let l = (0..corpus.num_docs()).map(|_| rng.index(hyper.pseudo_docs)).collect();
        let z = corpus.docs().iter().map(|d| d.iter().map(|_| rng.index(hyper.topics)).collect()).collect();
        Self::from_assignments(corpus, hyper, l, z)
    }

    pub fn from_assignments(corpus: &'c Corpus, hyper: PtmHyper, l: Vec<usize>, z: Vec<Vec<usize>>) -> Result<Self> {
        use crate::Error;
        hyper.validate()?;
        corpus.require_nonempty()?;
        let (m_count, k_count, p_count) = (corpus.num_docs(), hyper.topics, hyper.pseudo_docs);
        if l.len() != m_count || z.len() != m_count {
            return Err(Error::invalid("assignments", "one entry per document"));
        }
        let mut s = Ptm {
            corpus,
            hyper,
            l,
            z,
            docs_per_pseudo: vec![0; p_count],
            pseudo_topic: Matrix::zeros(p_count, k_count),
            pseudo_total: vec![0; p_count],
            doc_topic: Matrix::zeros(m_count, k_count),
            topic_word: Matrix::zeros(k_count, corpus.vocab_size()),
            topic_total: vec![0; k_count],
            weights: vec![0.0; p_count.max(k_count)],
        };
        for (m, doc) in corpus.docs().iter().enumerate() {
            let l = s.l[m];
            if l >= p_count {
                return Err(Error::invalid("assignments", format!("pseudo document {l} out of range")));
            }
            if s.z[m].len() != doc.len() {
                return Err(Error::invalid("assignments", format!("length mismatch in document {m}")));
            }
            s.docs_per_pseudo[l] += 1;
            for (n, &v) in doc.iter().enumerate() {
                let k = s.z[m][n];
                if k >= k_count {
                    return Err(Error::invalid("assignments", format!("topic {k} out of range")));
                }
                s.doc_topic.add(m, k, 1);
                s.pseudo_topic.add(l, k, 1);
                s.pseudo_total[l] += 1;
                s.topic_word.add(k, v, 1);
                s.topic_total[k] += 1;
            }
        }
        Ok(s)
    }

    fn doc_topic_bag(&self, m: usize) -> WordBag {
        let row = self.doc_topic.row(m);
        WordBag {
            words: row.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c)).collect(),
            len: row.iter().sum(),
        }
    }

    fn move_doc(&mut self, m: usize, add: bool) {
        let l = self.l[m];
        let n_m = self.corpus.docs()[m].len() as u32;
        for k in 0..self.hyper.topics {
            let c = self.doc_topic.get(m, k);
            if add {
                self.pseudo_topic.add(l, k, c);
            } else {
                self.pseudo_topic.sub(l, k, c);
            }
        }
        if add {
            self.docs_per_pseudo[l] += 1;
            self.pseudo_total[l] += n_m;
        } else {
            self.docs_per_pseudo[l] -= 1;
            self.pseudo_total[l] -= n_m;
        }
    }

    /// Reassigns document `m` to a pseudo document.
    pub fn resample_pseudo(&mut self, m: usize, rng: &mut SeededRng) -> Result<()> {
        self.move_doc(m, false);
        let mut w = std::mem::take(&mut self.weights);
        let p = self.hyper.pseudo_docs;
        ptm_pseudo_log_weights(self, m, &mut w[..p]);
        exp_normalize_max(&mut w[..p]);
        let l = sample_categorical(&w[..p], rng)?;
        self.weights = w;
        self.l[m] = l;
        self.move_doc(m, true);
        Ok(())
    }

    pub fn resample_token(&mut self, m: usize, n: usize, rng: &mut SeededRng) -> Result<()> {
        let v = self.corpus.docs()[m][n];
        let (l, old) = (self.l[m], self.z[m][n]);
        self.shift_token(m, l, old, v, false);
        let mut w = std::mem::take(&mut self.weights);
        let k_count = self.hyper.topics;
        ptm_topic_weights(self, l, v, &mut w[..k_count]);
        let k = sample_categorical(&w[..k_count], rng)?;
        self.weights = w;
        self.shift_token(m, l, k, v, true);
        self.z[m][n] = k;
        Ok(())
    }

    fn shift_token(&mut self, m: usize, l: usize, k: usize, v: usize, add: bool) {
        if add {
            self.doc_topic.add(m, k, 1);
            self.pseudo_topic.add(l, k, 1);
            self.pseudo_total[l] += 1;
            self.topic_word.add(k, v, 1);
            self.topic_total[k] += 1;
        } else {
            self.doc_topic.sub(m, k, 1);
            self.pseudo_topic.sub(l, k, 1);
            self.pseudo_total[l] -= 1;
            self.topic_word.sub(k, v, 1);
            self.topic_total[k] -= 1;
        }
    }

    /// All pseudo-document assignments, then all token topics.
    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for m in 0..self.corpus.num_docs() {
            self.resample_pseudo(m, rng)?;
        }
        for m in 0..self.corpus.num_docs() {
            for n in 0..self.corpus.docs()[m].len() {
                self.resample_token(m, n, rng)?;
            }
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("ptm", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn pseudo_of_doc(&self) -> &[usize] {
        &self.l
    }

    pub fn docs_per_pseudo(&self) -> &[u32] {
        &self.docs_per_pseudo
    }

    /// Recomputes all counts from the assignments and compares.
    pub fn check(&self) -> Result<(), String> {
        let fresh = Ptm::from_assignments(self.corpus, self.hyper, self.l.clone(), self.z.clone())
            .map_err(|e| e.to_string())?;
        let same = fresh.docs_per_pseudo == self.docs_per_pseudo
            && fresh.pseudo_topic == self.pseudo_topic
            && fresh.pseudo_total == self.pseudo_total
            && fresh.doc_topic == self.doc_topic
            && fresh.topic_word == self.topic_word
            && fresh.topic_total == self.topic_total;
        if same {
            Ok(())
        } else {
            Err("counts disagree with assignments".into())
        }
    }

    pub fn estimate(&self) -> PtmFit {
        PtmFit {
            theta: smoothed_rows(&self.doc_topic, self.hyper.alpha),
            pseudo_theta: smoothed_rows(&self.pseudo_topic, self.hyper.alpha),
            phi: smoothed_rows(&self.topic_word, self.hyper.beta),
            pseudo_of_doc: self.l.clone(),
        }
    }
}

pub fn fit_ptm(corpus: &Corpus, hyper: PtmHyper, rng: &mut SeededRng) -> Result<PtmFit> {
    let mut s = Ptm::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
