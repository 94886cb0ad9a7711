use crate::corpus::Corpus;
use crate::counts::{smoothed_rows, Matrix};
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_positive, check_topics};
use crate::sampling::{sample_categorical, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtmHyper {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Positions `i < j` form a biterm when `j - i < window`.
    pub window: usize,
    pub iterations: usize,
}

impl BtmHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics)?;
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_window(self.window)?;
        check_iterations(self.iterations)
    }
}

fn check_window(window: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::invalid("window", format!("must be at least 2, got {window}")));
    }
    Ok(())
}

/// Unordered word pair from one document with its multiplicity there; `w1 <= w2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Biterm {
    pub w1: usize,
    pub w2: usize,
    pub source_doc: usize,
    pub count: u32,
}

/// Distinct biterms per document in order of first occurrence.
pub fn extract_biterms(corpus: &Corpus, window: usize) -> Result<Vec<Biterm>> {
    check_window(window)?;
    let mut out = Vec::new();
    for (m, doc) in corpus.docs().iter().enumerate() {
        let start = out.len();
        for i in 0..doc.len() {
            for j in i + 1..doc.len().min(i + window) {
                let (w1, w2) = if doc[i] <= doc[j] { (doc[i], doc[j]) } else { (doc[j], doc[i]) };
                match out[start..].iter_mut().find(|b: &&mut Biterm| b.w1 == w1 && b.w2 == w2) {
                    Some(b) => b.count += 1,
                    None => out.push(Biterm {
                        w1,
                        w2,
                        source_doc: m,
                        count: 1,
                    }),
                }
            }
        }
    }
    Ok(out)
}

/// Topic weights of one biterm removed from the counts:
/// `(n_k+alpha)/(N_B-1+K alpha) (n_k^w1+beta)(n_k^w2+beta) / ((n_k^*+V beta+1)(n_k^*+V beta))`.
pub fn btm_full_conditional(state: &Btm, w1: usize, w2: usize, out: &mut [f64]) {
    let h = &state.hyper;
    let vbeta = state.topic_word.cols() as f64 * h.beta;
    let others: u32 = state.topic_biterms.iter().sum();
    let denom = f64::from(others) + h.topics as f64 * h.alpha;
    for (k, w) in out.iter_mut().enumerate().take(h.topics) {
        let tot = f64::from(state.topic_total[k]) + vbeta;
        *w = (f64::from(state.topic_biterms[k]) + h.alpha) / denom
            * (f64::from(state.topic_word.get(k, w1)) + h.beta)
            * (f64::from(state.topic_word.get(k, w2)) + h.beta)
            / ((tot + 1.0) * tot);
    }
}

/// Global topic proportions, topic-word distributions and per-document mixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct BtmFit {
    pub theta: Vec<f64>,
    pub phi: Matrix<f64>,
    /// M x K.
    pub doc_topic: Matrix<f64>,
}

/// Collapsed Gibbs state over biterm occurrences.
#[derive(Debug, Clone)]
pub struct Btm {
    hyper: BtmHyper,
    num_docs: usize,
    biterms: Vec<Biterm>,
    /// Index into `biterms` per occurrence.
    occurrences: Vec<usize>,
    z: Vec<usize>,
    topic_biterms: Vec<u32>,
    topic_word: Matrix<u32>,
    topic_total: Vec<u32>,
    weights: Vec<f64>,
}

impl Btm {
    pub fn new(corpus: &Corpus, hyper: BtmHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let biterms = extract_biterms(corpus, hyper.window)?;
        let n: u32 = biterms.iter().map(|b| b.count).sum();
        let z = (0..n).map(|_| rng.index(hyper.topics)).collect();
        Self::from_assignments(corpus, hyper, z)
    }

    /// `z` holds one topic per biterm occurrence, biterms in extraction order.
    pub fn from_assignments(corpus: &Corpus, hyper: BtmHyper, z: Vec<usize>) -> Result<Self> {
        hyper.validate()?;
        let biterms = extract_biterms(corpus, hyper.window)?;
        if biterms.is_empty() {
            return Err(Error::Domain(format!("no document has two tokens within window {}", hyper.window)));
        }
        let occurrences: Vec<usize> = biterms
            .iter()
            .enumerate()
            .flat_map(|(i, b)| std::iter::repeat(i).take(b.count as usize))
            .collect();
        if z.len() != occurrences.len() {
            return Err(Error::invalid("assignments", "one topic per biterm occurrence"));
        }
        let mut s = Btm {
            hyper,
            num_docs: corpus.num_docs(),
            biterms,
            occurrences,
            z,
            topic_biterms: vec![0; hyper.topics],
            topic_word: Matrix::zeros(hyper.topics, corpus.vocab_size()),
            topic_total: vec![0; hyper.topics],
            weights: vec![0.0; hyper.topics],
        };
        for i in 0..s.z.len() {
            let k = s.z[i];
            if k >= hyper.topics {
                return Err(Error::invalid("assignments", format!("topic {k} out of range")));
            }
            s.shift(i, k, true);
        }
        Ok(s)
    }

    fn shift(&mut self, i: usize, k: usize, add: bool) {
        let b = self.biterms[self.occurrences[i]];
        if add {
            self.topic_biterms[k] += 1;
            self.topic_word.add(k, b.w1, 1);
            self.topic_word.add(k, b.w2, 1);
            self.topic_total[k] += 2;
        } else {
            self.topic_biterms[k] -= 1;
            self.topic_word.sub(k, b.w1, 1);
            self.topic_word.sub(k, b.w2, 1);
            self.topic_total[k] -= 2;
        }
    }

    pub fn biterms(&self) -> &[Biterm] {
        &self.biterms
    }

    pub fn topic_biterms(&self) -> &[u32] {
        &self.topic_biterms
    }

    pub fn topic_word(&self) -> &Matrix<u32> {
        &self.topic_word
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for i in 0..self.z.len() {
            self.shift(i, self.z[i], false);
            let b = self.biterms[self.occurrences[i]];
            let mut w = std::mem::take(&mut self.weights);
            btm_full_conditional(self, b.w1, b.w2, &mut w);
            let k = sample_categorical(&w, rng)?;
            self.weights = w;
            self.shift(i, k, true);
            self.z[i] = k;
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("btm", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    /// `theta_k = (n_k+alpha)/(N_B+K alpha)` and the smoothed topic-word rows.
    pub fn global_estimate(&self) -> (Vec<f64>, Matrix<f64>) {
        let n_b: u32 = self.topic_biterms.iter().sum();
        let denom = f64::from(n_b) + self.hyper.topics as f64 * self.hyper.alpha;
        let theta = self.topic_biterms.iter().map(|&n| (f64::from(n) + self.hyper.alpha) / denom).collect();
        (theta, smoothed_rows(&self.topic_word, self.hyper.beta))
    }

    pub fn estimate(&self) -> BtmFit {
        let (theta, phi) = self.global_estimate();
        let doc_topic = doc_topic_from_biterms(&theta, &phi, &self.biterms, self.num_docs);
        BtmFit { theta, phi, doc_topic }
    }
}

/// `p(k|m) = sum_b p(k|b) n(b)/N_m` with `p(k|b)` proportional to
/// `theta_k phi_k,w1 phi_k,w2`. Documents without biterms get a uniform row.
pub fn doc_topic_from_biterms(theta: &[f64], phi: &Matrix<f64>, biterms: &[Biterm], num_docs: usize) -> Matrix<f64> {
    let k_count = theta.len();
    let mut out = Matrix::zeros(num_docs, k_count);
    let mut totals = vec![0u32; num_docs];
    for b in biterms {
        totals[b.source_doc] += b.count;
    }
    let mut post = vec![0.0; k_count];
    for b in biterms {
        for (k, p) in post.iter_mut().enumerate() {
            *p = theta[k] * phi.get(k, b.w1) * phi.get(k, b.w2);
        }
        let z: f64 = post.iter().sum();
        let share = f64::from(b.count) / f64::from(totals[b.source_doc]);
        for (o, p) in out.row_mut(b.source_doc).iter_mut().zip(&post) {
            *o += p / z * share;
        }
    }
    for (m, &t) in totals.iter().enumerate() {
        if t == 0 {
            log::warn!("document {m} has no biterms; using a uniform topic mixture");
            out.row_mut(m).fill(1.0 / k_count as f64);
        }
    }
    out
}

pub fn fit_btm(corpus: &Corpus, hyper: BtmHyper, rng: &mut SeededRng) -> Result<BtmFit> {
    let mut s = Btm::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
