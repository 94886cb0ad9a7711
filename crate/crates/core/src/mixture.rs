//! One cluster per document: the Dirichlet multinomial mixture and its
//! Dirichlet process extension.

use crate::corpus::Corpus;
use crate::counts::{bag_log_likelihood, Matrix, WordBag};
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_nonnegative, check_positive, check_topics};
use crate::sampling::{exp_normalize_max, sample_categorical, SeededRng};

/// Settings shared by both mixtures. For the Dirichlet process variant
/// `clusters` is only the initial count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureHyper {
    pub clusters: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
}

impl MixtureHyper {
    pub fn new(clusters: usize, alpha: f64, beta: f64, iterations: usize) -> Self {
        MixtureHyper {
            clusters,
            alpha,
            beta,
            iterations,
        }
    }

    fn validate(&self, alpha_may_be_zero: bool) -> Result<()> {
        check_topics(self.clusters)?;
        if alpha_may_be_zero {
            check_nonnegative("alpha", self.alpha)?;
        } else {
            check_positive("alpha", self.alpha)?;
        }
        check_positive("beta", self.beta)?;
        check_iterations(self.iterations)
    }
}

/// Cluster weights, cluster-word distributions and final assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureFit {
    pub theta: Vec<f64>,
    pub phi: Matrix<f64>,
    pub doc_cluster: Vec<usize>,
}

/// Cluster statistics over the documents currently assigned.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    vocab_size: usize,
    z: Vec<usize>,
    docs_per_cluster: Vec<u32>,
    cluster_word: Vec<Vec<u32>>,
    cluster_total: Vec<u32>,
}

impl MixtureState {
    /// Counts documents in `z`; `z.len()` must equal `bags.len()`.
    pub fn new(bags: &[WordBag], vocab_size: usize, clusters: usize, z: Vec<usize>) -> Result<Self> {
        if z.len() != bags.len() {
            return Err(Error::invalid("assignments", "one cluster per document"));
        }
        let mut s = MixtureState {
            vocab_size,
            z: vec![0; bags.len()],
            docs_per_cluster: vec![0; clusters],
            cluster_word: vec![vec![0; vocab_size]; clusters],
            cluster_total: vec![0; clusters],
        };
        for (m, (&k, bag)) in z.iter().zip(bags).enumerate() {
            if k >= clusters {
                return Err(Error::invalid("assignments", format!("cluster {k} out of range")));
            }
            s.add(m, k, bag);
        }
        Ok(s)
    }

    pub fn clusters(&self) -> usize {
        self.docs_per_cluster.len()
    }

    pub fn assignments(&self) -> &[usize] {
        &self.z
    }

    pub fn docs_per_cluster(&self) -> &[u32] {
        &self.docs_per_cluster
    }

    /// Documents counted in the state.
    pub fn live_docs(&self) -> u32 {
        self.docs_per_cluster.iter().sum()
    }

    pub fn cluster_word(&self, k: usize) -> &[u32] {
        &self.cluster_word[k]
    }

    pub fn add(&mut self, m: usize, k: usize, bag: &WordBag) {
        self.z[m] = k;
        self.docs_per_cluster[k] += 1;
        for &(v, c) in &bag.words {
            self.cluster_word[k][v] += c;
        }
        self.cluster_total[k] += bag.len;
    }

    pub fn remove(&mut self, m: usize, bag: &WordBag) {
        let k = self.z[m];
        self.docs_per_cluster[k] -= 1;
        for &(v, c) in &bag.words {
            self.cluster_word[k][v] -= c;
        }
        self.cluster_total[k] -= bag.len;
    }

    /// Appends an empty cluster and returns its index.
    pub fn push_cluster(&mut self) -> usize {
        self.docs_per_cluster.push(0);
        self.cluster_word.push(vec![0; self.vocab_size]);
        self.cluster_total.push(0);
        self.clusters() - 1
    }

    /// Deletes cluster `k`, shifting higher indices down. The cluster must hold no documents
    /// other than ones about to be reassigned.
    pub fn remove_cluster(&mut self, k: usize) {
        self.docs_per_cluster.remove(k);
        self.cluster_word.remove(k);
        self.cluster_total.remove(k);
        for z in &mut self.z {
            if *z > k {
                *z -= 1;
            }
        }
    }

    /// Log word term for a document bag joining cluster `k`; `None` is an empty cluster.
    pub fn word_log_term(&self, k: Option<usize>, bag: &WordBag, beta: f64) -> f64 {
        match k {
            Some(k) => bag_log_likelihood(&self.cluster_word[k], self.cluster_total[k], bag, beta),
            None => bag_log_likelihood(&vec![0; self.vocab_size], 0, bag, beta),
        }
    }

    /// Recount check against `bags`.
    pub fn check(&self, bags: &[WordBag]) -> Result<(), String> {
        let mut fresh = MixtureState {
            vocab_size: self.vocab_size,
            z: self.z.clone(),
            docs_per_cluster: vec![0; self.clusters()],
            cluster_word: vec![vec![0; self.vocab_size]; self.clusters()],
            cluster_total: vec![0; self.clusters()],
        };
        for (m, bag) in bags.iter().enumerate() {
            if self.z[m] >= self.clusters() {
                return Err(format!("document {m} in dead cluster {}", self.z[m]));
            }
            fresh.add(m, self.z[m], bag);
        }
        if &fresh != self {
            return Err("cluster statistics disagree with assignments".into());
        }
        Ok(())
    }

    /// `theta_k = (n_k + alpha) / (M + K alpha)`, `phi = (n_k^v + beta) / (n_k^* + V beta)`.
    pub fn estimate(&self, alpha: f64, beta: f64) -> MixtureFit {
        let k_count = self.clusters();
        let denom = f64::from(self.live_docs()) + k_count as f64 * alpha;
        let theta = self.docs_per_cluster.iter().map(|&n| (f64::from(n) + alpha) / denom).collect();
        let mut phi = Matrix::zeros(k_count, self.vocab_size);
        let vbeta = self.vocab_size as f64 * beta;
        for k in 0..k_count {
            let d = f64::from(self.cluster_total[k]) + vbeta;
            for (p, &n) in phi.row_mut(k).iter_mut().zip(&self.cluster_word[k]) {
                *p = (f64::from(n) + beta) / d;
            }
        }
        MixtureFit {
            theta,
            phi,
            doc_cluster: self.z.clone(),
        }
    }
}

fn bags(corpus: &Corpus) -> Vec<WordBag> {
    corpus.docs().iter().map(|d| WordBag::from_tokens(d)).collect()
}

/// Log weights of the finite mixture conditional for a document removed from `state`:
/// `ln((n_k + alpha)/(M-1 + K alpha))` plus the word term.
pub fn dmm_log_weights(state: &MixtureState, bag: &WordBag, hyper: &MixtureHyper, out: &mut [f64]) {
    let k_count = state.clusters();
    let denom = (f64::from(state.live_docs()) + k_count as f64 * hyper.alpha).ln();
    for (k, w) in out.iter_mut().enumerate().take(k_count) {
        *w = (f64::from(state.docs_per_cluster[k]) + hyper.alpha).ln() - denom
            + state.word_log_term(Some(k), bag, hyper.beta);
    }
}

/// Log weights of the Dirichlet process conditional: one entry per live
/// cluster `ln(n_k/(M-1+alpha))` plus its word term, then the new cluster
/// `ln(alpha/(M-1+alpha))` plus the empty-cluster word term.
pub fn dpmm_log_weights(state: &MixtureState, bag: &WordBag, alpha: f64, beta: f64, out: &mut Vec<f64>) {
    out.clear();
    let total = f64::from(state.live_docs()) + alpha;
    // Only reachable with alpha = 0 and no other documents; the shared factor cancels.
    let denom = if total > 0.0 { total.ln() } else { 0.0 };
    for k in 0..state.clusters() {
        out.push(f64::from(state.docs_per_cluster[k]).ln() - denom + state.word_log_term(Some(k), bag, beta));
    }
    out.push(alpha.ln() - denom + state.word_log_term(None, bag, beta));
}

/// Finite mixture sampler with a fixed cluster count.
#[derive(Debug, Clone)]
pub struct Dmm {
    hyper: MixtureHyper,
    bags: Vec<WordBag>,
    state: MixtureState,
    weights: Vec<f64>,
}

impl Dmm {
    pub fn new(corpus: &Corpus, hyper: MixtureHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate(false)?;
        corpus.require_nonempty()?;
        let z = (0..corpus.num_docs()).map(|_| rng.index(hyper.clusters)).collect();
        Self::from_assignments(corpus, hyper, z)
    }

    pub fn from_assignments(corpus: &Corpus, hyper: MixtureHyper, z: Vec<usize>) -> Result<Self> {
        hyper.validate(false)?;
        let bags = bags(corpus);
        let state = MixtureState::new(&bags, corpus.vocab_size(), hyper.clusters, z)?;
        Ok(Dmm {
            hyper,
            bags,
            state,
            weights: vec![0.0; hyper.clusters],
        })
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for m in 0..self.bags.len() {
            self.state.remove(m, &self.bags[m]);
            dmm_log_weights(&self.state, &self.bags[m], &self.hyper, &mut self.weights);
            exp_normalize_max(&mut self.weights);
            let k = sample_categorical(&self.weights, rng)?;
            self.state.add(m, k, &self.bags[m]);
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("dmm", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn state(&self) -> &MixtureState {
        &self.state
    }

    pub fn bags(&self) -> &[WordBag] {
        &self.bags
    }

    pub fn estimate(&self) -> MixtureFit {
        self.state.estimate(self.hyper.alpha, self.hyper.beta)
    }
}

/// Dirichlet process mixture sampler; clusters are born and removed during sweeps.
#[derive(Debug, Clone)]
pub struct Dpmm {
    hyper: MixtureHyper,
    bags: Vec<WordBag>,
    state: MixtureState,
    weights: Vec<f64>,
}

impl Dpmm {
    pub fn new(corpus: &Corpus, hyper: MixtureHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate(true)?;
        corpus.require_nonempty()?;
        let z = (0..corpus.num_docs()).map(|_| rng.index(hyper.clusters)).collect();
        Self::from_assignments(corpus, hyper, z)
    }

    /// Clusters left empty by `z` are dropped.
    pub fn from_assignments(corpus: &Corpus, hyper: MixtureHyper, z: Vec<usize>) -> Result<Self> {
        hyper.validate(true)?;
        let bags = bags(corpus);
        let mut state = MixtureState::new(&bags, corpus.vocab_size(), hyper.clusters, z)?;
        for k in (0..state.clusters()).rev() {
            if state.docs_per_cluster[k] == 0 {
                state.remove_cluster(k);
            }
        }
        Ok(Dpmm {
            hyper,
            bags,
            state,
            weights: Vec::new(),
        })
    }

    /// Reassigns document `m`, removing its old cluster first if it empties.
    pub fn resample_doc(&mut self, m: usize, rng: &mut SeededRng) -> Result<()> {
        self.state.remove(m, &self.bags[m]);
        let old = self.state.z[m];
        if self.state.docs_per_cluster[old] == 0 {
            self.state.remove_cluster(old);
        }
        dpmm_log_weights(&self.state, &self.bags[m], self.hyper.alpha, self.hyper.beta, &mut self.weights);
        let k = if self.weights[..self.weights.len() - 1].iter().all(|&w| w == f64::NEG_INFINITY) {
            // No other cluster is live; the document opens one.
            self.weights.len() - 1
        } else {
            exp_normalize_max(&mut self.weights);
            sample_categorical(&self.weights, rng)?
        };
        let k = if k == self.state.clusters() { self.state.push_cluster() } else { k };
        self.state.add(m, k, &self.bags[m]);
        Ok(())
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for m in 0..self.bags.len() {
            self.resample_doc(m, rng)?;
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("dpmm", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn state(&self) -> &MixtureState {
        &self.state
    }

    pub fn bags(&self) -> &[WordBag] {
        &self.bags
    }

    pub fn estimate(&self) -> MixtureFit {
        self.state.estimate(self.hyper.alpha, self.hyper.beta)
    }
}

pub fn fit_dmm(corpus: &Corpus, hyper: MixtureHyper, rng: &mut SeededRng) -> Result<MixtureFit> {
    let mut s = Dmm::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}

pub fn fit_dpmm(corpus: &Corpus, hyper: MixtureHyper, rng: &mut SeededRng) -> Result<MixtureFit> {
    let mut s = Dpmm::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
