use crate::corpus::Corpus;
use crate::counts::{smoothed_rows, CountTables, Matrix};
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_positive, check_topics};
use crate::sampling::SeededRng;

use super::{labels, Constrained};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PldaHyper {
    /// Latent topics per label, background included.
    pub topics_per_label: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Adds a label present on every document.
    pub background: bool,
    pub iterations: usize,
}

impl PldaHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics_per_label)?;
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_iterations(self.iterations)
    }
}

/// Owner of a latent topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopicLabel {
    Label(usize),
    Background,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PldaFit {
    /// M x K, zero outside each document's label blocks.
    pub theta: Matrix<f64>,
    pub phi: Matrix<f64>,
    /// Owner of each topic; topic `l * K_l + j` belongs to label `l`, background last.
    pub topic_labels: Vec<TopicLabel>,
}

/// Cell weights over admissible (label, topic) pairs, token excluded, zero elsewhere:
/// `(n_m^(l,k)+alpha) (n_(l,k)^v+beta)/(n_(l,k)^*+V beta)`.
pub fn plda_full_conditional(
    tables: &CountTables,
    m: usize,
    v: usize,
    admissible: &[usize],
    alpha: f64,
    beta: f64,
    out: &mut [f64],
) {
    out.fill(0.0);
    let vbeta = tables.vocab_size() as f64 * beta;
    for &k in admissible {
        out[k] = (f64::from(tables.doc_topic.get(m, k)) + alpha) * (f64::from(tables.topic_word.get(k, v)) + beta)
            / (f64::from(tables.topic_total[k]) + vbeta);
    }
}

/// PLDA: each label owns a block of topics; an optional background block is open to every document.
#[derive(Debug, Clone)]
pub struct Plda<'c> {
    state: Constrained<'c>,
    hyper: PldaHyper,
    topic_labels: Vec<TopicLabel>,
}

impl<'c> Plda<'c> {
    pub fn new(corpus: &'c Corpus, hyper: PldaHyper, rng: &mut SeededRng) -> Result<Self> {
        let (topic_labels, admissible) = Self::layout(corpus, &hyper)?;
        let state = Constrained::random(corpus, topic_labels.len(), admissible, rng)?;
        Ok(Plda {
            state,
            hyper,
            topic_labels,
        })
    }

    pub fn from_assignments(corpus: &'c Corpus, hyper: PldaHyper, z: Vec<Vec<usize>>) -> Result<Self> {
        let (topic_labels, admissible) = Self::layout(corpus, &hyper)?;
        let state = Constrained::with_assignments(corpus, topic_labels.len(), admissible, z)?;
        Ok(Plda {
            state,
            hyper,
            topic_labels,
        })
    }

    fn layout(corpus: &Corpus, hyper: &PldaHyper) -> Result<(Vec<TopicLabel>, Vec<Vec<usize>>)> {
        hyper.validate()?;
        let labels = labels(corpus)?;
        let kl = hyper.topics_per_label;
        let l_count = labels.vocab.len();
        let mut owners: Vec<TopicLabel> = (0..l_count).flat_map(|l| std::iter::repeat(TopicLabel::Label(l)).take(kl)).collect();
        if hyper.background {
            owners.extend(std::iter::repeat(TopicLabel::Background).take(kl));
        }
        let mut admissible = Vec::with_capacity(labels.docs.len());
        for (m, doc_labels) in labels.docs.iter().enumerate() {
            let mut adm: Vec<usize> = doc_labels.iter().flat_map(|&l| l * kl..(l + 1) * kl).collect();
            if hyper.background {
                adm.extend(l_count * kl..(l_count + 1) * kl);
            }
            if adm.is_empty() {
                return Err(Error::Domain(format!("document {m} has no labels and background is off")));
            }
            adm.sort_unstable();
            admissible.push(adm);
        }
        Ok((owners, admissible))
    }

    pub fn topics(&self) -> usize {
        self.topic_labels.len()
    }

    pub fn topic_labels(&self) -> &[TopicLabel] {
        &self.topic_labels
    }

    /// Sorted admissible topics of document `m`.
    pub fn admissible(&self, m: usize) -> &[usize] {
        &self.state.admissible[m]
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.state.z
    }

    pub fn tables(&self) -> &CountTables {
        &self.state.tables
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        let (alpha, beta) = (self.hyper.alpha, self.hyper.beta);
        self.state
            .sweep(rng, |t, m, v, adm, out| plda_full_conditional(t, m, v, adm, alpha, beta, out))
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("plda", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn estimate(&self) -> PldaFit {
        PldaFit {
            theta: self.state.theta(self.hyper.alpha),
            phi: smoothed_rows(&self.state.tables.topic_word, self.hyper.beta),
            topic_labels: self.topic_labels.clone(),
        }
    }
}

pub fn fit_plda(corpus: &Corpus, hyper: PldaHyper, rng: &mut SeededRng) -> Result<PldaFit> {
    let mut s = Plda::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
