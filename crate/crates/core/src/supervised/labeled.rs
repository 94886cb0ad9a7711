use crate::corpus::Corpus;
use crate::counts::{smoothed_rows, CountTables};
use crate::error::{Error, Result};
use crate::lda::{FittedLda, LdaHyper};
use crate::sampling::SeededRng;

use super::{labels, Constrained};

/// Topic weights restricted to the document's labels, token excluded, zero elsewhere:
/// `(n_k^v+beta)/(n_k^*+V beta) (n_m^k+alpha) / sum_{k' in labels} (n_m^k'+alpha)`.
pub fn labeled_full_conditional(
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
    let doc_denom: f64 = admissible.iter().map(|&k| f64::from(tables.doc_topic.get(m, k)) + alpha).sum();
    for &k in admissible {
        out[k] = (f64::from(tables.topic_word.get(k, v)) + beta) / (f64::from(tables.topic_total[k]) + vbeta)
            * (f64::from(tables.doc_topic.get(m, k)) + alpha)
            / doc_denom;
    }
}

/// Labeled LDA: one topic per distinct label, each token restricted to its document's labels.
#[derive(Debug, Clone)]
pub struct LabeledLda<'c> {
    state: Constrained<'c>,
    alpha: f64,
    beta: f64,
    iterations: usize,
}

impl<'c> LabeledLda<'c> {
    /// `hyper.topics` is ignored; the label count sets K.
    pub fn new(corpus: &'c Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<Self> {
        let (k, admissible) = Self::admissible(corpus, &hyper)?;
        let state = Constrained::random(corpus, k, admissible, rng)?;
        Ok(Self::wrap(state, hyper))
    }

    pub fn from_assignments(corpus: &'c Corpus, hyper: LdaHyper, z: Vec<Vec<usize>>) -> Result<Self> {
        let (k, admissible) = Self::admissible(corpus, &hyper)?;
        let state = Constrained::with_assignments(corpus, k, admissible, z)?;
        Ok(Self::wrap(state, hyper))
    }

    fn admissible(corpus: &Corpus, hyper: &LdaHyper) -> Result<(usize, Vec<Vec<usize>>)> {
        LdaHyper { topics: 1, ..*hyper }.validate()?;
        let labels = labels(corpus)?;
        if let Some(m) = labels.docs.iter().position(Vec::is_empty) {
            return Err(Error::Domain(format!("document {m} has no labels")));
        }
        Ok((labels.vocab.len(), labels.docs.clone()))
    }

    fn wrap(state: Constrained<'c>, hyper: LdaHyper) -> Self {
        LabeledLda {
            state,
            alpha: hyper.alpha,
            beta: hyper.beta,
            iterations: hyper.iterations,
        }
    }

    pub fn topics(&self) -> usize {
        self.state.tables.topics()
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.state.z
    }

    pub fn tables(&self) -> &CountTables {
        &self.state.tables
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        let (alpha, beta) = (self.alpha, self.beta);
        self.state
            .sweep(rng, |t, m, v, adm, out| labeled_full_conditional(t, m, v, adm, alpha, beta, out))
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.iterations {
            self.sweep(rng)?;
            crate::progress("labeled-lda", it + 1, self.iterations);
        }
        Ok(())
    }

    /// Theta is zero outside each document's labels.
    pub fn estimate(&self) -> FittedLda {
        FittedLda {
            theta: self.state.theta(self.alpha),
            phi: smoothed_rows(&self.state.tables.topic_word, self.beta),
        }
    }
}

pub fn fit_labeled(corpus: &Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<FittedLda> {
    let mut s = LabeledLda::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
