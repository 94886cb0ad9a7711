use crate::corpus::Corpus;
use crate::counts::{counts_from_assignments, CountTables};
use crate::error::Result;
use crate::sampling::{sample_categorical, SeededRng};

use super::{FittedLda, LdaHyper};

/// Unnormalized full conditional of one token's topic.
///
/// `tables` must already exclude the token. Writes
/// `(n_m^k + alpha) / (n_m^* + K alpha) * (n_k^v + beta) / (n_k^* + V beta)` into `out`.
pub fn gibbs_full_conditional(
    tables: &CountTables,
    m: usize,
    v: usize,
    hyper: &LdaHyper,
    out: &mut [f64],
) {
    let k_count = tables.topics();
    let vbeta = tables.vocab_size() as f64 * hyper.beta;
    let doc_denom = f64::from(tables.doc_total[m]) + k_count as f64 * hyper.alpha;
    let doc_row = tables.doc_topic.row(m);
    for (k, w) in out.iter_mut().enumerate().take(k_count) {
        let doc = (f64::from(doc_row[k]) + hyper.alpha) / doc_denom;
        let word = (f64::from(tables.topic_word.get(k, v)) + hyper.beta)
            / (f64::from(tables.topic_total[k]) + vbeta);
        *w = doc * word;
    }
}

/// Collapsed Gibbs sampler state for LDA.
#[derive(Debug, Clone)]
pub struct GibbsSampler<'c> {
    corpus: &'c Corpus,
    hyper: LdaHyper,
    z: Vec<Vec<usize>>,
    tables: CountTables,
    weights: Vec<f64>,
}

impl<'c> GibbsSampler<'c> {
    /// Assigns every token a uniformly random topic.
    pub fn new(corpus: &'c Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let z = corpus
            .docs()
            .iter()
            .map(|d| d.iter().map(|_| rng.index(hyper.topics)).collect())
            .collect();
        Self::from_assignments(corpus, hyper, z)
    }

    /// Starts from the given assignments.
    pub fn from_assignments(corpus: &'c Corpus, hyper: LdaHyper, z: Vec<Vec<usize>>) -> Result<Self> {
        hyper.validate()?;
        let tables = counts_from_assignments(corpus.docs(), corpus.vocab_size(), hyper.topics, &z)?;
        Ok(GibbsSampler {
            corpus,
            hyper,
            z,
            tables,
            weights: vec![0.0; hyper.topics],
        })
    }

    /// Resamples every token once, documents and positions in order.
    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                let old = self.z[m][n];
                self.tables.remove(m, old, v, 1);
                gibbs_full_conditional(&self.tables, m, v, &self.hyper, &mut self.weights);
                let new = sample_categorical(&self.weights, rng)?;
                self.tables.add(m, new, v, 1);
                self.z[m][n] = new;
            }
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("lda-gibbs", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.z
    }

    pub fn tables(&self) -> &CountTables {
        &self.tables
    }

    pub fn hyper(&self) -> &LdaHyper {
        &self.hyper
    }

    /// Point estimates from the current counts.
    pub fn estimate(&self) -> FittedLda {
        FittedLda::from_tables(&self.tables, self.hyper.alpha, self.hyper.beta)
    }
}

/// Runs `hyper.iterations` sweeps from a random start and returns the final estimates.
pub fn fit_gibbs(corpus: &Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<FittedLda> {
    let mut sampler = GibbsSampler::new(corpus, hyper, rng)?;
    sampler.run(rng)?;
    Ok(sampler.estimate())
}
