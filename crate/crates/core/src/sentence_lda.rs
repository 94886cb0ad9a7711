//! Sentence-LDA: all words of a sentence share one topic.

use crate::corpus::Corpus;
use crate::counts::{bag_log_likelihood, CountTables, WordBag};
use crate::error::{Error, Result};
use crate::lda::{FittedLda, LdaHyper};
use crate::sampling::{exp_normalize_max, sample_categorical, SeededRng};

/// Log of the unnormalized sentence-topic conditional.
///
/// `tables` must exclude the sentence. For each topic writes
/// `ln((n_m^k+a)/(n_m^*+Ka)) + sum_w lnRF(n_k^w+b, N^w) - lnRF(n_k^*+Vb, N)`
/// where `lnRF` is the log rising factorial.
pub fn sentence_log_weights(
    tables: &CountTables,
    m: usize,
    sentence: &WordBag,
    hyper: &LdaHyper,
    out: &mut [f64],
) {
    let k_count = tables.topics();
    let doc_denom = (f64::from(tables.doc_total[m]) + k_count as f64 * hyper.alpha).ln();
    for (k, w) in out.iter_mut().enumerate().take(k_count) {
        *w = (f64::from(tables.doc_topic.get(m, k)) + hyper.alpha).ln() - doc_denom
            + bag_log_likelihood(tables.topic_word.row(k), tables.topic_total[k], sentence, hyper.beta);
    }
}

/// Collapsed Gibbs sampler over sentence topics.
#[derive(Debug, Clone)]
pub struct SentenceLda<'c> {
    corpus: &'c Corpus,
    hyper: LdaHyper,
    sentences: Vec<Vec<WordBag>>,
    bounds: &'c [Vec<usize>],
    z: Vec<Vec<usize>>,
    tables: CountTables,
    weights: Vec<f64>,
}

impl<'c> SentenceLda<'c> {
    pub fn new(corpus: &'c Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<Self> {
        let bounds = corpus
            .sentences()
            .ok_or(Error::MissingStructure("sentence boundaries"))?;
        let z = bounds
            .iter()
            .map(|b| (1..b.len()).map(|_| rng.index(hyper.topics.max(1))).collect())
            .collect();
        Self::from_assignments(corpus, hyper, z)
    }

    /// Starts from given per-sentence topics.
    pub fn from_assignments(corpus: &'c Corpus, hyper: LdaHyper, z: Vec<Vec<usize>>) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let bounds = corpus
            .sentences()
            .ok_or(Error::MissingStructure("sentence boundaries"))?;
        let mut tables = CountTables::zeros(corpus.num_docs(), hyper.topics, corpus.vocab_size());
        let mut sentences = Vec::with_capacity(corpus.num_docs());
        if z.len() != corpus.num_docs() {
            return Err(Error::invalid("assignments", "one list per document"));
        }
        for (m, (doc, b)) in corpus.docs().iter().zip(bounds).enumerate() {
            if z[m].len() + 1 != b.len() {
                return Err(Error::invalid("assignments", format!("sentence count mismatch in document {m}")));
            }
            let mut doc_sentences = Vec::with_capacity(b.len() - 1);
            for (s, w) in b.windows(2).enumerate() {
                let k = z[m][s];
                if k >= hyper.topics {
                    return Err(Error::invalid("assignments", format!("topic {k} out of range")));
                }
                for &v in &doc[w[0]..w[1]] {
                    tables.add(m, k, v, 1);
                }
                doc_sentences.push(WordBag::from_tokens(&doc[w[0]..w[1]]));
            }
            sentences.push(doc_sentences);
        }
        Ok(SentenceLda {
            corpus,
            hyper,
            sentences,
            bounds,
            z,
            tables,
            weights: vec![0.0; hyper.topics],
        })
    }

    fn move_sentence(&mut self, m: usize, s: usize, k: usize, add: bool) {
        let (lo, hi) = (self.bounds[m][s], self.bounds[m][s + 1]);
        for &v in &self.corpus.docs()[m][lo..hi] {
            if add {
                self.tables.add(m, k, v, 1);
            } else {
                self.tables.remove(m, k, v, 1);
            }
        }
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for m in 0..self.z.len() {
            for s in 0..self.z[m].len() {
                let old = self.z[m][s];
                self.move_sentence(m, s, old, false);
                sentence_log_weights(&self.tables, m, &self.sentences[m][s], &self.hyper, &mut self.weights);
                exp_normalize_max(&mut self.weights);
                let new = sample_categorical(&self.weights, rng)?;
                self.move_sentence(m, s, new, true);
                self.z[m][s] = new;
            }
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("sentence-lda", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.z
    }

    pub fn tables(&self) -> &CountTables {
        &self.tables
    }

    /// Sentence word multisets, per document.
    pub fn sentences(&self) -> &[Vec<WordBag>] {
        &self.sentences
    }

    /// Theta counts tokens, not sentences.
    pub fn estimate(&self) -> FittedLda {
        FittedLda::from_tables(&self.tables, self.hyper.alpha, self.hyper.beta)
    }
}

pub fn fit(corpus: &Corpus, hyper: LdaHyper, rng: &mut SeededRng) -> Result<FittedLda> {
    let mut s = SentenceLda::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
