//! Label-constrained topic models: Labeled LDA and PLDA.

mod labeled;
mod plda;

pub use labeled::{fit_labeled, labeled_full_conditional, LabeledLda};
pub use plda::{fit_plda, plda_full_conditional, Plda, PldaFit, PldaHyper, TopicLabel};

use crate::corpus::Corpus;
use crate::counts::{CountTables, Matrix};
use crate::error::{Error, Result};
use crate::sampling::{sample_categorical, SeededRng};

/// Gibbs state whose tokens may only take topics from their document's admissible set.
#[derive(Debug, Clone)]
struct Constrained<'c> {
    corpus: &'c Corpus,
    admissible: Vec<Vec<usize>>,
    z: Vec<Vec<usize>>,
    tables: CountTables,
    weights: Vec<f64>,
}

impl<'c> Constrained<'c> {
    fn random(corpus: &'c Corpus, topics: usize, admissible: Vec<Vec<usize>>, rng: &mut SeededRng) -> Result<Self> {
        let z = corpus
            .docs()
            .iter()
            .zip(&admissible)
            .map(|(d, a)| d.iter().map(|_| a[rng.index(a.len())]).collect())
            .collect();
        Self::with_assignments(corpus, topics, admissible, z)
    }

    fn with_assignments(corpus: &'c Corpus, topics: usize, admissible: Vec<Vec<usize>>, z: Vec<Vec<usize>>) -> Result<Self> {
        let tables = crate::counts::counts_from_assignments(corpus.docs(), corpus.vocab_size(), topics, &z)?;
        for (m, zs) in z.iter().enumerate() {
            if let Some(k) = zs.iter().find(|k| !admissible[m].contains(k)) {
                return Err(Error::invalid("assignments", format!("topic {k} not admissible in document {m}")));
            }
        }
        Ok(Constrained {
            corpus,
            admissible,
            z,
            tables,
            weights: vec![0.0; topics],
        })
    }

    fn sweep<F>(&mut self, rng: &mut SeededRng, conditional: F) -> Result<()>
    where
        F: Fn(&CountTables, usize, usize, &[usize], &mut [f64]),
    {
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                let old = self.z[m][n];
                self.tables.remove(m, old, v, 1);
                conditional(&self.tables, m, v, &self.admissible[m], &mut self.weights);
                let k = sample_categorical(&self.weights, rng)?;
                self.tables.add(m, k, v, 1);
                self.z[m][n] = k;
            }
        }
        Ok(())
    }

    /// `theta_m^k = (n_m^k + alpha) / (N_m + |adm_m| alpha)` on the admissible set, zero elsewhere.
    fn theta(&self, alpha: f64) -> Matrix<f64> {
        let k_count = self.tables.topics();
        let mut theta = Matrix::zeros(self.corpus.num_docs(), k_count);
        for (m, adm) in self.admissible.iter().enumerate() {
            let denom = f64::from(self.tables.doc_total[m]) + adm.len() as f64 * alpha;
            for &k in adm {
                theta.set(m, k, (f64::from(self.tables.doc_topic.get(m, k)) + alpha) / denom);
            }
        }
        theta
    }
}

fn labels(corpus: &Corpus) -> Result<&crate::corpus::Tags> {
    corpus.require_nonempty()?;
    corpus.labels().ok_or(Error::MissingStructure("label lists"))
}
