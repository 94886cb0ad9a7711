//! Latent Dirichlet allocation by collapsed Gibbs sampling and by CVB0.

mod cvb0;
mod gibbs;

pub use cvb0::{cvb0_update, fit_cvb0, Cvb0, Responsibilities};
pub use gibbs::{fit_gibbs, gibbs_full_conditional, GibbsSampler};

use crate::counts::{smoothed_rows, Count, Matrix, Tables};
use crate::error::{Error, Result};

/// Symmetric-prior LDA settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaHyper {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
}

impl LdaHyper {
    pub fn new(topics: usize, alpha: f64, beta: f64, iterations: usize) -> Self {
        LdaHyper {
            topics,
            alpha,
            beta,
            iterations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics)?;
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_iterations(self.iterations)
    }
}

pub(crate) fn check_topics(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("topics", "must be at least 1"));
    }
    Ok(())
}

pub(crate) fn check_iterations(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("iterations", "must be at least 1"));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(name, format!("must be a positive number, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(name: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(name, format!("must be non-negative, got {x}")));
    }
    Ok(())
}

/// Document-topic and topic-word distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedLda {
    /// M x K, one topic mixture per document.
    pub theta: Matrix<f64>,
    /// K x V, one word distribution per topic.
    pub phi: Matrix<f64>,
}

impl FittedLda {
    /// `theta = (n_m^k + alpha) / (n_m^* + K alpha)`, `phi = (n_k^v + beta) / (n_k^* + V beta)`.
    pub fn from_tables<T: Count>(tables: &Tables<T>, alpha: f64, beta: f64) -> Self {
        FittedLda {
            theta: smoothed_rows(&tables.doc_topic, alpha),
            phi: smoothed_rows(&tables.topic_word, beta),
        }
    }

    pub fn topics(&self) -> usize {
        self.phi.rows()
    }
}
