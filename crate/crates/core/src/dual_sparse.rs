//! Dual-sparse topic model fitted by CVB0 with spike-and-slab topic and word selectors.

use crate::corpus::Corpus;
use crate::counts::{ExpectedTables, Matrix};
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_nonnegative, check_positive, check_topics, Responsibilities};
use crate::sampling::{ln_beta, ln_gamma, normalize, SeededRng};

/// Selectors are kept strictly inside (0, 1) by this margin.
pub const SELECTOR_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseHyper {
    pub topics: usize,
    /// Beta prior of the per-document topic selector rate.
    pub s: f64,
    pub t: f64,
    /// Beta prior of the per-topic word selector rate.
    pub x: f64,
    pub y: f64,
    /// Strong and weak topic smoothing.
    pub pi: f64,
    pub pi_bar: f64,
    /// Strong and weak word smoothing.
    pub gamma: f64,
    pub gamma_bar: f64,
    pub iterations: usize,
}

impl SparseHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.topics)?;
        for (name, v) in [("s", self.s), ("t", self.t), ("x", self.x), ("y", self.y), ("pi", self.pi), ("gamma", self.gamma)] {
            check_positive(name, v)?;
        }
        check_nonnegative("pi_bar", self.pi_bar)?;
        check_nonnegative("gamma_bar", self.gamma_bar)?;
        if self.pi_bar >= self.pi {
            return Err(Error::invalid("pi_bar", "must be below pi"));
        }
        if self.gamma_bar >= self.gamma {
            return Err(Error::invalid("gamma_bar", "must be below gamma"));
        }
        check_iterations(self.iterations)
    }
}

/// Starting values of the selector means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectorInit {
    /// 0.5 everywhere.
    Midpoint,
    /// Uniform in (0, 1].
    Random,
    /// A fixed value in (0, 1].
    Constant(f64),
}

/// Log odds of a topic selector being on, with `a_excl` the document's
/// selector sum without this topic:
/// `ln(s+A) + lnG(n_mk+pi+pib) + lnB(pi+K pib+pi A, n_m+pi A+K pib)`
/// minus `ln(t+K-1-A) + lnG(pi+pib) + lnB(K pib+pi A, n_m+pi+pi A+K pib)`.
pub fn alpha_selector_log_odds(h: &SparseHyper, n_mk: f64, n_m: f64, a_excl: f64) -> f64 {
    selector_log_odds(h.s, h.t, h.pi, h.pi_bar, h.topics as f64, n_mk, n_m, a_excl)
}

/// Word-selector counterpart of [`alpha_selector_log_odds`] with
/// `(x, y, gamma, gamma_bar, V)` and `b_excl` the topic's selector sum without this word.
pub fn beta_selector_log_odds(h: &SparseHyper, vocab_size: usize, n_kv: f64, n_k: f64, b_excl: f64) -> f64 {
    selector_log_odds(h.x, h.y, h.gamma, h.gamma_bar, vocab_size as f64, n_kv, n_k, b_excl)
}

#[allow(clippy::too_many_arguments)]
fn selector_log_odds(on: f64, off: f64, strong: f64, weak: f64, size: f64, n: f64, total: f64, excl: f64) -> f64 {
    let spread = strong * excl + size * weak;
    let one = (on + excl).ln() + ln_gamma(n + strong + weak) + ln_beta(strong + spread, total + spread);
    let zero = (off + size - 1.0 - excl).ln() + ln_gamma(strong + weak) + ln_beta(spread, total + strong + spread);
    one - zero
}

fn selector_from_log_odds(log_odds: f64) -> Option<f64> {
    if log_odds.is_nan() {
        return None;
    }
    let p = 1.0 / (1.0 + (-log_odds).exp());
    Some(p.clamp(SELECTOR_MARGIN, 1.0 - SELECTOR_MARGIN))
}

/// Unnormalized responsibilities of one token, token excluded from `tables`:
/// `(n_m^k+pi a_mk+pib)(n_k^v+gamma b_kv+gb)/(n_k^*+gamma B_k+V gb)`.
pub fn kappa_update(
    tables: &ExpectedTables,
    alpha_hat: &[f64],
    beta_hat: &Matrix<f64>,
    b_hat: &[f64],
    m: usize,
    v: usize,
    h: &SparseHyper,
    out: &mut [f64],
) {
    let vgb = tables.vocab_size() as f64 * h.gamma_bar;
    for (k, g) in out.iter_mut().enumerate() {
        *g = (tables.doc_topic.get(m, k) + h.pi * alpha_hat[k] + h.pi_bar)
            * (tables.topic_word.get(k, v) + h.gamma * beta_hat.get(k, v) + h.gamma_bar)
            / (tables.topic_total[k] + h.gamma * b_hat[k] + vgb);
    }
}

/// Point estimates and sparsity ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFit {
    pub theta: Matrix<f64>,
    pub phi: Matrix<f64>,
    /// `1 - A_m / K` per document.
    pub doc_sparsity: Vec<f64>,
    /// `1 - B_k / V` per topic.
    pub topic_sparsity: Vec<f64>,
    pub avg_doc_sparsity: f64,
    pub avg_topic_sparsity: f64,
}

/// CVB0 state: token responsibilities plus selector means.
#[derive(Debug, Clone)]
pub struct DualSparse<'c> {
    corpus: &'c Corpus,
    hyper: SparseHyper,
    kappa: Responsibilities,
    tables: ExpectedTables,
    alpha_hat: Matrix<f64>,
    beta_hat: Matrix<f64>,
    a_hat: Vec<f64>,
    b_hat: Vec<f64>,
    update_selectors: bool,
    scratch: Vec<f64>,
}

impl<'c> DualSparse<'c> {
    /// Random responsibilities, midpoint selectors.
    pub fn new(corpus: &'c Corpus, hyper: SparseHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let kappa = Responsibilities::random(corpus, hyper.topics, rng);
        Self::with_state(corpus, hyper, kappa, SelectorInit::Midpoint, true, rng)
    }

    /// Explicit starting state. With `update_selectors` off the selectors stay
    /// at their initial values, which may then be exactly 1.
    pub fn with_state(
        corpus: &'c Corpus,
        hyper: SparseHyper,
        kappa: Responsibilities,
        init: SelectorInit,
        update_selectors: bool,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let (k_count, v_size) = (hyper.topics, corpus.vocab_size());
        if kappa.topics() != k_count || kappa.as_slice().len() != corpus.num_tokens() * k_count {
            return Err(Error::invalid("responsibilities", "shape does not match corpus and topics"));
        }
        let draw = |rng: &mut SeededRng| -> Result<f64> {
            let value = match init {
                SelectorInit::Midpoint => 0.5,
                SelectorInit::Random => 1.0 - rng.uniform(),
                SelectorInit::Constant(c) if c > 0.0 && c <= 1.0 => c,
                SelectorInit::Constant(c) => return Err(Error::invalid("selector", format!("{c} is outside (0, 1]"))),
            };
            Ok(if update_selectors { value.clamp(SELECTOR_MARGIN, 1.0 - SELECTOR_MARGIN) } else { value })
        };
        let mut alpha_hat = Matrix::zeros(corpus.num_docs(), k_count);
        for m in 0..corpus.num_docs() {
            for k in 0..k_count {
                alpha_hat.set(m, k, draw(rng)?);
            }
        }
        let mut beta_hat = Matrix::zeros(k_count, v_size);
        for k in 0..k_count {
            for v in 0..v_size {
                beta_hat.set(k, v, draw(rng)?);
            }
        }
        let a_hat = alpha_hat.iter_rows().map(|r| r.iter().sum()).collect();
        let b_hat = beta_hat.iter_rows().map(|r| r.iter().sum()).collect();
        let tables = kappa.expected_tables(corpus);
        Ok(DualSparse {
            corpus,
            hyper,
            kappa,
            tables,
            alpha_hat,
            beta_hat,
            a_hat,
            b_hat,
            update_selectors,
            scratch: vec![0.0; k_count],
        })
    }

    pub fn update_alpha(&mut self, m: usize, k: usize) -> Result<()> {
        let excl = self.a_hat[m] - self.alpha_hat.get(m, k);
        let lo = alpha_selector_log_odds(&self.hyper, self.tables.doc_topic.get(m, k), self.tables.doc_total[m], excl);
        let a = selector_from_log_odds(lo)
            .ok_or_else(|| Error::Numerical(format!("topic selector of document {m}, topic {k} is NaN")))?;
        self.alpha_hat.set(m, k, a);
        self.a_hat[m] = excl + a;
        Ok(())
    }

    pub fn update_beta(&mut self, k: usize, v: usize) -> Result<()> {
        let excl = self.b_hat[k] - self.beta_hat.get(k, v);
        let lo = beta_selector_log_odds(
            &self.hyper,
            self.corpus.vocab_size(),
            self.tables.topic_word.get(k, v),
            self.tables.topic_total[k],
            excl,
        );
        let b = selector_from_log_odds(lo)
            .ok_or_else(|| Error::Numerical(format!("word selector of topic {k}, word {v} is NaN")))?;
        self.beta_hat.set(k, v, b);
        self.b_hat[k] = excl + b;
        Ok(())
    }

    fn update_kappas(&mut self) -> Result<()> {
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            for (n, &v) in doc.iter().enumerate() {
                for (k, &g) in self.kappa.token(m, n).iter().enumerate() {
                    self.tables.remove(m, k, v, g);
                }
                kappa_update(
                    &self.tables,
                    self.alpha_hat.row(m),
                    &self.beta_hat,
                    &self.b_hat,
                    m,
                    v,
                    &self.hyper,
                    &mut self.scratch,
                );
                let total: f64 = self.scratch.iter().sum();
                if !(total > 0.0 && total.is_finite()) {
                    return Err(Error::Numerical(format!("responsibilities of token ({m}, {n}) sum to {total}")));
                }
                normalize(&mut self.scratch);
                self.kappa.token_mut(m, n).copy_from_slice(&self.scratch);
                for (k, &g) in self.scratch.iter().enumerate() {
                    self.tables.add(m, k, v, g);
                }
            }
        }
        Ok(())
    }

    /// All topic selectors, then all word selectors, then every token.
    pub fn sweep(&mut self) -> Result<()> {
        if self.update_selectors {
            for m in 0..self.corpus.num_docs() {
                for k in 0..self.hyper.topics {
                    self.update_alpha(m, k)?;
                }
            }
            for k in 0..self.hyper.topics {
                for v in 0..self.corpus.vocab_size() {
                    self.update_beta(k, v)?;
                }
            }
        }
        self.update_kappas()
    }

    pub fn run(&mut self) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep()?;
            crate::progress("dual-sparse", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    pub fn kappa(&self) -> &Responsibilities {
        &self.kappa
    }

    pub fn tables(&self) -> &ExpectedTables {
        &self.tables
    }

    pub fn alpha_hat(&self) -> &Matrix<f64> {
        &self.alpha_hat
    }

    pub fn beta_hat(&self) -> &Matrix<f64> {
        &self.beta_hat
    }

    pub fn a_hat(&self) -> &[f64] {
        &self.a_hat
    }

    pub fn b_hat(&self) -> &[f64] {
        &self.b_hat
    }

    pub fn estimate(&self) -> SparseFit {
        let h = &self.hyper;
        let (m_count, k_count, v_size) = (self.corpus.num_docs(), h.topics, self.corpus.vocab_size());
        let mut theta = Matrix::zeros(m_count, k_count);
        for m in 0..m_count {
            let denom = self.tables.doc_total[m] + h.pi * self.a_hat[m] + k_count as f64 * h.pi_bar;
            for k in 0..k_count {
                theta.set(m, k, (self.tables.doc_topic.get(m, k) + h.pi * self.alpha_hat.get(m, k) + h.pi_bar) / denom);
            }
        }
        let mut phi = Matrix::zeros(k_count, v_size);
        for k in 0..k_count {
            let denom = self.tables.topic_total[k] + h.gamma * self.b_hat[k] + v_size as f64 * h.gamma_bar;
            for v in 0..v_size {
                phi.set(k, v, (self.tables.topic_word.get(k, v) + h.gamma * self.beta_hat.get(k, v) + h.gamma_bar) / denom);
            }
        }
        let doc_sparsity: Vec<f64> = self.a_hat.iter().map(|a| 1.0 - a / k_count as f64).collect();
        let topic_sparsity: Vec<f64> = self.b_hat.iter().map(|b| 1.0 - b / v_size as f64).collect();
        SparseFit {
            theta,
            phi,
            avg_doc_sparsity: doc_sparsity.iter().sum::<f64>() / m_count as f64,
            avg_topic_sparsity: topic_sparsity.iter().sum::<f64>() / k_count as f64,
            doc_sparsity,
            topic_sparsity,
        }
    }
}

pub fn fit(corpus: &Corpus, hyper: SparseHyper, rng: &mut SeededRng) -> Result<SparseFit> {
    let mut s = DualSparse::new(corpus, hyper, rng)?;
    s.run()?;
    Ok(s.estimate())
}
