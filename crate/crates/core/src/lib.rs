//! Topic models over an indexed text corpus.
//!
//! Thirteen inference algorithms share one [`corpus::Corpus`] type, the count
//! tables in [`counts`] and the seeded sampler primitives in [`sampling`]:
//!
//! | model | module | inference |
//! |---|---|---|
//! | LDA | [`lda`] | collapsed Gibbs, CVB0 |
//! | Sentence-LDA | [`sentence_lda`] | collapsed Gibbs |
//! | HDP | [`hdp`] | Chinese restaurant franchise |
//! | DMM, DPMM | [`mixture`] | collapsed Gibbs |
//! | PTM, BTM | [`short_text`] | collapsed Gibbs |
//! | author-topic, Link LDA | [`linked`] | collapsed Gibbs |
//! | Labeled LDA, PLDA | [`supervised`] | collapsed Gibbs |
//! | dual-sparse | [`dual_sparse`] | CVB0 |
//!
//! [`eval`] scores topics by document co-occurrence coherence, [`report`]
//! reads and writes the text output formats and [`run`] ties a
//! configuration to the files a fit produces.
//!
//! ```
//! use topicmodel::corpus::parse_plain;
//! use topicmodel::lda::{fit_gibbs, LdaHyper};
//! use topicmodel::sampling::SeededRng;
//!
//! let corpus = parse_plain(["apple banana apple", "car engine car", "banana apple"]).unwrap();
//! let mut rng = SeededRng::from_u64(7);
//! let fit = fit_gibbs(&corpus, LdaHyper::new(2, 0.1, 0.01, 50), &mut rng).unwrap();
//! assert_eq!(fit.theta.rows(), 3);
//! assert!(fit.phi.max_row_sum_error() < 1e-9);
//! ```

pub mod corpus;
pub mod counts;
pub mod dual_sparse;
pub mod error;
pub mod eval;
pub mod hdp;
pub mod lda;
pub mod linked;
pub mod mixture;
pub mod report;
pub mod run;
pub mod sampling;
pub mod sentence_lda;
pub mod short_text;
pub mod supervised;

pub use error::{Error, Result};

/// Logs sampler progress every 100 iterations and at the last one.
pub(crate) fn progress(model: &str, done: usize, total: usize) {
    if done % 100 == 0 || done == total {
        log::info!("{model}: iteration {done}/{total}");
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub struct Intro;
    #[doc = include_str!("../../../book/src/corpus.md")]
    pub struct CorpusChapter;
    #[doc = include_str!("../../../book/src/lda.md")]
    pub struct LdaChapter;
    #[doc = include_str!("../../../book/src/sentence_lda.md")]
    pub struct SentenceLdaChapter;
    #[doc = include_str!("../../../book/src/hdp.md")]
    pub struct HdpChapter;
    #[doc = include_str!("../../../book/src/mixtures.md")]
    pub struct MixturesChapter;
    #[doc = include_str!("../../../book/src/short_text.md")]
    pub struct ShortTextChapter;
    #[doc = include_str!("../../../book/src/linked.md")]
    pub struct LinkedChapter;
    #[doc = include_str!("../../../book/src/supervised.md")]
    pub struct SupervisedChapter;
    #[doc = include_str!("../../../book/src/dual_sparse.md")]
    pub struct DualSparseChapter;
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub struct EvaluationChapter;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct CliChapter;
}
