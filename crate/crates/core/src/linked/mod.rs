//! Models coupled to per-document metadata: authors and citation links.

mod atm;
mod link_lda;

pub use atm::{atm_full_conditional, fit_atm, Atm, AtmFit};
pub use link_lda::{fit_link_lda, link_conditional, word_conditional, LinkLda, LinkLdaFit, LinkLdaHyper};
