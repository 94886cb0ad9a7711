//! Models for short documents: pseudo-document pooling and biterms.

mod btm;
mod ptm;

pub use btm::{
    btm_full_conditional, doc_topic_from_biterms, extract_biterms, fit_btm, Biterm, Btm, BtmFit, BtmHyper,
};
pub use ptm::{fit_ptm, ptm_pseudo_log_weights, ptm_topic_weights, Ptm, PtmFit, PtmHyper};
