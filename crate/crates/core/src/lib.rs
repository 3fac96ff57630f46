//! Hypernym extraction from a flat list of domain terms and a large corpus.
//!
//! The pipeline has four stages:
//!
//! 1. [`ingest`]: stream article bodies out of a wiki dump, split them into
//!    sentences and tokens, then stem and mask stopwords ([`normalize`]).
//! 2. [`cooc`]: recognize catalog terms ([`catalog`]) in the normalized
//!    sentences and count document frequency and sentence co-occurrence.
//! 3. [`rules`] and [`select`]: propose hypernyms from surface containment
//!    and from co-occurrence with more widespread terms.
//! 4. [`eval`]: score the result against a gold standard and report cycles.

pub mod catalog;
pub mod cli;
pub mod cooc;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod normalize;
pub mod pipeline;
pub mod porter;
pub mod rules;
pub mod select;

pub use catalog::{Term, TermCatalog, TermId};
pub use cooc::{CorpusStats, TermMatcher};
pub use error::{Error, Result};
pub use normalize::{NormalizedSentence, StopwordSet};
pub use select::{HypernymPair, Provenance, Taxonomy};
