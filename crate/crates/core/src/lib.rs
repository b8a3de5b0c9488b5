//! Analysis and evaluation of poems, human- or machine-authored.
//!
//! Metrics are grouped into four aspect families: poetic form (stanzas,
//! lines, syllables, scansion, rhyme), novelty (ROUGE overlap within and
//! across poems), lexico-semantics (type/token ratio, topic retrieval) and
//! fluency (reserved, no built-in analyzers). The [`framework`] module ties
//! them together behind an analyzer registry with an analyze/evaluate
//! contract.

pub mod corpus;
pub mod framework;
pub mod lexsem;
pub mod novelty;
pub mod phonetics;
pub mod rhyme;
pub mod stats;

mod exec;

pub use corpus::{load_collection, parse_poem, tokenize, Poem, PoemCollection, PoemMeta, TokenPolicy};
pub use exec::Execution;
pub use phonetics::PronLexicon;
