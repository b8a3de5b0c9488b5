//! Lexico-semantic metrics: type/token ratio and topic retrieval.
//!
//! Topic retrieval encodes every topic string and every poem with an
//! [`Embedder`], ranks poems by cosine similarity to each topic and scores
//! the top-k list against the poems filed under that topic, with k equal
//! to the number of gold poems. Scores are macro-averaged over topics.

mod remote;
mod tfidf;

pub use remote::HttpEmbedder;
pub use tfidf::{fit_tfidf, fit_tfidf_for_collection, TfIdfEmbedder};

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Poem, PoemCollection, TokenPolicy};
use crate::exec::Execution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexsemError {
    #[error("no tokens to measure")]
    NoTokens,
    #[error("cannot fit an embedder on an empty corpus")]
    EmptyCorpus,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("k = {k} exceeds the {available} poems in the collection")]
    KTooLarge { k: usize, available: usize },
    #[error("collection has no topics")]
    NoTopics,
    #[error("invalid embedding: {0}")]
    InvalidVector(String),
    #[error("embedding service: {0}")]
    Remote(String),
}

/// Distinct tokens over total tokens, pooled across every line of every
/// poem given.
pub fn type_token_ratio<'a, I>(poems: I, policy: &TokenPolicy) -> Result<f64, LexsemError>
where
    I: IntoIterator<Item = &'a Poem>,
{
    let mut types = HashSet::new();
    let mut total = 0usize;
    for poem in poems {
        for token in poem.tokens(policy) {
            total += 1;
            types.insert(token);
        }
    }
    ratio_of(types.len(), total)
}

/// Same ratio over a bare token list.
pub fn type_token_ratio_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<f64, LexsemError> {
    let types: HashSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    ratio_of(types.len(), tokens.len())
}

fn ratio_of(types: usize, total: usize) -> Result<f64, LexsemError> {
    if total == 0 {
        return Err(LexsemError::NoTokens);
    }
    Ok(types as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Result<Self, LexsemError> {
        if components.is_empty() {
            return Err(LexsemError::InvalidVector("empty vector".into()));
        }
        if let Some(pos) = components.iter().position(|c| !c.is_finite()) {
            return Err(LexsemError::InvalidVector(format!("component {pos} is not finite")));
        }
        Ok(EmbeddingVector(components))
    }

    pub(crate) fn from_raw(components: Vec<f64>) -> Self {
        EmbeddingVector(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// True for the vector produced by text with no known terms.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

/// A text encoder. Implementations must be deterministic: the same text
/// always maps to the same vector.
pub trait Embedder: Send + Sync {
    fn id(&self) -> &str;

    /// `None` until known (remote encoders learn it from the first reply).
    fn dimension(&self) -> Option<usize>;

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, LexsemError>;

    fn embed(&self, text: &str) -> Result<EmbeddingVector, LexsemError> {
        let mut out = self.embed_batch(&[text.to_string()])?;
        out.pop().ok_or_else(|| LexsemError::Remote("empty response".into()))
    }
}

/// Cosine of the angle between `a` and `b`; zero when either has zero norm.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, LexsemError> {
    if a.dimension() != b.dimension() {
        return Err(LexsemError::DimensionMismatch(a.dimension(), b.dimension()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

fn poem_texts(collection: &PoemCollection) -> Vec<String> {
    collection.poems().iter().map(Poem::joined_text).collect()
}

fn rank(
    topic: &EmbeddingVector,
    poem_vectors: &[EmbeddingVector],
    collection: &PoemCollection,
    k: usize,
) -> Result<Vec<String>, LexsemError> {
    let mut scored = Vec::with_capacity(poem_vectors.len());
    for (poem, vector) in collection.poems().iter().zip(poem_vectors) {
        scored.push((cosine_similarity(topic, vector)?, poem.id()));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    Ok(scored.into_iter().take(k).map(|(_, id)| id.to_string()).collect())
}

/// Ids of the `k` poems most similar to `topic`, best first; equal scores
/// are ordered by id.
pub fn retrieve_topic(
    topic: &str,
    collection: &PoemCollection,
    embedder: &dyn Embedder,
    k: usize,
) -> Result<Vec<String>, LexsemError> {
    if k > collection.len() {
        return Err(LexsemError::KTooLarge {
            k,
            available: collection.len(),
        });
    }
    let poem_vectors = embedder.embed_batch(&poem_texts(collection))?;
    let topic_vector = embedder.embed(topic)?;
    rank(&topic_vector, &poem_vectors, collection, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicScore {
    pub topic: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub k: usize,
    pub retrieved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalReport {
    pub embedder: String,
    pub per_topic: Vec<TopicScore>,
    pub macro_f1: f64,
}

pub fn topic_retrieval_f1(collection: &PoemCollection, embedder: &dyn Embedder) -> Result<RetrievalReport, LexsemError> {
    topic_retrieval_f1_with(collection, embedder, Execution::default())
}

pub fn topic_retrieval_f1_with(
    collection: &PoemCollection,
    embedder: &dyn Embedder,
    exec: Execution,
) -> Result<RetrievalReport, LexsemError> {
    let topics: Vec<String> = collection.topics().iter().cloned().collect();
    if topics.is_empty() {
        return Err(LexsemError::NoTopics);
    }
    let poem_vectors = embedder.embed_batch(&poem_texts(collection))?;
    let topic_vectors = embedder.embed_batch(&topics)?;
    if poem_vectors.len() != collection.len() || topic_vectors.len() != topics.len() {
        return Err(LexsemError::Remote("embedder returned the wrong number of vectors".into()));
    }

    let indexed: Vec<usize> = (0..topics.len()).collect();
    let per_topic = exec
        .map(&indexed, |&t| {
            let topic = &topics[t];
            let gold: HashSet<&str> = collection.with_topic(topic).map(Poem::id).collect();
            let k = gold.len();
            let retrieved = rank(&topic_vectors[t], &poem_vectors, collection, k)?;
            let hits = retrieved.iter().filter(|id| gold.contains(id.as_str())).count();
            let precision = hits as f64 / k as f64;
            let recall = hits as f64 / gold.len() as f64;
            let f1 = if hits == 0 {
                0.0
            } else if precision == recall {
                precision
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            Ok(TopicScore {
                topic: topic.clone(),
                precision,
                recall,
                f1,
                k,
                retrieved,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>, LexsemError>>()?;

    let macro_f1 = per_topic.iter().map(|t| t.f1).sum::<f64>() / per_topic.len() as f64;
    Ok(RetrievalReport {
        embedder: embedder.id().to_string(),
        per_topic,
        macro_f1,
    })
}
