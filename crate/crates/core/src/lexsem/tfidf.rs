use std::collections::{BTreeMap, HashMap, HashSet};

use super::{Embedder, EmbeddingVector, LexsemError};
use crate::corpus::{tokenize, PoemCollection, TokenPolicy};

/// Bag-of-words TF-IDF encoder over a fixed vocabulary.
///
/// Component for term t is `tf(t) * (ln((1 + D) / (1 + df(t))) + 1)` with
/// raw term counts, then L2-normalized. Terms unseen at fit time are
/// ignored, so text made only of unknown words maps to the zero vector.
#[derive(Debug, Clone)]
pub struct TfIdfEmbedder {
    vocabulary: HashMap<String, usize>,
    idf: Vec<f64>,
    policy: TokenPolicy,
}

pub fn fit_tfidf<S: AsRef<str>>(corpus: &[S], policy: &TokenPolicy) -> Result<TfIdfEmbedder, LexsemError> {
    if corpus.is_empty() {
        return Err(LexsemError::EmptyCorpus);
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in corpus {
        let terms: HashSet<String> = tokenize(doc.as_ref(), policy).into_iter().collect();
        for term in terms {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(LexsemError::EmptyCorpus);
    }
    let docs = corpus.len() as f64;
    let mut vocabulary = HashMap::with_capacity(df.len());
    let mut idf = Vec::with_capacity(df.len());
    for (index, (term, count)) in df.into_iter().enumerate() {
        vocabulary.insert(term, index);
        idf.push(((1.0 + docs) / (1.0 + count as f64)).ln() + 1.0);
    }
    Ok(TfIdfEmbedder {
        vocabulary,
        idf,
        policy: *policy,
    })
}

/// Fits on every poem (lines space-joined) plus every topic string.
pub fn fit_tfidf_for_collection(collection: &PoemCollection, policy: &TokenPolicy) -> Result<TfIdfEmbedder, LexsemError> {
    let mut docs: Vec<String> = collection.poems().iter().map(|p| p.joined_text()).collect();
    docs.extend(collection.topics().iter().cloned());
    fit_tfidf(&docs, policy)
}

impl TfIdfEmbedder {
    pub fn vocabulary_size(&self) -> usize {
        self.idf.len()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocabulary.get(term).map(|&i| self.idf[i])
    }

    pub fn embed_text(&self, text: &str) -> EmbeddingVector {
        let mut components = vec![0.0; self.idf.len()];
        for token in tokenize(text, &self.policy) {
            if let Some(&i) = self.vocabulary.get(&token) {
                components[i] += 1.0;
            }
        }
        for (c, idf) in components.iter_mut().zip(&self.idf) {
            *c *= idf;
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            components.iter_mut().for_each(|c| *c /= norm);
        }
        EmbeddingVector::from_raw(components)
    }
}

impl Embedder for TfIdfEmbedder {
    fn id(&self) -> &str {
        "tfidf"
    }

    fn dimension(&self) -> Option<usize> {
        Some(self.idf.len())
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, LexsemError> {
        Ok(texts.iter().map(|t| self.embed_text(t)).collect())
    }
}
