use std::sync::OnceLock;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Embedder, EmbeddingVector, LexsemError};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

/// Client for an external embedding service.
///
/// Each batch is one `POST` of `{"texts": [...]}` answered by
/// `{"vectors": [[...], ...]}`, one vector per text in order. The
/// dimension is fixed by the first response; later responses must match.
/// Transport errors, timeouts, non-2xx statuses and malformed bodies are
/// all surfaced as [`LexsemError::Remote`].
pub struct HttpEmbedder {
    endpoint: String,
    client: reqwest::blocking::Client,
    dimension: OnceLock<usize>,
}

impl HttpEmbedder {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Result<Self, LexsemError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LexsemError::Remote(e.to_string()))?;
        Ok(HttpEmbedder {
            endpoint: endpoint.into(),
            client,
            dimension: OnceLock::new(),
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

impl Embedder for HttpEmbedder {
    fn id(&self) -> &str {
        &self.endpoint
    }

    fn dimension(&self) -> Option<usize> {
        self.dimension.get().copied()
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, LexsemError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let remote = |e: reqwest::Error| LexsemError::Remote(e.to_string());
        let response: EmbedResponse = self
            .client
            .post(&self.endpoint)
            .json(&EmbedRequest { texts })
            .send()
            .map_err(remote)?
            .error_for_status()
            .map_err(remote)?
            .json()
            .map_err(remote)?;

        if response.vectors.len() != texts.len() {
            return Err(LexsemError::Remote(format!(
                "asked for {} vectors, got {}",
                texts.len(),
                response.vectors.len()
            )));
        }
        let mut out = Vec::with_capacity(texts.len());
        for components in response.vectors {
            let vector = EmbeddingVector::new(components)?;
            let expected = *self.dimension.get_or_init(|| vector.dimension());
            if vector.dimension() != expected {
                return Err(LexsemError::DimensionMismatch(expected, vector.dimension()));
            }
            out.push(vector);
        }
        Ok(out)
    }
}
