use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use poemeval::lexsem::*;
use poemeval::{parse_poem, tokenize, Poem, PoemCollection, PoemMeta, TokenPolicy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn topical(id: &str, topic: &str, text: &str) -> Poem {
    parse_poem(text, PoemMeta::new(id).with_topic(topic)).unwrap()
}

/// Three topics, five poems each, no word shared across topics.
pub fn disjoint_collection() -> PoemCollection {
    let vocab = [
        ("ocean", ["ocean", "wave", "salt", "tide", "shore", "gull", "foam"]),
        ("forest", ["forest", "pine", "moss", "fern", "bark", "owl", "root"]),
        ("city", ["city", "tram", "neon", "brick", "alley", "smog", "tower"]),
    ];
    let mut poems = Vec::new();
    for (topic, words) in vocab {
        for i in 0..5 {
            let l1 = format!("{} {} {}", words[0], words[1 + i % 6], words[1 + (i + 2) % 6]);
            let l2 = format!("{} {}", words[1 + (i + 4) % 6], words[1 + (i * 5) % 6]);
            poems.push(topical(&format!("{topic}-{i}"), topic, &format!("{l1}\n{l2}")));
        }
    }
    PoemCollection::new(poems).unwrap()
}

#[test]
fn disjoint_topics_retrieve_perfectly() {
    let c = disjoint_collection();
    let tfidf = fit_tfidf_for_collection(&c, &TokenPolicy::default()).unwrap();
    let report = topic_retrieval_f1(&c, &tfidf).unwrap();
    assert_eq!(report.macro_f1, 1.0);
    assert_eq!(report.per_topic.len(), 3);
    for t in &report.per_topic {
        assert_eq!(t.k, 5);
        assert!(t.precision == t.recall && t.recall == t.f1);
    }
    assert_eq!(report.embedder, "tfidf");
}

/// Independent TF-IDF cosine: same weighting, maps keyed by term.
fn oracle_scores(docs: &[String], query: &str) -> Vec<f64> {
    let p = TokenPolicy::default();
    let toks: Vec<Vec<String>> = docs.iter().map(|d| tokenize(d, &p)).collect();
    let mut df: HashMap<&str, f64> = HashMap::new();
    for t in &toks {
        for w in t.iter().map(String::as_str).collect::<HashSet<_>>() {
            *df.entry(w).or_default() += 1.0;
        }
    }
    let n = docs.len() as f64;
    let vec_of = |words: &[String]| -> HashMap<String, f64> {
        let mut v: HashMap<String, f64> = HashMap::new();
        for w in words {
            if let Some(d) = df.get(w.as_str()) {
                *v.entry(w.clone()).or_default() += ((1.0 + n) / (1.0 + d)).ln() + 1.0;
            }
        }
        v
    };
    let q = vec_of(&tokenize(query, &p));
    let norm = |v: &HashMap<String, f64>| v.values().map(|x| x * x).sum::<f64>().sqrt();
    toks.iter()
        .map(|t| {
            let v = vec_of(t);
            let (a, b) = (norm(&q), norm(&v));
            if a == 0.0 || b == 0.0 {
                return 0.0;
            }
            q.iter().map(|(k, x)| x * v.get(k).unwrap_or(&0.0)).sum::<f64>() / (a * b)
        })
        .collect()
}

#[test]
fn ranking_matches_brute_force() {
    let texts = [
        ("p1", "the sea and the sky"),
        ("p2", "sea sea sea"),
        ("p3", "a dry desert road"),
        ("p4", "sky above the road"),
        ("p5", "grey sea under grey sky"),
        ("p6", "nothing here"),
    ];
    let c = PoemCollection::new(texts.iter().map(|(id, t)| topical(id, "sea", t)).collect()).unwrap();
    let tfidf = fit_tfidf_for_collection(&c, &TokenPolicy::default()).unwrap();
    let mut docs: Vec<String> = texts.iter().map(|(_, t)| t.to_string()).collect();
    docs.push("sea".into());
    let scores = oracle_scores(&docs, "sea");
    let mut order: Vec<(f64, &str)> = texts.iter().zip(&scores).map(|((id, _), s)| (*s, *id)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    for k in 1..=6 {
        let got = retrieve_topic("sea", &c, &tfidf, k).unwrap();
        let want: Vec<&str> = order.iter().take(k).map(|x| x.1).collect();
        assert_eq!(got, want, "k = {k}");
    }
    assert_eq!(
        retrieve_topic("sea", &c, &tfidf, 7),
        Err(LexsemError::KTooLarge { k: 7, available: 6 })
    );
}

#[test]
fn identical_texts_tie_by_id() {
    let c = PoemCollection::new(vec![
        topical("z", "rain", "rain on the roof"),
        topical("b", "rain", "rain on the roof"),
        topical("m", "rain", "rain on the roof"),
        topical("x", "sun", "hot sun"),
    ])
    .unwrap();
    let tfidf = fit_tfidf_for_collection(&c, &TokenPolicy::default()).unwrap();
    assert_eq!(retrieve_topic("rain", &c, &tfidf, 3).unwrap(), ["b", "m", "z"]);
}

#[test]
fn execution_modes_give_same_report() {
    let c = disjoint_collection();
    let tfidf = fit_tfidf_for_collection(&c, &TokenPolicy::default()).unwrap();
    let a = topic_retrieval_f1_with(&c, &tfidf, poemeval::Execution::Sequential).unwrap();
    let b = topic_retrieval_f1_with(&c, &tfidf, poemeval::Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tfidf_errors_and_weights() {
    let p = TokenPolicy::default();
    assert_eq!(fit_tfidf::<&str>(&[], &p).unwrap_err(), LexsemError::EmptyCorpus);
    assert_eq!(fit_tfidf(&["...", "!"], &p).unwrap_err(), LexsemError::EmptyCorpus);
    let t = fit_tfidf(&["a b", "a c"], &p).unwrap();
    assert_eq!(t.vocabulary_size(), 3);
    assert_eq!(t.idf("a"), Some(1.0));
    assert!((t.idf("b").unwrap() - (1.5f64.ln() + 1.0)).abs() < 1e-15);
    assert!(t.embed_text("unseen words").is_zero());
    let no_topics = PoemCollection::new(vec![parse_poem("x y", PoemMeta::new("a")).unwrap()]).unwrap();
    let fit = fit_tfidf_for_collection(&no_topics, &p).unwrap();
    assert_eq!(topic_retrieval_f1(&no_topics, &fit), Err(LexsemError::NoTopics));
}

#[test]
fn ttr_fixture_and_permutations() {
    let base = ["the", "cat", "the", "dog"];
    assert_eq!(type_token_ratio_tokens(&base).unwrap(), 0.75);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut tokens = base.to_vec();
    for _ in 0..10 {
        tokens.shuffle(&mut rng);
        assert_eq!(type_token_ratio_tokens(&tokens).unwrap(), 0.75);
    }
    assert_eq!(type_token_ratio_tokens::<&str>(&[]), Err(LexsemError::NoTokens));
    let poems = [
        parse_poem("The cat,", PoemMeta::new("a")).unwrap(),
        parse_poem("the DOG", PoemMeta::new("b")).unwrap(),
    ];
    assert_eq!(type_token_ratio(&poems, &TokenPolicy::default()).unwrap(), 0.75);
}

proptest! {
    #[test]
    fn cosine_is_scale_invariant(v in prop::collection::vec(-10.0f64..10.0, 1..8), s in 0.01f64..100.0, seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut w = v.clone();
        w.shuffle(&mut rng);
        let a = EmbeddingVector::new(v.clone()).unwrap();
        let b = EmbeddingVector::new(w.clone()).unwrap();
        let scaled = EmbeddingVector::new(v.iter().map(|x| x * s).collect()).unwrap();
        let base = cosine_similarity(&a, &b).unwrap();
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - base).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&base));
    }

    #[test]
    fn ttr_is_permutation_invariant(tokens in prop::collection::vec("[a-d]", 1..20), seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = tokens.clone();
        shuffled.shuffle(&mut rng);
        let r = type_token_ratio_tokens(&tokens).unwrap();
        prop_assert_eq!(r, type_token_ratio_tokens(&shuffled).unwrap());
        prop_assert!(r > 0.0 && r <= 1.0);
    }
}

#[test]
fn cosine_edge_cases() {
    let z = EmbeddingVector::new(vec![0.0, 0.0]).unwrap();
    let a = EmbeddingVector::new(vec![1.0, 2.0]).unwrap();
    assert_eq!(cosine_similarity(&z, &a).unwrap(), 0.0);
    let c = EmbeddingVector::new(vec![1.0]).unwrap();
    assert_eq!(cosine_similarity(&a, &c), Err(LexsemError::DimensionMismatch(2, 1)));
    assert!(EmbeddingVector::new(vec![f64::NAN]).is_err());
    assert!(EmbeddingVector::new(vec![]).is_err());
}

// ---- remote encoder ----

/// Counts of a few fixed words: a deterministic stand-in encoder.
fn toy_vector(text: &str) -> Vec<f64> {
    const DIMS: [&str; 6] = ["ocean", "forest", "city", "wave", "pine", "neon"];
    let toks = tokenize(text, &TokenPolicy::default());
    DIMS.iter().map(|d| toks.iter().filter(|t| t == d).count() as f64).collect()
}

struct ToyEmbedder;

impl Embedder for ToyEmbedder {
    fn id(&self) -> &str {
        "toy"
    }
    fn dimension(&self) -> Option<usize> {
        Some(6)
    }
    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, LexsemError> {
        texts.iter().map(|t| EmbeddingVector::new(toy_vector(t))).collect()
    }
}

type Handler = dyn Fn(usize, Vec<String>) -> (u16, String) + Send + Sync;

/// Minimal HTTP/1.1 server on an ephemeral port; `handler` gets the call
/// index and the request's texts.
fn serve(handler: Arc<Handler>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let calls = Arc::new(AtomicUsize::new(0));
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let handler = handler.clone();
            let calls = calls.clone();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    if line == "\r\n" {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            len = v.trim().parse().unwrap();
                        }
                    }
                }
                let mut body = vec![0; len];
                reader.read_exact(&mut body).unwrap();
                let json: serde_json::Value = serde_json::from_slice(&body).unwrap();
                let texts = json["texts"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect();
                let (status, reply) = handler(calls.fetch_add(1, Ordering::SeqCst), texts);
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                    reply.len()
                );
            });
        }
    });
    format!("http://{addr}/embed")
}

fn vectors_json(vectors: Vec<Vec<f64>>) -> String {
    serde_json::json!({ "vectors": vectors }).to_string()
}

#[test]
fn http_embedder_matches_local_encoder() {
    let url = serve(Arc::new(|_, texts: Vec<String>| (200, vectors_json(texts.iter().map(|t| toy_vector(t)).collect()))));
    let remote = HttpEmbedder::new(url.clone(), Duration::from_secs(10)).unwrap();
    assert_eq!(remote.dimension(), None);
    let c = disjoint_collection();
    let via_http = topic_retrieval_f1(&c, &remote).unwrap();
    let local = topic_retrieval_f1(&c, &ToyEmbedder).unwrap();
    assert_eq!(via_http.embedder, url);
    assert_eq!(via_http.per_topic, local.per_topic);
    assert_eq!(via_http.macro_f1, local.macro_f1);
    assert_eq!(remote.dimension(), Some(6));
}

fn remote_error(handler: Arc<Handler>, timeout: Duration) -> LexsemError {
    let remote = HttpEmbedder::new(serve(handler), timeout).unwrap();
    topic_retrieval_f1(&disjoint_collection(), &remote).unwrap_err()
}

#[test]
fn http_embedder_error_paths() {
    let long = Duration::from_secs(10);
    let e = remote_error(Arc::new(|_, _| (500, "{}".into())), long);
    assert!(matches!(e, LexsemError::Remote(_)), "{e:?}");

    let e = remote_error(Arc::new(|_, _| (200, "not json".into())), long);
    assert!(matches!(e, LexsemError::Remote(_)), "{e:?}");

    let e = remote_error(Arc::new(|_, _| (200, vectors_json(vec![vec![1.0]]))), long);
    assert!(matches!(e, LexsemError::Remote(ref m) if m.contains("vectors")), "{e:?}");

    let e = remote_error(
        Arc::new(|call, texts: Vec<String>| (200, vectors_json(vec![vec![1.0; 3 + call]; texts.len()]))),
        long,
    );
    assert_eq!(e, LexsemError::DimensionMismatch(3, 4));

    let e = remote_error(
        Arc::new(|_, texts: Vec<String>| {
            std::thread::sleep(Duration::from_millis(1500));
            (200, vectors_json(vec![vec![1.0]; texts.len()]))
        }),
        Duration::from_millis(200),
    );
    assert!(matches!(e, LexsemError::Remote(_)), "{e:?}");

    let closed = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap();
    let remote = HttpEmbedder::new(format!("http://{closed}/embed"), long).unwrap();
    assert!(matches!(remote.embed("x"), Err(LexsemError::Remote(_))));
}
