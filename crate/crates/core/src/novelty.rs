//! ROUGE-N overlap and novelty statistics.
//!
//! Intra-poem novelty is the mean ROUGE F1 over all unordered pairs of
//! distinct line positions in one poem. Inter-poem novelty compares two
//! poems in one of three modes and is averaged over poem pairs of a
//! collection. Lower scores mean more novel text.
//!
//! Large collections can be undersampled: a fixed number of units (poem
//! pairs, or poems for the intra scope) is drawn uniformly without
//! replacement from a seeded generator before any scoring happens, so the
//! result does not depend on scheduling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, Poem, PoemCollection, TokenPolicy};
use crate::exec::Execution;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NoveltyError {
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("intra-poem novelty needs at least 2 lines, poem has {0}")]
    TooFewLines(usize),
    #[error("{0}")]
    TooFewPoems(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub const ZERO: RougeScore = RougeScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision == recall {
            precision
        } else if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        RougeScore { precision, recall, f1 }
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            let gram: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// ROUGE-N with clipped n-gram overlap. A zero denominator makes that
/// component zero rather than an error.
pub fn rouge_n<S: AsRef<str>>(candidate: &[S], reference: &[S], n: usize) -> Result<RougeScore, NoveltyError> {
    if n < 1 {
        return Err(NoveltyError::InvalidOrder(n));
    }
    Ok(rouge_checked(candidate, reference, n))
}

fn rouge_checked<S: AsRef<str>>(candidate: &[S], reference: &[S], n: usize) -> RougeScore {
    let cand_total = candidate.len().saturating_sub(n - 1);
    let ref_total = reference.len().saturating_sub(n - 1);
    if cand_total == 0 || ref_total == 0 {
        return RougeScore::ZERO;
    }
    let cand = ngram_counts(candidate, n);
    let reference = ngram_counts(reference, n);
    let (small, large) = if cand.len() <= reference.len() {
        (&cand, &reference)
    } else {
        (&reference, &cand)
    };
    let overlap: usize = small
        .iter()
        .map(|(gram, &count)| large.get(gram).map_or(0, |&other| count.min(other)))
        .sum();
    RougeScore::from_pr(overlap as f64 / cand_total as f64, overlap as f64 / ref_total as f64)
}

/// Inter-poem comparison modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterMode {
    /// Each poem flattened to one token sequence and compared once.
    SingleString,
    /// Line i against line i; surplus lines of the longer poem are ignored.
    LineByLine,
    /// Mean over the cartesian product of lines.
    AllLines,
}

impl InterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InterMode::SingleString => "single-string",
            InterMode::LineByLine => "line-by-line",
            InterMode::AllLines => "all-lines",
        }
    }
}

impl fmt::Display for InterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single-string" => Ok(InterMode::SingleString),
            "line-by-line" => Ok(InterMode::LineByLine),
            "all-lines" => Ok(InterMode::AllLines),
            other => Err(format!("unknown novelty mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Intra,
    Inter,
}

/// Undersampling request: score `count` units drawn with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub count: usize,
    pub seed: u64,
}

/// Tokenized view of a poem, computed once per collection run.
struct PoemTokens {
    lines: Vec<Vec<String>>,
    flat: Vec<String>,
}

impl PoemTokens {
    fn new(poem: &Poem, policy: &TokenPolicy) -> Self {
        let lines: Vec<Vec<String>> = poem.lines().map(|l| tokenize(l, policy)).collect();
        let flat = lines.iter().flatten().cloned().collect();
        PoemTokens { lines, flat }
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn intra_tokens(poem: &PoemTokens, n: usize) -> f64 {
    let lines = &poem.lines;
    mean((0..lines.len()).flat_map(|i| (i + 1..lines.len()).map(move |j| rouge_checked(&lines[i], &lines[j], n).f1)))
}

fn inter_tokens(a: &PoemTokens, b: &PoemTokens, mode: InterMode, n: usize) -> f64 {
    match mode {
        InterMode::SingleString => rouge_checked(&a.flat, &b.flat, n).f1,
        InterMode::LineByLine => mean(a.lines.iter().zip(&b.lines).map(|(x, y)| rouge_checked(x, y, n).f1)),
        InterMode::AllLines => mean(
            a.lines
                .iter()
                .flat_map(|x| b.lines.iter().map(move |y| rouge_checked(x, y, n).f1)),
        ),
    }
}

pub fn intra_poem_novelty(poem: &Poem, n: usize, policy: &TokenPolicy) -> Result<f64, NoveltyError> {
    if n < 1 {
        return Err(NoveltyError::InvalidOrder(n));
    }
    if poem.line_count() < 2 {
        return Err(NoveltyError::TooFewLines(poem.line_count()));
    }
    Ok(intra_tokens(&PoemTokens::new(poem, policy), n))
}

pub fn inter_single_string(a: &Poem, b: &Poem, n: usize, policy: &TokenPolicy) -> Result<RougeScore, NoveltyError> {
    rouge_n(&a.tokens(policy), &b.tokens(policy), n)
}

pub fn inter_line_by_line(a: &Poem, b: &Poem, n: usize, policy: &TokenPolicy) -> Result<f64, NoveltyError> {
    inter_novelty(a, b, InterMode::LineByLine, n, policy)
}

pub fn inter_all_lines(a: &Poem, b: &Poem, n: usize, policy: &TokenPolicy) -> Result<f64, NoveltyError> {
    inter_novelty(a, b, InterMode::AllLines, n, policy)
}

/// Mean F1 between two poems under `mode`.
pub fn inter_novelty(a: &Poem, b: &Poem, mode: InterMode, n: usize, policy: &TokenPolicy) -> Result<f64, NoveltyError> {
    if n < 1 {
        return Err(NoveltyError::InvalidOrder(n));
    }
    Ok(inter_tokens(&PoemTokens::new(a, policy), &PoemTokens::new(b, policy), mode, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitScore {
    /// Poem id (intra) or `"<id>|<id>"` (inter).
    pub unit: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleInfo {
    pub requested: usize,
    pub seed: u64,
    /// Units available before sampling.
    pub population: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoveltyReport {
    pub scope: Scope,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<InterMode>,
    pub n: usize,
    pub units: Vec<UnitScore>,
    pub aggregate: f64,
    pub sampled: Option<SampleInfo>,
    /// Poems left out of an intra run for having fewer than 2 lines.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct NoveltyRequest {
    pub scope: Scope,
    /// Used only for the inter scope.
    pub mode: InterMode,
    pub n: usize,
    pub sample: Option<Sample>,
}

impl NoveltyRequest {
    pub fn intra(n: usize) -> Self {
        NoveltyRequest {
            scope: Scope::Intra,
            mode: InterMode::SingleString,
            n,
            sample: None,
        }
    }

    pub fn inter(mode: InterMode, n: usize) -> Self {
        NoveltyRequest {
            scope: Scope::Inter,
            mode,
            n,
            sample: None,
        }
    }

    pub fn sampled(mut self, count: usize, seed: u64) -> Self {
        self.sample = Some(Sample { count, seed });
        self
    }
}

pub fn collection_novelty(
    collection: &PoemCollection,
    request: &NoveltyRequest,
    policy: &TokenPolicy,
) -> Result<NoveltyReport, NoveltyError> {
    collection_novelty_with(collection, request, policy, Execution::default())
}

pub fn collection_novelty_with(
    collection: &PoemCollection,
    request: &NoveltyRequest,
    policy: &TokenPolicy,
    exec: Execution,
) -> Result<NoveltyReport, NoveltyError> {
    let n = request.n;
    if n < 1 {
        return Err(NoveltyError::InvalidOrder(n));
    }
    let poems = collection.poems();
    let tokens: Vec<PoemTokens> = exec.map(poems, |p| PoemTokens::new(p, policy));

    match request.scope {
        Scope::Intra => {
            let (eligible, skipped): (Vec<usize>, Vec<usize>) = (0..poems.len()).partition(|&i| tokens[i].lines.len() >= 2);
            if eligible.is_empty() {
                return Err(NoveltyError::TooFewPoems(
                    "intra novelty needs at least one poem with 2 or more lines".into(),
                ));
            }
            let population = eligible.len();
            let chosen = match request.sample {
                Some(s) => sample_indices(population, s).into_iter().map(|k| eligible[k]).collect(),
                None => eligible,
            };
            let units = exec.map(&chosen, |&i| UnitScore {
                unit: poems[i].id().to_string(),
                score: intra_tokens(&tokens[i], n),
            });
            Ok(NoveltyReport {
                scope: Scope::Intra,
                mode: None,
                n,
                aggregate: mean(units.iter().map(|u| u.score)),
                units,
                sampled: request.sample.map(|s| SampleInfo {
                    requested: s.count,
                    seed: s.seed,
                    population,
                }),
                skipped: skipped.into_iter().map(|i| poems[i].id().to_string()).collect(),
            })
        }
        Scope::Inter => {
            let k = poems.len();
            if k < 2 {
                return Err(NoveltyError::TooFewPoems(format!(
                    "inter novelty needs at least 2 poems, collection has {k}"
                )));
            }
            let population = k * (k - 1) / 2;
            let pairs: Vec<(usize, usize)> = match request.sample {
                Some(s) => unrank_pairs(k, &sample_indices(population, s)),
                None => (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect(),
            };
            let mode = request.mode;
            let units = exec.map(&pairs, |&(i, j)| UnitScore {
                unit: format!("{}|{}", poems[i].id(), poems[j].id()),
                score: inter_tokens(&tokens[i], &tokens[j], mode, n),
            });
            Ok(NoveltyReport {
                scope: Scope::Inter,
                mode: Some(mode),
                n,
                aggregate: mean(units.iter().map(|u| u.score)),
                units,
                sampled: request.sample.map(|s| SampleInfo {
                    requested: s.count,
                    seed: s.seed,
                    population,
                }),
                skipped: Vec::new(),
            })
        }
    }
}

/// Sorted indices of `min(count, population)` units drawn without
/// replacement.
fn sample_indices(population: usize, sample: Sample) -> Vec<usize> {
    if sample.count >= population {
        return (0..population).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let mut picked = rand::seq::index::sample(&mut rng, population, sample.count).into_vec();
    picked.sort_unstable();
    picked
}

/// Maps sorted ranks in the row-major enumeration of `i < j` pairs back to
/// index pairs.
fn unrank_pairs(k: usize, sorted_ranks: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(sorted_ranks.len());
    let mut row = 0;
    let mut row_start = 0;
    for &rank in sorted_ranks {
        while rank >= row_start + (k - 1 - row) {
            row_start += k - 1 - row;
            row += 1;
        }
        out.push((row, row + 1 + (rank - row_start)));
    }
    out
}
