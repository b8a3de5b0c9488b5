//! Line-ending rhyme detection.
//!
//! Two lines rhyme when their final words share a perfect rime: the
//! phonemes from the last stressed vowel to the end of the word, stress
//! digits ignored. Final words missing from the lexicon fall back to
//! comparing their last three letters. This is a conservative detector;
//! slant rhymes are not found. A repeated final word rhymes with itself.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{tokenize, Poem, TokenPolicy};
use crate::phonetics::PronLexicon;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RhymeError {
    #[error("rhyme scheme has no lines")]
    EmptyScheme,
}

const SUFFIX_LETTERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RimeKey {
    /// Rime of an in-lexicon final word, stress digits erased.
    Phonemic(Vec<String>),
    /// Last letters of an out-of-lexicon final word.
    Orthographic(String),
    /// The line has no tokens; rhymes with nothing, not even itself.
    Empty,
}

impl RimeKey {
    pub fn rhymes_with(&self, other: &RimeKey) -> bool {
        !matches!(self, RimeKey::Empty) && self == other
    }
}

pub fn rime_key(line: &str, lexicon: &PronLexicon, policy: &TokenPolicy) -> RimeKey {
    let tokens = tokenize(line, policy);
    let Some(last) = tokens.last() else {
        return RimeKey::Empty;
    };
    match lexicon.primary(last) {
        Some(pron) => {
            let start = pron
                .iter()
                .rposition(|p| matches!(p.stress, Some(1 | 2)))
                .or_else(|| pron.iter().rposition(|p| p.is_vowel()))
                .unwrap_or(0);
            RimeKey::Phonemic(pron[start..].iter().map(|p| p.symbol.clone()).collect())
        }
        None => {
            let lower = last.to_lowercase();
            let chars: Vec<char> = lower.chars().collect();
            let from = chars.len().saturating_sub(SUFFIX_LETTERS);
            RimeKey::Orthographic(chars[from..].iter().collect())
        }
    }
}

/// One label per line, in reading order. Labels run A..Z, then AA, AB, ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhymeScheme {
    labels: Vec<String>,
}

impl RhymeScheme {
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RhymeScheme {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses a compact single-letter scheme such as `"ABAB"`.
    pub fn parse(compact: &str) -> Self {
        Self::from_labels(compact.chars().map(String::from))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn label_counts(&self) -> HashMap<&str, usize> {
        let mut counts = HashMap::new();
        for label in &self.labels {
            *counts.entry(label.as_str()).or_insert(0) += 1;
        }
        counts
    }
}

impl fmt::Display for RhymeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.labels.iter().all(|l| l.len() == 1) { "" } else { " " };
        f.write_str(&self.labels.join(sep))
    }
}

impl Serialize for RhymeScheme {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn label_for(index: usize) -> String {
    let mut n = index;
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (n % 26) as u8);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Labels every line of the poem, ignoring stanza boundaries, so rhymes
/// across stanzas (sonnet couplets, refrains) are found.
pub fn rhyme_scheme(poem: &Poem, lexicon: &PronLexicon, policy: &TokenPolicy) -> RhymeScheme {
    scheme_from_keys(poem.lines().map(|line| rime_key(line, lexicon, policy)))
}

pub fn scheme_from_keys<I: IntoIterator<Item = RimeKey>>(keys: I) -> RhymeScheme {
    let mut assigned: HashMap<RimeKey, String> = HashMap::new();
    let mut next = 0;
    let mut labels = Vec::new();
    for key in keys {
        let label = if key == RimeKey::Empty {
            None
        } else {
            assigned.get(&key).cloned()
        };
        let label = label.unwrap_or_else(|| {
            let fresh = label_for(next);
            next += 1;
            if key != RimeKey::Empty {
                assigned.insert(key, fresh.clone());
            }
            fresh
        });
        labels.push(label);
    }
    RhymeScheme { labels }
}

/// Distinct labels that occur at least twice.
pub fn rhyme_pattern_count(scheme: &RhymeScheme) -> usize {
    scheme.label_counts().values().filter(|&&c| c >= 2).count()
}

/// Fraction of lines whose label occurs at least twice.
pub fn rhyme_richness(scheme: &RhymeScheme) -> Result<f64, RhymeError> {
    if scheme.is_empty() {
        return Err(RhymeError::EmptyScheme);
    }
    let counts = scheme.label_counts();
    let rhyming = scheme.labels.iter().filter(|l| counts[l.as_str()] >= 2).count();
    Ok(rhyming as f64 / scheme.len() as f64)
}
