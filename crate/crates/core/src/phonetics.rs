//! Pronunciation lexicon, syllable counting and lexical-stress scansion.
//!
//! The lexicon format is the CMU Pronouncing Dictionary's:
//!
//! ```text
//! ;;; comment
//! LOVE  L AH1 V
//! A  AH0
//! A(1)  EY1
//! ```
//!
//! Vowel phonemes carry a stress digit (0 unstressed, 1 primary,
//! 2 secondary) and each one is a syllable nucleus. Alternates (`WORD(n)`)
//! are merged under the base word in file order; the first one listed is
//! the primary pronunciation and is the only one used for counting. The
//! newer lowercase distribution (single space, trailing `# comment`) is
//! accepted as well.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, TokenPolicy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("read error at line {line}: {message}")]
    Io { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phoneme {
    /// ARPABET symbol without its stress digit.
    pub symbol: String,
    /// Present only on vowels.
    pub stress: Option<u8>,
}

impl Phoneme {
    pub fn is_vowel(&self) -> bool {
        self.stress.is_some()
    }

    fn parse(raw: &str) -> Result<Phoneme, String> {
        if raw.is_empty() || !raw.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(format!("bad phoneme `{raw}`"));
        }
        let (head, last) = raw.split_at(raw.len() - 1);
        match last.as_bytes()[0] {
            b'0'..=b'2' if !head.is_empty() => Ok(Phoneme {
                symbol: head.to_string(),
                stress: Some(last.as_bytes()[0] - b'0'),
            }),
            b'0'..=b'9' => Err(format!("bad stress digit in `{raw}`")),
            _ => Ok(Phoneme {
                symbol: raw.to_string(),
                stress: None,
            }),
        }
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stress {
            Some(s) => write!(f, "{}{}", self.symbol, s),
            None => f.write_str(&self.symbol),
        }
    }
}

pub type Pronunciation = Vec<Phoneme>;

#[derive(Debug, Clone, Default)]
pub struct PronLexicon {
    entries: HashMap<String, Vec<Pronunciation>>,
}

/// Result of [`load_lexicon`]: the lexicon plus every line that was skipped.
#[derive(Debug)]
pub struct LoadedLexicon {
    pub lexicon: PronLexicon,
    pub errors: Vec<LexiconError>,
}

pub fn load_lexicon<R: BufRead>(source: R) -> LoadedLexicon {
    let mut lexicon = PronLexicon::default();
    let mut errors = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = match line {
            Ok(line) => line,
            Err(e) => {
                errors.push(LexiconError::Io {
                    line: line_no,
                    message: e.to_string(),
                });
                break;
            }
        };
        match parse_entry(&line) {
            Ok(Some((word, pron))) => lexicon.entries.entry(word).or_default().push(pron),
            Ok(None) => {}
            Err(reason) => errors.push(LexiconError::MalformedEntry { line: line_no, reason }),
        }
    }
    LoadedLexicon { lexicon, errors }
}

fn parse_entry(line: &str) -> Result<Option<(String, Pronunciation)>, String> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with(";;;") {
        return Ok(None);
    }
    let body = match trimmed.find(" #") {
        Some(pos) => &trimmed[..pos],
        None => trimmed,
    };
    let mut fields = body.split_whitespace();
    let head = fields.next().ok_or("missing word")?;
    let word = strip_alternate_index(head).to_uppercase();
    if word.is_empty() {
        return Err(format!("empty word in `{head}`"));
    }
    let pron = fields.map(Phoneme::parse).collect::<Result<Vec<_>, _>>()?;
    if pron.is_empty() {
        return Err(format!("`{word}` has no phonemes"));
    }
    if !pron.iter().any(Phoneme::is_vowel) {
        return Err(format!("`{word}` has no vowel phoneme"));
    }
    Ok(Some((word, pron)))
}

fn strip_alternate_index(head: &str) -> &str {
    if let Some(open) = head.rfind('(') {
        let inner = &head[open + 1..];
        if let Some(digits) = inner.strip_suffix(')') {
            if open > 0 && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                return &head[..open];
            }
        }
    }
    head
}

impl PronLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, pronunciation: Pronunciation) {
        self.entries.entry(word.to_uppercase()).or_default().push(pronunciation);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All pronunciations for `word` (case-insensitive), primary first.
    pub fn pronunciations(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(&lookup_key(word)).map(Vec::as_slice)
    }

    pub fn primary(&self, word: &str) -> Option<&Pronunciation> {
        self.pronunciations(word).and_then(|p| p.first())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn lookup_key(word: &str) -> String {
    word.to_uppercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyllableCount {
    pub count: usize,
    pub oov: bool,
}

/// Syllables in one word: stress-bearing phonemes of the primary
/// pronunciation, or the orthographic vowel-group heuristic when the word
/// is not in the lexicon.
pub fn syllable_count_word(word: &str, lexicon: &PronLexicon) -> SyllableCount {
    match lexicon.primary(word) {
        Some(pron) => SyllableCount {
            count: pron.iter().filter(|p| p.is_vowel()).count(),
            oov: false,
        },
        None => SyllableCount {
            count: heuristic_syllables(word),
            oov: true,
        },
    }
}

/// Number of maximal runs of vowel letters, never less than one.
pub fn heuristic_syllables(word: &str) -> usize {
    let mut groups = 0;
    let mut in_group = false;
    for c in word.chars().flat_map(char::to_lowercase) {
        let vowel = is_vowel_letter(c);
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }
    groups.max(1)
}

fn is_vowel_letter(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'y'
            | 'á' | 'é' | 'í' | 'ó' | 'ú' | 'ý'
            | 'à' | 'è' | 'ì' | 'ò' | 'ù'
            | 'â' | 'ê' | 'î' | 'ô' | 'û'
            | 'ä' | 'ë' | 'ï' | 'ö' | 'ü'
            | 'ã' | 'õ'
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LineSyllables {
    pub count: usize,
    pub tokens: usize,
    pub oov_tokens: usize,
}

pub fn syllable_count_line(line: &str, lexicon: &PronLexicon, policy: &TokenPolicy) -> LineSyllables {
    let mut out = LineSyllables {
        count: 0,
        tokens: 0,
        oov_tokens: 0,
    };
    for token in tokenize(line, policy) {
        let word = syllable_count_word(&token, lexicon);
        out.count += word.count;
        out.tokens += 1;
        out.oov_tokens += usize::from(word.oov);
    }
    out
}

/// Per-syllable stress digits of a line, e.g. `"010"` for "computer".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StressPattern(String);

impl StressPattern {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn syllables(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for StressPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineStress {
    pub pattern: StressPattern,
    pub oov_tokens: usize,
}

/// Out-of-lexicon words contribute primary stress on every heuristic
/// syllable and are counted in `oov_tokens`.
pub fn stress_pattern_line(line: &str, lexicon: &PronLexicon, policy: &TokenPolicy) -> LineStress {
    let mut pattern = String::new();
    let mut oov_tokens = 0;
    for token in tokenize(line, policy) {
        match lexicon.primary(&token) {
            Some(pron) => {
                pattern.extend(pron.iter().filter_map(|p| p.stress).map(|s| char::from(b'0' + s)));
            }
            None => {
                oov_tokens += 1;
                pattern.extend(std::iter::repeat_n('1', heuristic_syllables(&token)));
            }
        }
    }
    LineStress {
        pattern: StressPattern(pattern),
        oov_tokens,
    }
}
