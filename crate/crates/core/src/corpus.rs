//! Poems, topic-organized collections and the shared tokenizer.
//!
//! A poem file is UTF-8 plain text; stanzas are maximal runs of non-blank
//! lines separated by one or more blank lines. A collection is a directory
//! whose immediate subdirectories name topics; files directly under the
//! root are topicless.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("poem contains no non-blank line")]
    EmptyPoem,
    #[error("stanza {0} has no lines")]
    EmptyStanza(usize),
    #[error("line {line} of stanza {stanza} is blank or contains a line break")]
    InvalidLine { stanza: usize, line: usize },
    #[error("duplicate poem id `{0}`")]
    DuplicateId(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Identity and provenance of a poem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoemMeta {
    pub id: String,
    /// Author or generating system.
    pub source: String,
    /// Two-letter language code.
    pub language: String,
    pub topic: Option<String>,
}

impl PoemMeta {
    pub fn new(id: impl Into<String>) -> Self {
        PoemMeta {
            id: id.into(),
            source: String::from("unknown"),
            language: String::from("en"),
            topic: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = language.into();
        self
    }

    pub fn with_topic(mut self, topic: impl Into<String>) -> Self {
        self.topic = Some(topic.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poem {
    #[serde(flatten)]
    pub meta: PoemMeta,
    stanzas: Vec<Vec<String>>,
}

impl Poem {
    /// Builds a poem from explicit stanzas, checking the structural
    /// invariants: at least one stanza, no empty stanza, no blank line and
    /// no embedded line break.
    pub fn new(meta: PoemMeta, stanzas: Vec<Vec<String>>) -> Result<Self, CorpusError> {
        if stanzas.is_empty() {
            return Err(CorpusError::EmptyPoem);
        }
        for (s, stanza) in stanzas.iter().enumerate() {
            if stanza.is_empty() {
                return Err(CorpusError::EmptyStanza(s));
            }
            for (l, line) in stanza.iter().enumerate() {
                if line.trim().is_empty() || line.contains(['\n', '\r']) {
                    return Err(CorpusError::InvalidLine { stanza: s, line: l });
                }
            }
        }
        Ok(Poem { meta, stanzas })
    }

    pub fn id(&self) -> &str {
        &self.meta.id
    }

    pub fn stanzas(&self) -> &[Vec<String>] {
        &self.stanzas
    }

    /// All lines in reading order, ignoring stanza boundaries.
    pub fn lines(&self) -> impl Iterator<Item = &str> + '_ {
        self.stanzas.iter().flatten().map(String::as_str)
    }

    pub fn line_count(&self) -> usize {
        self.stanzas.iter().map(Vec::len).sum()
    }

    pub fn stanza_count(&self) -> usize {
        self.stanzas.len()
    }

    /// All lines joined by single spaces.
    pub fn joined_text(&self) -> String {
        self.lines().collect::<Vec<_>>().join(" ")
    }

    /// Tokens of every line, concatenated in reading order.
    pub fn tokens(&self, policy: &TokenPolicy) -> Vec<String> {
        self.lines().flat_map(|line| tokenize(line, policy)).collect()
    }

    /// Serializes back to the plain-text file format: lines joined by
    /// newlines, stanzas separated by one blank line.
    pub fn to_text(&self) -> String {
        self.stanzas
            .iter()
            .map(|stanza| stanza.join("\n"))
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

impl fmt::Display for Poem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Splits poem text into stanzas at runs of blank lines. Leading and
/// trailing blank lines are ignored; line text is kept verbatim apart
/// from a trailing carriage return.
pub fn parse_poem(text: &str, meta: PoemMeta) -> Result<Poem, CorpusError> {
    let mut stanzas: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for raw in text.lines() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if !current.is_empty() {
                stanzas.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line.to_string());
        }
    }
    if !current.is_empty() {
        stanzas.push(current);
    }
    if stanzas.is_empty() {
        return Err(CorpusError::EmptyPoem);
    }
    Poem::new(meta, stanzas)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PoemCollection {
    poems: Vec<Poem>,
    topics: BTreeSet<String>,
}

impl PoemCollection {
    pub fn new(poems: Vec<Poem>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        let mut topics = BTreeSet::new();
        for poem in &poems {
            if !seen.insert(poem.id().to_string()) {
                return Err(CorpusError::DuplicateId(poem.id().to_string()));
            }
            if let Some(topic) = &poem.meta.topic {
                topics.insert(topic.clone());
            }
        }
        Ok(PoemCollection { poems, topics })
    }

    pub fn poems(&self) -> &[Poem] {
        &self.poems
    }

    pub fn topics(&self) -> &BTreeSet<String> {
        &self.topics
    }

    pub fn len(&self) -> usize {
        self.poems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poems.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Poem> {
        self.poems.iter().find(|p| p.id() == id)
    }

    /// Poems labeled with `topic`, in collection order.
    pub fn with_topic<'a>(&'a self, topic: &'a str) -> impl Iterator<Item = &'a Poem> + 'a {
        self.poems
            .iter()
            .filter(move |p| p.meta.topic.as_deref() == Some(topic))
    }
}

/// A file that could not be turned into a poem during a collection load.
#[derive(Debug)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub error: CorpusError,
}

#[derive(Debug)]
pub struct LoadedCollection {
    pub collection: PoemCollection,
    pub skipped: Vec<SkippedFile>,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Source recorded on every poem; defaults to the root directory name.
    pub source: Option<String>,
    pub language: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            source: None,
            language: String::from("en"),
        }
    }
}

pub fn load_collection(root: &Path) -> Result<LoadedCollection, CorpusError> {
    load_collection_with(root, &LoadOptions::default())
}

/// Loads every poem file under `root`. Unreadable or empty files are
/// skipped and reported; only a failure to list `root` itself aborts.
/// Hidden entries (leading `.`) and anything deeper than one topic level
/// are ignored.
pub fn load_collection_with(root: &Path, options: &LoadOptions) -> Result<LoadedCollection, CorpusError> {
    let io_err = |path: &Path, source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let source = options.source.clone().unwrap_or_else(|| {
        root.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| String::from("unknown"))
    });

    // (relative id, absolute path, topic)
    let mut files: Vec<(String, PathBuf, Option<String>)> = Vec::new();
    let mut skipped = Vec::new();

    for entry in sorted_entries(root).map_err(|e| io_err(root, e))? {
        let name = entry.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match fs::metadata(&entry) {
            Ok(md) if md.is_dir() => match sorted_entries(&entry) {
                Ok(children) => {
                    for child in children {
                        let child_name = child.file_name().unwrap_or_default().to_string_lossy().into_owned();
                        match fs::metadata(&child) {
                            Ok(md) if md.is_dir() => {}
                            Ok(_) => files.push((format!("{name}/{child_name}"), child, Some(name.clone()))),
                            Err(e) => skipped.push(SkippedFile {
                                error: io_err(&child, e),
                                path: child,
                            }),
                        }
                    }
                }
                Err(e) => skipped.push(SkippedFile {
                    error: io_err(&entry, e),
                    path: entry,
                }),
            },
            Ok(_) => files.push((name, entry, None)),
            Err(e) => skipped.push(SkippedFile {
                error: io_err(&entry, e),
                path: entry,
            }),
        }
    }

    files.sort_by(|a, b| a.0.cmp(&b.0));
    let mut poems = Vec::with_capacity(files.len());
    for (id, path, topic) in files {
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) => {
                skipped.push(SkippedFile {
                    error: io_err(&path, e),
                    path,
                });
                continue;
            }
        };
        let mut meta = PoemMeta::new(id)
            .with_source(source.clone())
            .with_language(options.language.clone());
        meta.topic = topic;
        match parse_poem(&text, meta) {
            Ok(poem) => poems.push(poem),
            Err(error) => skipped.push(SkippedFile { path, error }),
        }
    }

    Ok(LoadedCollection {
        collection: PoemCollection::new(poems)?,
        skipped,
    })
}

fn sorted_entries(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        out.push(entry.path());
    }
    out.sort();
    Ok(out)
}

/// Tokenization switches shared by every metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenPolicy {
    pub lowercase: bool,
    pub strip_punctuation: bool,
}

impl Default for TokenPolicy {
    fn default() -> Self {
        TokenPolicy {
            lowercase: true,
            strip_punctuation: true,
        }
    }
}

/// Whitespace tokenizer. Edge punctuation is trimmed per token (internal
/// apostrophes and hyphens survive); empty tokens are dropped.
pub fn tokenize(line: &str, policy: &TokenPolicy) -> Vec<String> {
    line.split_whitespace()
        .map(|tok| {
            if policy.strip_punctuation {
                tok.trim_matches(|c: char| !c.is_alphanumeric())
            } else {
                tok
            }
        })
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            if policy.lowercase {
                tok.to_lowercase()
            } else {
                tok.to_string()
            }
        })
        .collect()
}
