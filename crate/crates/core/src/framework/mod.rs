//! Analyzer registry and the analyze/evaluate contract.
//!
//! An analyzer measures one thing about a poem or a collection and
//! returns a named [`Value`]. Evaluation compares those values against
//! [`Expectation`]s, either an exact value or an inclusive numeric range,
//! and yields a pass/fail verdict per expectation.
//!
//! Analyzers are grouped by [`Aspect`] and split by [`AnalyzerScope`].
//! A failing (or panicking) analyzer produces an error-marked result and
//! never affects the others run in the same batch.

mod builtin;
mod evaluate;

pub use builtin::{builtin_registry, ids};
pub use evaluate::{evaluate, parse_expectations, EvaluationResult, Expectation, Issue, Target, Verdict, NUMERIC_TOLERANCE};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{Poem, PoemCollection, TokenPolicy};
use crate::exec::Execution;
use crate::lexsem::Embedder;
use crate::novelty::{InterMode, Sample};
use crate::phonetics::PronLexicon;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameworkError {
    #[error("analyzer `{0}` is already registered")]
    DuplicateId(String),
    #[error("analyzer `{id}` is declared {declared} but its function takes a {actual}")]
    ScopeConflict {
        id: String,
        declared: AnalyzerScope,
        actual: AnalyzerScope,
    },
    #[error("invalid expectation: {0}")]
    InvalidExpectation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aspect {
    Poetic,
    Novelty,
    Fluency,
    Lexsem,
}

impl Aspect {
    pub const ALL: [Aspect; 4] = [Aspect::Poetic, Aspect::Novelty, Aspect::Fluency, Aspect::Lexsem];

    pub fn as_str(self) -> &'static str {
        match self {
            Aspect::Poetic => "poetic",
            Aspect::Novelty => "novelty",
            Aspect::Fluency => "fluency",
            Aspect::Lexsem => "lexsem",
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyzerScope {
    SinglePoem,
    Collection,
}

impl fmt::Display for AnalyzerScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnalyzerScope::SinglePoem => "single-poem",
            AnalyzerScope::Collection => "collection",
        })
    }
}

/// Language an analyzer supports.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Language {
    Independent,
    Code(String),
}

impl Language {
    pub fn code(code: impl Into<String>) -> Self {
        Language::Code(code.into())
    }

    pub fn accepts(&self, code: &str) -> bool {
        match self {
            Language::Independent => true,
            Language::Code(c) => c.eq_ignore_ascii_case(code),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Language::Independent => f.write_str("independent"),
            Language::Code(c) => f.write_str(c),
        }
    }
}

impl Serialize for Language {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzerDescriptor {
    pub id: String,
    pub display_name: String,
    pub aspect: Aspect,
    pub scope: AnalyzerScope,
    pub language: Language,
}

impl AnalyzerDescriptor {
    pub fn new(id: &str, display_name: &str, aspect: Aspect, scope: AnalyzerScope, language: Language) -> Self {
        AnalyzerDescriptor {
            id: id.to_string(),
            display_name: display_name.to_string(),
            aspect,
            scope,
            language,
        }
    }
}

/// Output of one analyzer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
    NumberList(Vec<f64>),
    Distribution(BTreeMap<String, f64>),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "text",
            Value::NumberList(_) => "number-list",
            Value::Distribution(_) => "labeled-distribution",
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Number(v as f64)
    }
}

/// The name/value pair an analyzer function returns.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub value: Value,
}

impl Measurement {
    pub fn new(name: impl Into<String>, value: impl Into<Value>) -> Self {
        Measurement {
            name: name.into(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalyzerError {
    #[error("analyzer `{analyzer}` is {expected} but the subject is a {actual}")]
    ScopeMismatch {
        analyzer: String,
        expected: String,
        actual: String,
    },
    #[error("analyzer `{analyzer}` supports `{supported}`, poem `{poem}` is `{language}`")]
    LanguageMismatch {
        analyzer: String,
        supported: String,
        poem: String,
        language: String,
    },
    #[error("no analyzer registered as `{analyzer}`")]
    UnknownAnalyzer { analyzer: String },
    #[error("{message}")]
    Failed { message: String },
    #[error("analyzer panicked: {message}")]
    Panicked { message: String },
}

impl AnalyzerError {
    pub fn failed(message: impl fmt::Display) -> Self {
        AnalyzerError::Failed {
            message: message.to_string(),
        }
    }
}

/// Shared inputs every analyzer may read.
#[derive(Clone)]
pub struct Context {
    pub lexicon: Arc<PronLexicon>,
    pub policy: TokenPolicy,
    pub rouge_n: usize,
    pub novelty_mode: InterMode,
    pub sample: Option<Sample>,
    /// When absent, topic retrieval fits a TF-IDF encoder on the collection.
    pub embedder: Option<Arc<dyn Embedder>>,
    pub exec: Execution,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            lexicon: Arc::new(PronLexicon::new()),
            policy: TokenPolicy::default(),
            rouge_n: 1,
            novelty_mode: InterMode::SingleString,
            sample: None,
            embedder: None,
            exec: Execution::default(),
        }
    }
}

impl Context {
    pub fn with_lexicon(lexicon: PronLexicon) -> Self {
        Context {
            lexicon: Arc::new(lexicon),
            ..Context::default()
        }
    }
}

type PoemFn = dyn Fn(&Poem, &Context) -> Result<Measurement, AnalyzerError> + Send + Sync;
type CollectionFn = dyn Fn(&PoemCollection, &Context) -> Result<Measurement, AnalyzerError> + Send + Sync;

pub enum Analyzer {
    Poem(Box<PoemFn>),
    Collection(Box<CollectionFn>),
}

impl Analyzer {
    pub fn poem<F>(f: F) -> Self
    where
        F: Fn(&Poem, &Context) -> Result<Measurement, AnalyzerError> + Send + Sync + 'static,
    {
        Analyzer::Poem(Box::new(f))
    }

    pub fn collection<F>(f: F) -> Self
    where
        F: Fn(&PoemCollection, &Context) -> Result<Measurement, AnalyzerError> + Send + Sync + 'static,
    {
        Analyzer::Collection(Box::new(f))
    }

    fn scope(&self) -> AnalyzerScope {
        match self {
            Analyzer::Poem(_) => AnalyzerScope::SinglePoem,
            Analyzer::Collection(_) => AnalyzerScope::Collection,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Poem(&'a Poem),
    Collection(&'a PoemCollection),
}

impl Subject<'_> {
    fn scope(&self) -> AnalyzerScope {
        match self {
            Subject::Poem(_) => AnalyzerScope::SinglePoem,
            Subject::Collection(_) => AnalyzerScope::Collection,
        }
    }
}

/// Narrows the registry. Unset fields match everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Filter {
    pub aspect: Option<Aspect>,
    pub scope: Option<AnalyzerScope>,
    /// Keeps language-independent analyzers and those for this code.
    pub language: Option<String>,
}

impl Filter {
    pub fn aspect(aspect: Aspect) -> Self {
        Filter {
            aspect: Some(aspect),
            ..Filter::default()
        }
    }

    pub fn scope(scope: AnalyzerScope) -> Self {
        Filter {
            scope: Some(scope),
            ..Filter::default()
        }
    }

    fn matches(&self, d: &AnalyzerDescriptor) -> bool {
        self.aspect.is_none_or(|a| a == d.aspect)
            && self.scope.is_none_or(|s| s == d.scope)
            && self.language.as_deref().is_none_or(|l| d.language.accepts(l))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Every analyzer of the subject's scope.
    All,
    /// A filter; when its scope is unset the subject's scope is implied.
    Filter(Filter),
    /// Explicit ids; scope mismatches and unknown ids are reported in-band.
    Ids(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub analyzer: String,
    pub name: String,
    pub outcome: Result<Value, AnalyzerError>,
}

impl AnalysisResult {
    pub fn value(&self) -> Option<&Value> {
        self.outcome.as_ref().ok()
    }
}

impl Serialize for AnalysisResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("AnalysisResult", 3)?;
        s.serialize_field("analyzer", &self.analyzer)?;
        s.serialize_field("name", &self.name)?;
        match &self.outcome {
            Ok(value) => s.serialize_field("value", value)?,
            Err(error) => s.serialize_field("error", &ErrorView(error))?,
        }
        s.end()
    }
}

struct ErrorView<'a>(&'a AnalyzerError);

impl Serialize for ErrorView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let kind = match self.0 {
            AnalyzerError::ScopeMismatch { .. } => "scope-mismatch",
            AnalyzerError::LanguageMismatch { .. } => "language-mismatch",
            AnalyzerError::UnknownAnalyzer { .. } => "unknown-analyzer",
            AnalyzerError::Failed { .. } => "failed",
            AnalyzerError::Panicked { .. } => "panicked",
        };
        let mut s = serializer.serialize_struct("AnalyzerError", 2)?;
        s.serialize_field("kind", kind)?;
        s.serialize_field("message", &self.0.to_string())?;
        s.end()
    }
}

struct Entry {
    descriptor: AnalyzerDescriptor,
    analyzer: Analyzer,
}

/// Analyzers in registration order, addressable by id.
#[derive(Default)]
pub struct Registry {
    entries: Vec<Entry>,
    by_id: HashMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, descriptor: AnalyzerDescriptor, analyzer: Analyzer) -> Result<&mut Self, FrameworkError> {
        if self.by_id.contains_key(&descriptor.id) {
            return Err(FrameworkError::DuplicateId(descriptor.id));
        }
        if descriptor.scope != analyzer.scope() {
            return Err(FrameworkError::ScopeConflict {
                id: descriptor.id,
                declared: descriptor.scope,
                actual: analyzer.scope(),
            });
        }
        self.by_id.insert(descriptor.id.clone(), self.entries.len());
        self.entries.push(Entry { descriptor, analyzer });
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&AnalyzerDescriptor> {
        self.by_id.get(id).map(|&i| &self.entries[i].descriptor)
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &AnalyzerDescriptor> {
        self.entries.iter().map(|e| &e.descriptor)
    }

    pub fn list(&self, filter: &Filter) -> Vec<&AnalyzerDescriptor> {
        self.descriptors().filter(|d| filter.matches(d)).collect()
    }

    /// Runs the selected analyzers on `subject`, one result per analyzer
    /// in registration order.
    pub fn analyze(&self, subject: Subject<'_>, selection: &Selection, ctx: &Context) -> Vec<AnalysisResult> {
        enum Pick<'a> {
            Run(&'a Entry),
            Unknown(&'a str),
        }

        let picks: Vec<Pick<'_>> = match selection {
            Selection::All => self
                .entries
                .iter()
                .filter(|e| e.descriptor.scope == subject.scope())
                .map(Pick::Run)
                .collect(),
            Selection::Filter(filter) => {
                let mut filter = filter.clone();
                filter.scope.get_or_insert(subject.scope());
                self.entries
                    .iter()
                    .filter(|e| filter.matches(&e.descriptor))
                    .map(Pick::Run)
                    .collect()
            }
            Selection::Ids(ids) => {
                let mut known: Vec<usize> = ids.iter().filter_map(|id| self.by_id.get(id).copied()).collect();
                known.sort_unstable();
                known.dedup();
                let mut picks: Vec<Pick<'_>> = known.into_iter().map(|i| Pick::Run(&self.entries[i])).collect();
                picks.extend(
                    ids.iter()
                        .filter(|id| !self.by_id.contains_key(id.as_str()))
                        .map(|id| Pick::Unknown(id.as_str())),
                );
                picks
            }
        };

        ctx.exec.map(&picks, |pick| match pick {
            Pick::Run(entry) => run_entry(entry, subject, ctx),
            Pick::Unknown(id) => AnalysisResult {
                analyzer: id.to_string(),
                name: id.to_string(),
                outcome: Err(AnalyzerError::UnknownAnalyzer {
                    analyzer: id.to_string(),
                }),
            },
        })
    }
}

fn language_check(d: &AnalyzerDescriptor, subject: Subject<'_>) -> Result<(), AnalyzerError> {
    let mismatch = |poem: &Poem| AnalyzerError::LanguageMismatch {
        analyzer: d.id.clone(),
        supported: d.language.to_string(),
        poem: poem.id().to_string(),
        language: poem.meta.language.clone(),
    };
    match subject {
        Subject::Poem(p) if !d.language.accepts(&p.meta.language) => Err(mismatch(p)),
        Subject::Collection(c) => match c.poems().iter().find(|p| !d.language.accepts(&p.meta.language)) {
            Some(p) => Err(mismatch(p)),
            None => Ok(()),
        },
        _ => Ok(()),
    }
}

fn run_entry(entry: &Entry, subject: Subject<'_>, ctx: &Context) -> AnalysisResult {
    let d = &entry.descriptor;
    let outcome = language_check(d, subject).and_then(|()| {
        let call = || match (&entry.analyzer, subject) {
            (Analyzer::Poem(f), Subject::Poem(p)) => f(p, ctx),
            (Analyzer::Collection(f), Subject::Collection(c)) => f(c, ctx),
            _ => Err(AnalyzerError::ScopeMismatch {
                analyzer: d.id.clone(),
                expected: d.scope.to_string(),
                actual: subject.scope().to_string(),
            }),
        };
        catch_unwind(AssertUnwindSafe(call)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| String::from("non-string panic payload"));
            Err(AnalyzerError::Panicked { message })
        })
    });
    match outcome {
        Ok(m) => AnalysisResult {
            analyzer: d.id.clone(),
            name: m.name,
            outcome: Ok(m.value),
        },
        Err(e) => AnalysisResult {
            analyzer: d.id.clone(),
            name: d.id.clone(),
            outcome: Err(e),
        },
    }
}
