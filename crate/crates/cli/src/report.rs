use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use poemeval::framework::{AnalysisResult, AnalyzerDescriptor, EvaluationResult, Value};
use poemeval::lexsem::RetrievalReport;
use poemeval::novelty::NoveltyReport;
use poemeval::phonetics::syllable_count_word;
use poemeval::{tokenize, Poem, PronLexicon, TokenPolicy};

use crate::config::RunConfig;
use crate::plot::PlotData;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: crate::config::CommandKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub analyzers: Vec<AnalyzerDescriptor>,
    /// Analyzer ids per aspect (`list-analyzers` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aspects: Option<BTreeMap<String, Vec<String>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub poems: Vec<PoemReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collection: Option<CollectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<PlotData>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped_files: Vec<SkippedFileReport>,
    pub metadata: Metadata,
}

#[derive(Debug, Serialize)]
pub struct PoemReport {
    #[serde(flatten)]
    pub poem: Poem,
    pub results: Vec<AnalysisResult>,
}

#[derive(Debug, Serialize)]
pub struct CollectionReport {
    pub poem_count: usize,
    pub topics: Vec<String>,
    pub results: Vec<AnalysisResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inter_novelty: Option<NoveltyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<RetrievalReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct EvaluationReport {
    pub subject: String,
    pub passed: bool,
    pub results: Vec<EvaluationResult>,
}

#[derive(Debug, Serialize)]
pub struct SkippedFileReport {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub config: RunConfig,
    pub lexicon: LexiconInfo,
    pub oov: OovStats,
    /// Absent with `--stable-output`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunTimes>,
}

#[derive(Debug, Serialize)]
pub struct LexiconInfo {
    pub id: String,
    pub entries: usize,
    pub malformed_lines: usize,
}

#[derive(Debug, Default, Serialize)]
pub struct OovStats {
    pub tokens: usize,
    pub oov_tokens: usize,
    pub rate: f64,
}

impl OovStats {
    pub fn measure<'a>(poems: impl IntoIterator<Item = &'a Poem>, lexicon: &PronLexicon, policy: &TokenPolicy) -> Self {
        let mut stats = OovStats::default();
        for poem in poems {
            for line in poem.lines() {
                for token in tokenize(line, policy) {
                    stats.tokens += 1;
                    stats.oov_tokens += usize::from(syllable_count_word(&token, lexicon).oov);
                }
            }
        }
        if stats.tokens > 0 {
            stats.rate = stats.oov_tokens as f64 / stats.tokens as f64;
        }
        stats
    }
}

#[derive(Debug, Serialize)]
pub struct RunTimes {
    pub started_at: String,
    pub finished_at: String,
}

pub fn to_json(report: &Report) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Scalar rendering shared by the CSV writer; numbers use the same
/// formatting as the JSON report.
pub fn render_value(value: &Value) -> String {
    let num = |v: &f64| serde_json::to_string(v).unwrap_or_else(|_| v.to_string());
    match value {
        Value::Number(v) => num(v),
        Value::Text(t) => t.clone(),
        Value::NumberList(items) => items.iter().map(num).collect::<Vec<_>>().join(";"),
        Value::Distribution(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", num(v)))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

/// Flat CSV: `section,subject,analyzer,name,kind,value`. Failed analyzers
/// have kind `error` and the message as value.
pub fn to_csv(report: &Report) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "subject", "analyzer", "name", "kind", "value"])?;
    let write_results = |w: &mut csv::Writer<Vec<u8>>, section: &str, subject: &str, results: &[AnalysisResult]| -> csv::Result<()> {
        for r in results {
            let (kind, value) = match &r.outcome {
                Ok(v) => (v.kind().to_string(), render_value(v)),
                Err(e) => ("error".to_string(), e.to_string()),
            };
            w.write_record([section, subject, &r.analyzer, &r.name, &kind, &value])?;
        }
        Ok(())
    };
    for poem in &report.poems {
        write_results(&mut w, "poem", poem.poem.id(), &poem.results)?;
    }
    if let Some(c) = &report.collection {
        write_results(&mut w, "collection", "", &c.results)?;
    }
    if let Some(e) = &report.evaluation {
        for r in &e.results {
            let verdict = if r.passed() { "pass" } else { "fail" };
            w.write_record(["evaluation", &e.subject, &r.analyzer, "verdict", "text", verdict])?;
        }
    }
    for d in &report.analyzers {
        w.write_record(["analyzer", "", &d.id, &d.display_name, d.aspect.as_str(), &d.language.to_string()])?;
    }
    let mut bytes = w.into_inner()?;
    bytes.flush()?;
    Ok(String::from_utf8(bytes)?)
}
