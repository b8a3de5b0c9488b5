//! Command-line front end: loads poems, runs the analyzer registry and
//! writes JSON or CSV reports.
//!
//! Exit codes: 0 on success, 1 when `evaluate` has a failing expectation,
//! 2 on usage, configuration or input errors.

pub mod config;
pub mod plot;
pub mod report;

use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context as _, Result};
use clap::Parser;

use poemeval::corpus::{load_collection_with, parse_poem, LoadOptions, PoemMeta};
use poemeval::framework::{builtin_registry, evaluate, parse_expectations, Aspect, Context, Filter, Registry, Selection, Subject};
use poemeval::lexsem::{Embedder, HttpEmbedder};
use poemeval::novelty::{collection_novelty, NoveltyRequest, Sample, Scope};
use poemeval::phonetics::load_lexicon;
use poemeval::{Poem, PoemCollection, PronLexicon};

use config::{Cli, CommandKind, EmbedderChoice, Format, RunConfig};
use report::{CollectionReport, EvaluationReport, LexiconInfo, Metadata, OovStats, PoemReport, Report, RunTimes, SkippedFileReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_EVALUATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// The rendered report and the exit status it implies.
#[derive(Debug)]
pub struct RunOutput {
    pub exit_code: i32,
    pub rendered: String,
    pub report: Report,
}

/// Parses `args` (including the program name) and runs. Usage and
/// runtime errors are rendered as text with exit code 2.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { (code, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(msg) => return (EXIT_USAGE, String::new(), format!("error: {msg}\n")),
    };
    match run(&config) {
        Ok(out) => match &config.out {
            Some(path) => match write_atomic(path, &out.rendered) {
                Ok(()) => (out.exit_code, String::new(), String::new()),
                Err(e) => (EXIT_USAGE, String::new(), format!("error: {e:#}\n")),
            },
            None => (out.exit_code, out.rendered, String::new()),
        },
        Err(e) => (EXIT_USAGE, String::new(), format!("error: {e:#}\n")),
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", Path::new(&tmp).display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

struct Lexicon {
    lexicon: PronLexicon,
    info: LexiconInfo,
}

fn load_lexicon_file(path: Option<&Path>) -> Result<Lexicon> {
    let Some(path) = path else {
        return Ok(Lexicon {
            lexicon: PronLexicon::new(),
            info: LexiconInfo {
                id: String::from("none"),
                entries: 0,
                malformed_lines: 0,
            },
        });
    };
    let file = fs::File::open(path).with_context(|| format!("opening lexicon {}", path.display()))?;
    let loaded = load_lexicon(BufReader::new(file));
    Ok(Lexicon {
        info: LexiconInfo {
            id: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            entries: loaded.lexicon.len(),
            malformed_lines: loaded.errors.len(),
        },
        lexicon: loaded.lexicon,
    })
}

fn build_context(config: &RunConfig, lexicon: PronLexicon) -> Result<Context> {
    let embedder: Option<Arc<dyn Embedder>> = match &config.embedder {
        EmbedderChoice::Tfidf => None,
        EmbedderChoice::Url(url) => Some(Arc::new(
            HttpEmbedder::new(url.clone(), Duration::from_secs(config.embed_timeout_secs))
                .map_err(|e| anyhow::anyhow!("{e}"))?,
        )),
    };
    Ok(Context {
        lexicon: Arc::new(lexicon),
        policy: config.policy,
        rouge_n: config.rouge_n,
        novelty_mode: config.novelty_mode,
        sample: config.sample.zip(config.seed).map(|(count, seed)| Sample { count, seed }),
        embedder,
        ..Context::default()
    })
}

fn read_poem(path: &Path, language: &str) -> Result<Poem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let id = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    parse_poem(&text, PoemMeta::new(id).with_language(language)).with_context(|| format!("parsing {}", path.display()))
}

fn read_collection(path: &Path, config: &RunConfig, skipped: &mut Vec<SkippedFileReport>) -> Result<PoemCollection> {
    let options = LoadOptions {
        source: config.source.clone(),
        language: config.language.clone(),
    };
    let loaded = load_collection_with(path, &options).with_context(|| format!("loading {}", path.display()))?;
    skipped.extend(loaded.skipped.into_iter().map(|s| SkippedFileReport {
        path: s.path.display().to_string(),
        error: s.error.to_string(),
    }));
    Ok(loaded.collection)
}

fn analyze_poems(registry: &Registry, poems: &[Poem], ctx: &Context) -> Vec<PoemReport> {
    poems
        .iter()
        .map(|poem| PoemReport {
            results: registry.analyze(Subject::Poem(poem), &Selection::All, ctx),
            poem: poem.clone(),
        })
        .collect()
}

fn analyze_collection(registry: &Registry, collection: &PoemCollection, ctx: &Context) -> CollectionReport {
    let results = registry.analyze(Subject::Collection(collection), &Selection::All, ctx);
    let mut notes = Vec::new();
    let inter_novelty = if collection.len() >= 2 {
        let request = NoveltyRequest {
            scope: Scope::Inter,
            mode: ctx.novelty_mode,
            n: ctx.rouge_n,
            sample: ctx.sample,
        };
        collection_novelty(collection, &request, &ctx.policy)
            .map_err(|e| notes.push(format!("inter novelty: {e}")))
            .ok()
    } else {
        None
    };
    let retrieval = if collection.topics().is_empty() {
        None
    } else {
        let report = match &ctx.embedder {
            Some(e) => poemeval::lexsem::topic_retrieval_f1(collection, e.as_ref()),
            None => poemeval::lexsem::fit_tfidf_for_collection(collection, &ctx.policy)
                .and_then(|t| poemeval::lexsem::topic_retrieval_f1(collection, &t)),
        };
        report.map_err(|e| notes.push(format!("topic retrieval: {e}"))).ok()
    };
    CollectionReport {
        poem_count: collection.len(),
        topics: collection.topics().iter().cloned().collect(),
        results,
        inter_novelty,
        retrieval,
        notes,
    }
}

/// Executes one configured run and renders its report.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let started = chrono::Utc::now();
    let lexicon = load_lexicon_file(config.lexicon.as_deref())?;
    let lexicon_info = lexicon.info;
    let registry = builtin_registry(&config.language);
    let ctx = build_context(config, lexicon.lexicon)?;

    let mut skipped_files = Vec::new();
    let mut poems_out = Vec::new();
    let mut collection_out = None;
    let mut evaluation = None;
    let mut analyzers = Vec::new();
    let mut aspects = None;
    let mut oov_poems: Vec<Poem> = Vec::new();
    let mut exit_code = EXIT_OK;

    let input = config.input.as_deref();
    match config.command {
        CommandKind::ListAnalyzers => {
            analyzers = registry.descriptors().cloned().collect();
            aspects = Some(
                Aspect::ALL
                    .iter()
                    .map(|a| {
                        let ids = registry.list(&Filter::aspect(*a)).iter().map(|d| d.id.clone()).collect();
                        (a.as_str().to_string(), ids)
                    })
                    .collect(),
            );
        }
        CommandKind::Analyze => {
            let poem = read_poem(input.expect("analyze has an input"), &config.language)?;
            poems_out = analyze_poems(&registry, std::slice::from_ref(&poem), &ctx);
            oov_poems.push(poem);
        }
        CommandKind::AnalyzeCollection => {
            let collection = read_collection(input.expect("analyze-collection has an input"), config, &mut skipped_files)?;
            poems_out = analyze_poems(&registry, collection.poems(), &ctx);
            collection_out = Some(analyze_collection(&registry, &collection, &ctx));
            oov_poems.extend(collection.poems().iter().cloned());
        }
        CommandKind::Evaluate => {
            let path = input.expect("evaluate has an input");
            let exp_path = config.expectations.as_deref().expect("validated in RunConfig");
            let text = fs::read_to_string(exp_path).with_context(|| format!("reading {}", exp_path.display()))?;
            let expectations = parse_expectations(&text).map_err(|e| anyhow::anyhow!("{}: {e}", exp_path.display()))?;
            let (subject, results) = if path.is_dir() {
                let collection = read_collection(path, config, &mut skipped_files)?;
                let results = registry.analyze(Subject::Collection(&collection), &Selection::All, &ctx);
                oov_poems.extend(collection.poems().iter().cloned());
                (path.display().to_string(), results)
            } else {
                let poem = read_poem(path, &config.language)?;
                let results = registry.analyze(Subject::Poem(&poem), &Selection::All, &ctx);
                let subject = poem.id().to_string();
                poems_out.push(PoemReport {
                    poem: poem.clone(),
                    results: results.clone(),
                });
                oov_poems.push(poem);
                (subject, results)
            };
            let verdicts = evaluate(&results, &expectations);
            let passed = verdicts.iter().all(|v| v.passed());
            if !passed {
                exit_code = EXIT_FAILED_EVALUATION;
            }
            evaluation = Some(EvaluationReport {
                subject,
                passed,
                results: verdicts,
            });
        }
    }

    let oov = OovStats::measure(&oov_poems, &ctx.lexicon, &ctx.policy);
    let mut report = Report {
        command: config.command,
        analyzers,
        aspects,
        poems: poems_out,
        collection: collection_out,
        evaluation,
        plot_data: None,
        skipped_files,
        metadata: Metadata {
            config: config.clone(),
            lexicon: lexicon_info,
            oov,
            run: None,
        },
    };
    if config.plot_data {
        report.plot_data = Some(plot::emit_plot_data(&report));
    }
    if !config.stable_output {
        report.metadata.run = Some(RunTimes {
            started_at: started.to_rfc3339(),
            finished_at: chrono::Utc::now().to_rfc3339(),
        });
    }
    let rendered = match config.format {
        Format::Json => report::to_json(&report)?,
        Format::Csv => report::to_csv(&report)?,
    };
    Ok(RunOutput {
        exit_code,
        rendered,
        report,
    })
}
