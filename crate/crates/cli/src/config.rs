use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use poemeval::novelty::InterMode;
use poemeval::TokenPolicy;

#[derive(Debug, Parser)]
#[command(name = "poemeval", version, about = "Analyze and evaluate poems and poem collections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every single-poem analyzer on one poem file.
    Analyze { input: PathBuf },
    /// Run poem and collection analyzers over a directory of poems.
    AnalyzeCollection { input: PathBuf },
    /// Compare analyzer results for a poem file (or collection directory)
    /// against an expectation file. Exits 1 if any expectation fails.
    Evaluate { input: PathBuf },
    /// List registered analyzers grouped by aspect.
    ListAnalyzers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "url", rename_all = "lowercase")]
pub enum EmbedderChoice {
    Tfidf,
    Url(String),
}

impl FromStr for EmbedderChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "tfidf" {
            return Ok(EmbedderChoice::Tfidf);
        }
        match s.strip_prefix("url=") {
            Some(url) if !url.is_empty() => Ok(EmbedderChoice::Url(url.to_string())),
            _ => Err(format!("expected `tfidf` or `url=<endpoint>`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Language code of the input poems.
    #[arg(long, global = true, default_value = "en")]
    pub lang: String,

    /// Pronunciation lexicon (CMU dictionary format).
    #[arg(long, global = true, env = "POEMEVAL_LEXICON")]
    pub lexicon: Option<PathBuf>,

    /// Keep letter case when tokenizing.
    #[arg(long, global = true)]
    pub no_lowercase: bool,

    /// Keep edge punctuation on tokens.
    #[arg(long, global = true)]
    pub keep_punctuation: bool,

    /// ROUGE n-gram order.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub rouge_n: u16,

    /// Inter-poem novelty mode.
    #[arg(long, global = true, default_value = "single-string", value_parser = parse_mode)]
    pub novelty_mode: InterMode,

    /// Score only N randomly drawn units in collection novelty.
    #[arg(long, global = true, requires = "seed")]
    pub sample: Option<usize>,

    /// Seed for --sample.
    #[arg(long, global = true, requires = "sample")]
    pub seed: Option<u64>,

    /// Topic-retrieval encoder: `tfidf` or `url=<endpoint>`.
    #[arg(long, global = true)]
    pub embedder: Option<EmbedderChoice>,

    /// Embedding endpoint used when --embedder is not given.
    #[arg(long, global = true, env = "POEMEVAL_EMBEDDING_URL", hide_env_values = true)]
    pub embedding_url: Option<String>,

    /// Per-request timeout for the embedding service, in seconds.
    #[arg(long, global = true, default_value_t = 30)]
    pub embed_timeout: u64,

    /// Expectation file (JSON) for `evaluate`.
    #[arg(long, global = true)]
    pub expect: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Add histograms and five-number summaries to the report.
    #[arg(long, global = true)]
    pub plot_data: bool,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit timestamps so identical runs give byte-identical output.
    #[arg(long, global = true)]
    pub stable_output: bool,

    /// Source (author/system) recorded for collection poems; defaults to
    /// the directory name.
    #[arg(long, global = true)]
    pub source: Option<String>,
}

fn parse_mode(s: &str) -> Result<InterMode, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Analyze,
    AnalyzeCollection,
    Evaluate,
    ListAnalyzers,
}

/// Validated settings for one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<PathBuf>,
    pub language: String,
    pub lexicon: Option<PathBuf>,
    pub policy: TokenPolicy,
    pub rouge_n: usize,
    pub novelty_mode: InterMode,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
    pub embedder: EmbedderChoice,
    pub embed_timeout_secs: u64,
    pub expectations: Option<PathBuf>,
    pub format: Format,
    pub plot_data: bool,
    pub out: Option<PathBuf>,
    pub stable_output: bool,
    pub source: Option<String>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let o = cli.options;
        let (command, input) = match cli.command {
            Command::Analyze { input } => (CommandKind::Analyze, Some(input)),
            Command::AnalyzeCollection { input } => (CommandKind::AnalyzeCollection, Some(input)),
            Command::Evaluate { input } => (CommandKind::Evaluate, Some(input)),
            Command::ListAnalyzers => (CommandKind::ListAnalyzers, None),
        };
        if command == CommandKind::Evaluate && o.expect.is_none() {
            return Err("evaluate requires --expect FILE".into());
        }
        if o.sample.is_some() != o.seed.is_some() {
            return Err("--sample and --seed must be given together".into());
        }
        if o.plot_data && o.format == Format::Csv {
            return Err("--plot-data is emitted as JSON only; drop --format csv".into());
        }
        let embedder = match (o.embedder, o.embedding_url) {
            (Some(choice), _) => choice,
            (None, Some(url)) if !url.is_empty() => EmbedderChoice::Url(url),
            _ => EmbedderChoice::Tfidf,
        };
        Ok(RunConfig {
            command,
            input,
            language: o.lang,
            lexicon: o.lexicon,
            policy: TokenPolicy {
                lowercase: !o.no_lowercase,
                strip_punctuation: !o.keep_punctuation,
            },
            rouge_n: usize::from(o.rouge_n),
            novelty_mode: o.novelty_mode,
            sample: o.sample,
            seed: o.seed,
            embedder,
            embed_timeout_secs: o.embed_timeout,
            expectations: o.expect,
            format: o.format,
            plot_data: o.plot_data,
            out: o.out,
            stable_output: o.stable_output,
            source: o.source,
        })
    }
}
