use std::collections::BTreeMap;

use super::{Analyzer, AnalyzerDescriptor, AnalyzerError, AnalyzerScope, Aspect, Context, Language, Measurement, Registry, Value};
use crate::lexsem::{fit_tfidf_for_collection, topic_retrieval_f1_with, type_token_ratio, RetrievalReport};
use crate::novelty::{collection_novelty_with, intra_poem_novelty, NoveltyRequest, Scope};
use crate::phonetics::{stress_pattern_line, syllable_count_line};
use crate::rhyme::{rhyme_pattern_count, rhyme_richness, rhyme_scheme};
use crate::PoemCollection;

/// Ids of the built-in analyzers.
pub mod ids {
    pub const LINE_COUNT: &str = "line-count";
    pub const STANZA_COUNT: &str = "stanza-count";
    pub const LINES_PER_STANZA: &str = "lines-per-stanza";
    pub const SYLLABLES_PER_LINE: &str = "syllables-per-line";
    pub const SCANSION: &str = "scansion";
    pub const RHYME_SCHEME: &str = "rhyme-scheme";
    pub const RHYME_PATTERN_COUNT: &str = "rhyme-pattern-count";
    pub const RHYME_RICHNESS: &str = "rhyme-richness";
    pub const INTRA_NOVELTY: &str = "intra-novelty";
    pub const TYPE_TOKEN_RATIO: &str = "type-token-ratio";
    pub const COLLECTION_INTRA_NOVELTY: &str = "collection-intra-novelty";
    pub const INTER_NOVELTY: &str = "inter-novelty";
    pub const COLLECTION_TYPE_TOKEN_RATIO: &str = "collection-type-token-ratio";
    pub const TOPIC_RETRIEVAL_F1: &str = "topic-retrieval-f1";
    pub const TOPIC_F1: &str = "topic-f1";
}

/// Registry with every built-in analyzer.
///
/// Lexicon-backed analyzers (syllables, rhyme) are tagged with
/// `lexicon_language`; scansion is English-only. The fluency aspect has no
/// analyzers.
pub fn builtin_registry(lexicon_language: &str) -> Registry {
    use AnalyzerScope::{Collection, SinglePoem};
    let lex_lang = || Language::code(lexicon_language);
    let mut r = Registry::new();
    let mut add = |id: &str, name: &str, aspect: Aspect, scope: AnalyzerScope, language: Language, analyzer: Analyzer| {
        r.register(AnalyzerDescriptor::new(id, name, aspect, scope, language), analyzer)
            .expect("built-in ids are unique");
    };

    add(
        ids::LINE_COUNT,
        "Line count",
        Aspect::Poetic,
        SinglePoem,
        Language::Independent,
        Analyzer::poem(|p, _| Ok(Measurement::new(ids::LINE_COUNT, p.line_count()))),
    );
    add(
        ids::STANZA_COUNT,
        "Stanza count",
        Aspect::Poetic,
        SinglePoem,
        Language::Independent,
        Analyzer::poem(|p, _| Ok(Measurement::new(ids::STANZA_COUNT, p.stanza_count()))),
    );
    add(
        ids::LINES_PER_STANZA,
        "Lines per stanza",
        Aspect::Poetic,
        SinglePoem,
        Language::Independent,
        Analyzer::poem(|p, _| {
            let sizes = p.stanzas().iter().map(|s| s.len() as f64).collect();
            Ok(Measurement::new(ids::LINES_PER_STANZA, Value::NumberList(sizes)))
        }),
    );
    add(
        ids::SYLLABLES_PER_LINE,
        "Syllables per line",
        Aspect::Poetic,
        SinglePoem,
        lex_lang(),
        Analyzer::poem(|p, ctx| {
            let counts = p
                .lines()
                .map(|l| syllable_count_line(l, &ctx.lexicon, &ctx.policy).count as f64)
                .collect();
            Ok(Measurement::new(ids::SYLLABLES_PER_LINE, Value::NumberList(counts)))
        }),
    );
    add(
        ids::SCANSION,
        "Scansion",
        Aspect::Poetic,
        SinglePoem,
        Language::code("en"),
        Analyzer::poem(|p, ctx| {
            let patterns: Vec<String> = p
                .lines()
                .map(|l| stress_pattern_line(l, &ctx.lexicon, &ctx.policy).pattern.to_string())
                .collect();
            Ok(Measurement::new(ids::SCANSION, Value::Text(patterns.join(" / "))))
        }),
    );
    add(
        ids::RHYME_SCHEME,
        "Rhyme scheme",
        Aspect::Poetic,
        SinglePoem,
        lex_lang(),
        Analyzer::poem(|p, ctx| {
            let scheme = rhyme_scheme(p, &ctx.lexicon, &ctx.policy);
            Ok(Measurement::new(ids::RHYME_SCHEME, Value::Text(scheme.to_string())))
        }),
    );
    add(
        ids::RHYME_PATTERN_COUNT,
        "Different rhyme patterns",
        Aspect::Poetic,
        SinglePoem,
        lex_lang(),
        Analyzer::poem(|p, ctx| {
            let scheme = rhyme_scheme(p, &ctx.lexicon, &ctx.policy);
            Ok(Measurement::new(ids::RHYME_PATTERN_COUNT, rhyme_pattern_count(&scheme)))
        }),
    );
    add(
        ids::RHYME_RICHNESS,
        "Rhyme richness",
        Aspect::Poetic,
        SinglePoem,
        lex_lang(),
        Analyzer::poem(|p, ctx| {
            let scheme = rhyme_scheme(p, &ctx.lexicon, &ctx.policy);
            let richness = rhyme_richness(&scheme).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::RHYME_RICHNESS, richness))
        }),
    );
    add(
        ids::INTRA_NOVELTY,
        "Intra-poem ROUGE",
        Aspect::Novelty,
        SinglePoem,
        Language::Independent,
        Analyzer::poem(|p, ctx| {
            let score = intra_poem_novelty(p, ctx.rouge_n, &ctx.policy).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::INTRA_NOVELTY, score))
        }),
    );
    add(
        ids::TYPE_TOKEN_RATIO,
        "Type/token ratio",
        Aspect::Lexsem,
        SinglePoem,
        Language::Independent,
        Analyzer::poem(|p, ctx| {
            let ttr = type_token_ratio([p], &ctx.policy).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::TYPE_TOKEN_RATIO, ttr))
        }),
    );

    add(
        ids::COLLECTION_INTRA_NOVELTY,
        "Mean intra-poem ROUGE",
        Aspect::Novelty,
        Collection,
        Language::Independent,
        Analyzer::collection(|c, ctx| {
            let mut request = NoveltyRequest::intra(ctx.rouge_n);
            request.sample = ctx.sample;
            let report = collection_novelty_with(c, &request, &ctx.policy, ctx.exec).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::COLLECTION_INTRA_NOVELTY, report.aggregate))
        }),
    );
    add(
        ids::INTER_NOVELTY,
        "Inter-poem ROUGE",
        Aspect::Novelty,
        Collection,
        Language::Independent,
        Analyzer::collection(|c, ctx| {
            let request = NoveltyRequest {
                scope: Scope::Inter,
                mode: ctx.novelty_mode,
                n: ctx.rouge_n,
                sample: ctx.sample,
            };
            let report = collection_novelty_with(c, &request, &ctx.policy, ctx.exec).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::INTER_NOVELTY, report.aggregate))
        }),
    );
    add(
        ids::COLLECTION_TYPE_TOKEN_RATIO,
        "Pooled type/token ratio",
        Aspect::Lexsem,
        Collection,
        Language::Independent,
        Analyzer::collection(|c, ctx| {
            let ttr = type_token_ratio(c.poems(), &ctx.policy).map_err(AnalyzerError::failed)?;
            Ok(Measurement::new(ids::COLLECTION_TYPE_TOKEN_RATIO, ttr))
        }),
    );
    add(
        ids::TOPIC_RETRIEVAL_F1,
        "Topic retrieval macro F1",
        Aspect::Lexsem,
        Collection,
        Language::Independent,
        Analyzer::collection(|c, ctx| {
            let report = retrieval(c, ctx)?;
            Ok(Measurement::new(ids::TOPIC_RETRIEVAL_F1, report.macro_f1))
        }),
    );
    add(
        ids::TOPIC_F1,
        "Topic retrieval F1 per topic",
        Aspect::Lexsem,
        Collection,
        Language::Independent,
        Analyzer::collection(|c, ctx| {
            let report = retrieval(c, ctx)?;
            let per_topic: BTreeMap<String, f64> = report.per_topic.into_iter().map(|t| (t.topic, t.f1)).collect();
            Ok(Measurement::new(ids::TOPIC_F1, Value::Distribution(per_topic)))
        }),
    );
    r
}

/// Topic retrieval with the context's encoder, or TF-IDF fitted on the
/// collection when none is configured.
pub(crate) fn retrieval(c: &PoemCollection, ctx: &Context) -> Result<RetrievalReport, AnalyzerError> {
    match &ctx.embedder {
        Some(embedder) => topic_retrieval_f1_with(c, embedder.as_ref(), ctx.exec),
        None => {
            let tfidf = fit_tfidf_for_collection(c, &ctx.policy).map_err(AnalyzerError::failed)?;
            topic_retrieval_f1_with(c, &tfidf, ctx.exec)
        }
    }
    .map_err(AnalyzerError::failed)
}
