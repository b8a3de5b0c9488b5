//! Plot-ready distributions derived from a report.

use serde::Serialize;

use poemeval::framework::{ids, Value};
use poemeval::stats::{summarize, Histogram, Summary};

use crate::report::{PoemReport, Report};

const RICHNESS_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub stanza_count: Histogram,
    pub lines_per_stanza: Histogram,
    pub syllables_per_line: Histogram,
    pub rhyme_pattern_count: Histogram,
    pub rhyme_richness: Histogram,
    pub intra_rouge: Summary,
    pub inter_rouge: Summary,
}

fn numbers<'a>(poems: &'a [PoemReport], id: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
    poems
        .iter()
        .filter_map(move |p| p.results.iter().find(|r| r.analyzer == id))
        .filter_map(|r| r.value())
}

fn scalars(poems: &[PoemReport], id: &str) -> Vec<f64> {
    numbers(poems, id).filter_map(Value::as_number).collect()
}

fn list_items(poems: &[PoemReport], id: &str) -> Vec<usize> {
    numbers(poems, id)
        .filter_map(|v| match v {
            Value::NumberList(items) => Some(items.iter().map(|&x| x as usize).collect::<Vec<_>>()),
            _ => None,
        })
        .flatten()
        .collect()
}

fn as_counts(values: &[f64]) -> Vec<usize> {
    values.iter().map(|&v| v as usize).collect()
}

/// Histograms count one unit per poem, stanza or line that produced a
/// value; analyzers that failed for a poem contribute nothing.
pub fn emit_plot_data(report: &Report) -> PlotData {
    let poems = &report.poems;
    let inter: Vec<f64> = report
        .collection
        .as_ref()
        .and_then(|c| c.inter_novelty.as_ref())
        .map(|n| n.units.iter().map(|u| u.score).collect())
        .unwrap_or_default();
    PlotData {
        stanza_count: Histogram::integer(&as_counts(&scalars(poems, ids::STANZA_COUNT))),
        lines_per_stanza: Histogram::integer(&list_items(poems, ids::LINES_PER_STANZA)),
        syllables_per_line: Histogram::integer(&list_items(poems, ids::SYLLABLES_PER_LINE)),
        rhyme_pattern_count: Histogram::integer(&as_counts(&scalars(poems, ids::RHYME_PATTERN_COUNT))),
        rhyme_richness: Histogram::uniform(&scalars(poems, ids::RHYME_RICHNESS), 0.0, 1.0, RICHNESS_BINS),
        intra_rouge: summarize(&scalars(poems, ids::INTRA_NOVELTY)),
        inter_rouge: summarize(&inter),
    }
}
