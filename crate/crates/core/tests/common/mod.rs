//! Test-only reference implementations, written independently of the
//! library's hashing n-gram counter.
#![allow(dead_code)]

use std::path::PathBuf;

use poemeval::phonetics::{load_lexicon, PronLexicon};

pub fn fixtures() -> PathBuf {
    // also included by the cli crate's tests, hence the detour through `..`
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn fixture_lexicon() -> PronLexicon {
    let text = std::fs::read_to_string(fixtures().join("en-lexicon-1000.dict")).unwrap();
    let loaded = load_lexicon(text.as_bytes());
    assert!(loaded.errors.is_empty(), "{:?}", loaded.errors);
    loaded.lexicon
}

/// Exact ROUGE-N as a rational: (overlap, candidate n-grams, reference n-grams).
pub fn brute_rouge_counts(candidate: &[String], reference: &[String], n: usize) -> (u64, u64, u64) {
    let grams = |toks: &[String]| -> Vec<Vec<String>> {
        if toks.len() < n {
            return Vec::new();
        }
        (0..=toks.len() - n).map(|i| toks[i..i + n].to_vec()).collect()
    };
    let c = grams(candidate);
    let r = grams(reference);
    let mut distinct: Vec<&Vec<String>> = Vec::new();
    for g in &c {
        if !distinct.contains(&g) {
            distinct.push(g);
        }
    }
    let overlap: u64 = distinct
        .iter()
        .map(|g| {
            let in_c = c.iter().filter(|x| x == g).count();
            let in_r = r.iter().filter(|x| x == g).count();
            in_c.min(in_r) as u64
        })
        .sum();
    (overlap, c.len() as u64, r.len() as u64)
}

/// (precision, recall, f1) from exact integer counts; f1 = 2·overlap / (|c| + |r|).
pub fn brute_rouge(candidate: &[String], reference: &[String], n: usize) -> (f64, f64, f64) {
    let (o, c, r) = brute_rouge_counts(candidate, reference, n);
    if c == 0 || r == 0 {
        return (0.0, 0.0, 0.0);
    }
    let f1 = if o == 0 { 0.0 } else { (2 * o) as f64 / (c + r) as f64 };
    (o as f64 / c as f64, o as f64 / r as f64, f1)
}

pub fn words(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

pub fn brute_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn brute_single_string(a: &[&str], b: &[&str], n: usize) -> f64 {
    let flat = |p: &[&str]| p.iter().flat_map(|l| words(l)).collect::<Vec<_>>();
    brute_rouge(&flat(a), &flat(b), n).2
}

pub fn brute_line_by_line(a: &[&str], b: &[&str], n: usize) -> f64 {
    let m = a.len().min(b.len());
    let scores: Vec<f64> = (0..m).map(|i| brute_rouge(&words(a[i]), &words(b[i]), n).2).collect();
    brute_mean(&scores)
}

pub fn brute_all_lines(a: &[&str], b: &[&str], n: usize) -> f64 {
    let mut scores = Vec::new();
    for x in a {
        for y in b {
            scores.push(brute_rouge(&words(x), &words(y), n).2);
        }
    }
    brute_mean(&scores)
}

pub fn brute_intra(lines: &[&str], n: usize) -> f64 {
    let mut scores = Vec::new();
    for i in 0..lines.len() {
        for j in 0..lines.len() {
            if i < j {
                scores.push(brute_rouge(&words(lines[i]), &words(lines[j]), n).2);
            }
        }
    }
    brute_mean(&scores)
}
