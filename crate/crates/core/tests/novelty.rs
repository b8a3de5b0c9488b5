mod common;

use common::*;
use poemeval::novelty::*;
use poemeval::{parse_poem, Poem, PoemCollection, PoemMeta, TokenPolicy};
use proptest::prelude::*;

fn poem(id: &str, lines: &[&str]) -> Poem {
    parse_poem(&lines.join("\n"), PoemMeta::new(id)).unwrap()
}

fn vocab_line(max_len: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g", "h"]), 1..=max_len)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn small_poem() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(vocab_line(6).prop_map(|w| w.join(" ")), 1..=5)
}

proptest! {
    #[test]
    fn rouge_matches_brute_force(c in vocab_line(6), r in vocab_line(6), n in 1usize..=3) {
        let got = rouge_n(&c, &r, n).unwrap();
        let (p, rec, f1) = brute_rouge(&c, &r, n);
        prop_assert!((got.precision - p).abs() <= 1e-12);
        prop_assert!((got.recall - rec).abs() <= 1e-12);
        prop_assert!((got.f1 - f1).abs() <= 1e-12);
    }

    #[test]
    fn rouge_symmetric_and_bounded(c in vocab_line(6), r in vocab_line(6), n in 1usize..=2) {
        let ab = rouge_n(&c, &r, n).unwrap();
        let ba = rouge_n(&r, &c, n).unwrap();
        prop_assert_eq!(ab.f1, ba.f1);
        prop_assert_eq!(ab.precision, ba.recall);
        for v in [ab.precision, ab.recall, ab.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn self_comparison_is_perfect(c in vocab_line(6), n in 1usize..=3) {
        prop_assume!(c.len() >= n);
        let s = rouge_n(&c, &c, n).unwrap();
        prop_assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn oov_substitution_lowers_unigram_f1(c in vocab_line(6), pos in any::<prop::sample::Index>()) {
        let mut copy = c.clone();
        let i = pos.index(copy.len());
        copy[i] = String::from("zzz-unseen");
        let s = rouge_n(&c, &copy, 1).unwrap();
        prop_assert!(s.f1 < 1.0);
    }

    #[test]
    fn inter_modes_match_brute_force(a in small_poem(), b in small_poem(), n in 1usize..=2) {
        let p = TokenPolicy::default();
        let (pa, pb) = (poem("a", &a.iter().map(String::as_str).collect::<Vec<_>>()), poem("b", &b.iter().map(String::as_str).collect::<Vec<_>>()));
        let (la, lb): (Vec<&str>, Vec<&str>) = (a.iter().map(String::as_str).collect(), b.iter().map(String::as_str).collect());
        prop_assert!((inter_single_string(&pa, &pb, n, &p).unwrap().f1 - brute_single_string(&la, &lb, n)).abs() <= 1e-12);
        prop_assert!((inter_line_by_line(&pa, &pb, n, &p).unwrap() - brute_line_by_line(&la, &lb, n)).abs() <= 1e-12);
        prop_assert!((inter_all_lines(&pa, &pb, n, &p).unwrap() - brute_all_lines(&la, &lb, n)).abs() <= 1e-12);
        if la.len() >= 2 {
            prop_assert!((intra_poem_novelty(&pa, n, &p).unwrap() - brute_intra(&la, n)).abs() <= 1e-12);
        }
    }
}

fn collection(k: usize) -> PoemCollection {
    let words = ["sun", "moon", "star", "sea", "wind", "rain", "leaf", "stone", "fire", "snow"];
    let poems = (0..k)
        .map(|i| {
            let l1 = format!("{} {} {}", words[i % 10], words[(i + 1) % 10], words[(i * 3) % 10]);
            let l2 = format!("{} {}", words[(i + 4) % 10], words[(i * 7) % 10]);
            poem(&format!("p{i}"), &[&l1, &l2])
        })
        .collect();
    PoemCollection::new(poems).unwrap()
}

#[test]
fn full_inter_scores_every_pair() {
    let p = TokenPolicy::default();
    let two = collection(2);
    let r = collection_novelty(&two, &NoveltyRequest::inter(InterMode::SingleString, 1), &p).unwrap();
    assert_eq!(r.units.len(), 1);
    let eight = collection(8);
    for mode in [InterMode::SingleString, InterMode::LineByLine, InterMode::AllLines] {
        let r = collection_novelty(&eight, &NoveltyRequest::inter(mode, 1), &p).unwrap();
        assert_eq!(r.units.len(), 28);
        let mean = r.units.iter().map(|u| u.score).sum::<f64>() / 28.0;
        assert!((r.aggregate - mean).abs() < 1e-15);
        assert!(r.sampled.is_none());
    }
}

#[test]
fn sampling_is_deterministic_and_without_replacement() {
    let p = TokenPolicy::default();
    let coll = collection(12);
    let req = NoveltyRequest::inter(InterMode::AllLines, 1).sampled(10, 7);
    let a = collection_novelty(&coll, &req, &p).unwrap();
    let b = collection_novelty(&coll, &req, &p).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.units.len(), 10);
    let mut ids: Vec<&str> = a.units.iter().map(|u| u.unit.as_str()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 10);
    assert_eq!(
        a.sampled,
        Some(SampleInfo {
            requested: 10,
            seed: 7,
            population: 66
        })
    );
    let other = collection_novelty(&coll, &NoveltyRequest::inter(InterMode::AllLines, 1).sampled(10, 8), &p).unwrap();
    assert_ne!(a.units, other.units);
}

#[test]
fn execution_modes_agree() {
    let p = TokenPolicy::default();
    let coll = collection(9);
    for req in [NoveltyRequest::intra(1), NoveltyRequest::inter(InterMode::LineByLine, 2)] {
        let seq = collection_novelty_with(&coll, &req, &p, poemeval::Execution::Sequential).unwrap();
        let par = collection_novelty_with(&coll, &req, &p, poemeval::Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn intra_collection_skips_short_poems() {
    let p = TokenPolicy::default();
    let coll = PoemCollection::new(vec![poem("one", &["solo line"]), poem("two", &["a b", "a c", "d e"])]).unwrap();
    let r = collection_novelty(&coll, &NoveltyRequest::intra(1), &p).unwrap();
    assert_eq!(r.units.len(), 1);
    assert_eq!(r.skipped, ["one"]);
    assert!((r.aggregate - 1.0 / 6.0).abs() < 1e-12);

    let short = PoemCollection::new(vec![poem("one", &["solo"])]).unwrap();
    assert!(matches!(
        collection_novelty(&short, &NoveltyRequest::intra(1), &p),
        Err(NoveltyError::TooFewPoems(_))
    ));
    assert!(matches!(
        collection_novelty(&short, &NoveltyRequest::inter(InterMode::AllLines, 1), &p),
        Err(NoveltyError::TooFewPoems(_))
    ));
}

#[test]
fn line_by_line_truncates_longer_poem() {
    let p = TokenPolicy::default();
    let long = poem("l", &["a b", "c d", "e f", "g h"]);
    let short = poem("s", &["a b", "x y"]);
    // (1.0 + 0.0) / 2: lines 3 and 4 of the longer poem are ignored
    assert_eq!(inter_line_by_line(&long, &short, 1, &p).unwrap(), 0.5);
    assert_eq!(inter_line_by_line(&short, &long, 1, &p).unwrap(), 0.5);
}
