use std::io::BufRead;

use poemeval::phonetics::{heuristic_syllables, load_lexicon, stress_pattern_line, syllable_count_line, syllable_count_word};
use poemeval::{PronLexicon, TokenPolicy};
use proptest::prelude::*;

mod common;

/// Reads the fixture file directly: word -> digits on its first listed
/// pronunciation, without going through the library parser.
fn raw_primary_stress() -> Vec<(String, usize)> {
    let file = std::fs::File::open(common::fixtures().join("en-lexicon-1000.dict")).unwrap();
    std::io::BufReader::new(file)
        .lines()
        .map(Result::unwrap)
        .filter(|l| !l.starts_with(";;;"))
        .filter_map(|l| {
            let (word, phones) = l.split_once("  ")?;
            if word.ends_with(')') {
                return None;
            }
            let digits = phones.chars().filter(char::is_ascii_digit).count();
            Some((word.to_string(), digits))
        })
        .collect()
}

#[test]
fn syllables_agree_with_stress_digits_on_every_entry() {
    let lex = common::fixture_lexicon();
    let raw = raw_primary_stress();
    assert_eq!(raw.len(), 1000);
    assert_eq!(lex.len(), 1000);
    for (word, digits) in raw {
        let s = syllable_count_word(&word, &lex);
        assert!(!s.oov, "{word}");
        assert_eq!(s.count, digits, "{word}");
    }
}

#[test]
fn lookup_is_case_insensitive_and_alternates_merge() {
    let lex = load_lexicon(";;; hdr\nREAD  R IY1 D\nREAD(1)  R EH1 D\ncomputer K AH0 M P Y UW1 T ER0\n".as_bytes()).lexicon;
    assert_eq!(lex.pronunciations("read").unwrap().len(), 2);
    assert_eq!(lex.primary("Read").unwrap()[1].symbol, "IY");
    assert_eq!(syllable_count_word("COMPUTER", &lex).count, 3);
    let p = TokenPolicy::default();
    assert_eq!(stress_pattern_line("computer", &lex, &p).pattern.as_str(), "010");
}

#[test]
fn malformed_lines_are_reported_not_fatal() {
    let loaded = load_lexicon("GOOD  G UH1 D\nBAD\nNOVOWEL  K T\nWORSE  W ER9 S\n".as_bytes());
    assert_eq!(loaded.lexicon.len(), 1);
    assert_eq!(loaded.errors.len(), 3);
}

#[test]
fn oov_heuristic() {
    assert_eq!(heuristic_syllables("birches"), 2);
    assert_eq!(heuristic_syllables("strngth"), 1);
    let lex = PronLexicon::new();
    let line = syllable_count_line("wander'st untrimm'd", &lex, &TokenPolicy::default());
    assert_eq!((line.count, line.tokens, line.oov_tokens), (4, 2, 2));
}

#[test]
fn stress_length_matches_count_on_random_fixture_lines() {
    use rand::{seq::IndexedRandom, SeedableRng};
    let lex = common::fixture_lexicon();
    let p = TokenPolicy::default();
    let mut lines: Vec<String> = Vec::new();
    for entry in walk(&common::fixtures()) {
        let text = std::fs::read_to_string(entry).unwrap();
        lines.extend(text.lines().filter(|l| !l.trim().is_empty()).map(String::from));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let line = lines.choose(&mut rng).unwrap();
        let stress = stress_pattern_line(line, &lex, &p);
        let count = syllable_count_line(line, &lex, &p);
        assert_eq!(stress.pattern.syllables(), count.count, "{line}");
        assert_eq!(stress.oov_tokens, count.oov_tokens);
    }
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else if path.extension().is_some_and(|x| x == "txt") {
            out.push(path);
        }
    }
    out.sort();
    out
}

proptest! {
    #[test]
    fn line_count_is_additive(a in "[a-z' ]{0,40}", b in "[a-z' ]{0,40}") {
        let lex = common::fixture_lexicon();
        let p = TokenPolicy::default();
        let whole = syllable_count_line(&format!("{a} {b}"), &lex, &p).count;
        let parts = syllable_count_line(&a, &lex, &p).count + syllable_count_line(&b, &lex, &p).count;
        prop_assert_eq!(whole, parts);
        prop_assert_eq!(stress_pattern_line(&format!("{a} {b}"), &lex, &p).pattern.syllables(), whole);
    }
}
