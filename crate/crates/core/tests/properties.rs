mod support;

use lexboot::corpus::load_corpus_str;
use lexboot::textproc::tokenize;
use proptest::prelude::*;
use support::props;

const CASES: u32 = 128;

#[test]
fn monotone_snapshot_chain() {
    props::monotone_chain(CASES).unwrap();
}

#[test]
fn order_independence() {
    props::order_independence(CASES).unwrap();
}

#[test]
fn pass_one_ignores_the_lkb() {
    props::pass_one_lkb_independence(CASES).unwrap();
}

#[test]
fn evidence_gate() {
    props::evidence_gate(CASES).unwrap();
}

#[test]
fn similarity_is_symmetric() {
    props::similarity_symmetry(CASES).unwrap();
}

#[test]
fn dump_round_trip() {
    props::serialization_round_trip(CASES).unwrap();
}

#[test]
fn lemmatizer_is_idempotent() {
    props::lemmatizer_idempotence(512).unwrap();
}

proptest! {
    #[test]
    fn tokens_cover_the_text(words in proptest::collection::vec("[a-z]{1,7}[.,;()]?", 1..12)) {
        let text = words.join(" ");
        let squashed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let joined: String = tokenize(&text).iter().map(|t| t.surface.as_str()).collect();
        prop_assert_eq!(joined, squashed);
        for t in tokenize(&text) {
            let slice: String = text.chars().skip(t.span.0).take(t.span.1 - t.span.0).collect();
            prop_assert_eq!(slice, t.surface);
        }
    }

    #[test]
    fn canonical_corpus_round_trips(
        rows in proptest::collection::vec(("[a-z]{1,8}", prop_oneof![Just("n"), Just("v"), Just("vi"), Just("vt")], "[0-9a-z,]{1,6}", "[A-Z]", "[a-z]{1,6}( [a-z]{1,6}){0,5}"), 0..8)
    ) {
        let mut seen = std::collections::BTreeSet::new();
        let text: String = rows
            .iter()
            .filter(|r| seen.insert((r.0.clone(), r.1.starts_with('v'), r.2.clone(), r.3.clone())))
            .map(|(h, p, l, s, d)| format!("{h}\t{p}\t{l}\t{s}\t{d}\n"))
            .collect();
        let corpus = load_corpus_str(&text).unwrap();
        prop_assert_eq!(corpus.to_tsv(), text);
    }
}
