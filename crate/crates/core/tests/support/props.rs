//! Property checks over the fixture corpora, each driven by a proptest runner
//! with an explicit case count so the acceptance target can report them.

use std::collections::BTreeSet;

use lexboot::bootstrap::{analyze_entry, run_passes, run_until_converged, RunConfig};
use lexboot::corpus::{Corpus, Pos, SenseId};
use lexboot::lkb::{similarity, LkbSnapshot};
use lexboot::patterns::{PatternName, RelationLabel, RelationTriple, TripleKey};
use lexboot::textproc::{lemmatize, Cat};
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::{chain_corpus, sample_corpus};

type Check = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Check {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

fn keys(s: &LkbSnapshot) -> BTreeSet<TripleKey> {
    s.triples().iter().map(RelationTriple::key).collect()
}

/// The sample and chain fixtures together.
pub fn combined_corpus() -> Corpus {
    let mut entries = sample_corpus().entries().to_vec();
    entries.extend(chain_corpus().entries().iter().cloned());
    Corpus::from_entries(entries).unwrap()
}

fn permuted(corpus: &Corpus) -> impl Strategy<Value = Corpus> {
    let entries = corpus.entries().to_vec();
    Just(entries)
        .prop_shuffle()
        .prop_map(|e| Corpus::from_entries(e).unwrap())
}

fn sub_corpus(corpus: &Corpus) -> impl Strategy<Value = Corpus> {
    let entries = corpus.entries().to_vec();
    let n = entries.len();
    subsequence(entries, 0..=n)
        .prop_shuffle()
        .prop_map(|e| Corpus::from_entries(e).unwrap())
}

/// Every lemma that occurs as a headword or as a target in the fixtures.
pub fn vocabulary() -> Vec<String> {
    let corpus = combined_corpus();
    let out = run_until_converged(&corpus, &RunConfig::default()).unwrap();
    let mut v: BTreeSet<String> = corpus
        .entries()
        .iter()
        .map(|e| e.id.headword.clone())
        .collect();
    v.extend(out.snapshot.triples().iter().map(|t| t.target.clone()));
    v.extend(["ground", "leaf", "zzz"].map(String::from));
    v.into_iter().collect()
}

/// Random three-pass snapshot chains over the fixture vocabulary.
pub fn arb_snapshot(vocab: Vec<String>) -> impl Strategy<Value = LkbSnapshot> {
    let n = vocab.len();
    proptest::collection::vec((0..n, 0..5usize, 0..n, 1..=3u32, 0..8usize), 0..40).prop_map(
        move |raw| {
            let mut s = LkbSnapshot::empty();
            for pass in 1..=3 {
                let batch = raw
                    .iter()
                    .filter(|r| r.3 == pass)
                    .map(|&(a, l, b, p, pat)| {
                        RelationTriple::new(
                            &SenseId::new(
                                &vocab[a],
                                if l == 0 { Pos::Verb } else { Pos::Noun },
                                "1",
                                "L",
                            ),
                            RelationLabel::ALL[l],
                            &vocab[b],
                            p,
                            PatternName::ALL[pat],
                        )
                    })
                    .collect();
                s = s.merge(batch).unwrap();
            }
            s
        },
    )
}

pub fn monotone_chain(cases: u32) -> Check {
    let corpus = combined_corpus();
    report(runner(cases).run(&sub_corpus(&corpus), |c| {
        let out = run_until_converged(&c, &RunConfig::default()).unwrap();
        let chain = out.chain();
        for w in chain.windows(2) {
            ensure(
                keys(&w[0]).is_subset(&keys(&w[1])),
                "snapshot chain lost a triple",
            )?;
            ensure(w[0].len() <= w[1].len(), "triple count decreased")?;
        }
        let last = out.reports.last().unwrap();
        ensure(
            !out.converged || last.new_triples == 0,
            "converged with a non-empty delta",
        )?;
        Ok(())
    }))
}

pub fn order_independence(cases: u32) -> Check {
    let corpus = combined_corpus();
    let config = RunConfig::default();
    let reference = run_until_converged(&corpus, &config).unwrap();
    let dump = reference.snapshot.serialize();
    let reports: Vec<String> = reference.reports.iter().map(|r| r.render_tsv()).collect();
    report(runner(cases).run(&permuted(&corpus), |c| {
        let out = run_until_converged(&c, &config).unwrap();
        ensure(
            out.snapshot.serialize() == dump,
            "dump depends on entry order",
        )?;
        let r: Vec<String> = out.reports.iter().map(|r| r.render_tsv()).collect();
        ensure(r == reports, "reports depend on entry order")
    }))
}

pub fn pass_one_lkb_independence(cases: u32) -> Check {
    let corpus = combined_corpus();
    let config = RunConfig::default();
    let empty = LkbSnapshot::empty();
    let baseline: Vec<_> = corpus
        .entries()
        .iter()
        .map(|e| analyze_entry(e, &empty, &corpus, &config, 1).triples)
        .collect();
    report(runner(cases).run(&arb_snapshot(vocabulary()), |s| {
        for (e, base) in corpus.entries().iter().zip(&baseline) {
            let a = analyze_entry(e, &s, &corpus, &config, 1);
            ensure(
                &a.triples == base,
                format!("pass-1 output of {} read the LKB", e.id),
            )?;
            ensure(a.decisions.is_empty(), "pass 1 made a reattachment")?;
        }
        Ok(())
    }))
}

fn pass_two_delta(corpus: &Corpus) -> BTreeSet<TripleKey> {
    let out = run_passes(corpus, &RunConfig::default(), 2).unwrap();
    out.reports[1]
        .delta
        .iter()
        .map(RelationTriple::key)
        .collect()
}

/// Deleting the hook entry removes the evidence for the angling with-PP and
/// exactly the angling triples of pass 2, whatever the entry order.
pub fn evidence_gate(cases: u32) -> Check {
    let corpus = sample_corpus();
    let full = pass_two_delta(&corpus);
    let without: Vec<_> = corpus
        .entries()
        .iter()
        .filter(|e| e.id.headword != "hook")
        .cloned()
        .collect();
    let hookless = Corpus::from_entries(without).unwrap();
    let angling = corpus.lookup("angling")[0].clone();
    report(runner(cases).run(&permuted(&hookless), |c| {
        let out = run_until_converged(&c, &RunConfig::default()).unwrap();
        for r in &out.reports {
            ensure(
                r.decisions.iter().all(|d| d.entry != angling.id),
                "angling reattached without hook evidence",
            )?;
        }
        let delta = pass_two_delta(&c);
        let removed: BTreeSet<&TripleKey> = full.difference(&delta).collect();
        let expected: BTreeSet<&TripleKey> = full.iter().filter(|k| k.0 == angling.id).collect();
        ensure(
            !expected.is_empty(),
            "fixture lost its angling pass-2 triples",
        )?;
        ensure(
            removed == expected,
            format!("removed {removed:?}, expected {expected:?}"),
        )?;
        ensure(delta.is_subset(&full), "hookless run gained triples")
    }))
}

pub fn similarity_symmetry(cases: u32) -> Check {
    let corpus = combined_corpus();
    let vocab = vocabulary();
    let converged = run_until_converged(&corpus, &RunConfig::default())
        .unwrap()
        .snapshot;
    for a in &vocab {
        for b in &vocab {
            if similarity(&converged, &corpus, a, b) != similarity(&converged, &corpus, b, a) {
                return Err(format!("similarity({a}, {b}) is not symmetric"));
            }
        }
    }
    let v2 = vocab.clone();
    report(runner(cases).run(&arb_snapshot(vocab), |s| {
        for a in &v2 {
            for b in &v2 {
                ensure(
                    similarity(&s, &corpus, a, b) == similarity(&s, &corpus, b, a),
                    format!("{a}/{b}"),
                )?;
            }
        }
        Ok(())
    }))
}

pub fn serialization_round_trip(cases: u32) -> Check {
    report(runner(cases).run(&arb_snapshot(vocabulary()), |s| {
        let text = s.serialize();
        let back =
            LkbSnapshot::deserialize(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(back == s, "round trip changed the snapshot")?;
        ensure(back.serialize() == text, "round trip changed the dump")
    }))
}

fn arb_word() -> impl Strategy<Value = String> {
    let suffix = prop_oneof![
        Just(""),
        Just("s"),
        Just("es"),
        Just("ies"),
        Just("ing"),
        Just("ed"),
        Just("ied"),
        Just("ses"),
        Just("ss"),
        Just("us"),
        Just("ting"),
        Just("ped"),
        Just("eed"),
        Just("e"),
    ];
    ("[a-z]{1,8}", suffix).prop_map(|(stem, suf)| format!("{stem}{suf}"))
}

pub fn lemmatizer_idempotence(cases: u32) -> Check {
    let cats = [Cat::Noun, Cat::Verb, Cat::Gerund, Cat::Adj, Cat::Other];
    report(runner(cases).run(&(arb_word(), 0..cats.len()), |(w, c)| {
        let once = lemmatize(&w, cats[c]);
        let twice = lemmatize(&once, cats[c]);
        ensure(once == twice, format!("{w} -> {once} -> {twice}"))
    }))
}
