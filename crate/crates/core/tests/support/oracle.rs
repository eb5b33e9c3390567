//! Brute-force reference for a pass: instead of the resolvers' greedy
//! decisions, enumerate every attachment vector of a sketch, keep the ones in
//! which each non-default choice is backed by snapshot evidence, and take the
//! one with the most backed moves (lexicographically first on ties).

use std::collections::{BTreeMap, BTreeSet};

use lexboot::bootstrap::{default_sketch, RunConfig};
use lexboot::corpus::{Corpus, DictEntry, SenseId};
use lexboot::lkb::LkbSnapshot;
use lexboot::patterns::{resolve_of_pp, structural_patterns, RelationLabel, RelationTriple};
use lexboot::sketch::{enumerate_attachments, NodeId, NodeKind, SiteKind, Sketch};
use lexboot::textproc::tokenize;

pub type Facts = BTreeSet<(RelationLabel, String)>;

/// Relation pairs of `x` by linear scan, converse PART / PART-OF included.
fn pairs(lkb: &LkbSnapshot, x: &str) -> BTreeSet<(RelationLabel, String)> {
    let mut out = BTreeSet::new();
    for t in lkb.triples() {
        if t.source.headword == x {
            out.insert((t.label, t.target.clone()));
        }
        if t.target == x {
            match t.label {
                RelationLabel::Part => {
                    out.insert((RelationLabel::PartOf, t.source.headword.clone()));
                }
                RelationLabel::PartOf => {
                    out.insert((RelationLabel::Part, t.source.headword.clone()));
                }
                _ => {}
            }
        }
    }
    out
}

fn text_lemmas(corpus: &Corpus, x: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for e in corpus.entries().iter().filter(|e| e.id.headword == x) {
        for t in tokenize(&e.definition) {
            if t.cat.is_content() && !["be", "have", "do"].contains(&t.lemma.as_str()) {
                out.insert(t.lemma);
            }
        }
    }
    out
}

pub fn similarity(lkb: &LkbSnapshot, corpus: &Corpus, a: &str, b: &str, w: (u64, u64)) -> u64 {
    let shared_pairs = pairs(lkb, a).intersection(&pairs(lkb, b)).count() as u64;
    let shared_text = text_lemmas(corpus, a)
        .intersection(&text_lemmas(corpus, b))
        .count() as u64;
    w.0 * shared_pairs + w.1 * shared_text
}

fn instrument_targets(lkb: &LkbSnapshot, x: &str) -> BTreeSet<String> {
    lkb.triples()
        .iter()
        .filter(|t| t.source.headword == x && t.label == RelationLabel::Instrument)
        .map(|t| t.target.clone())
        .collect()
}

fn with_complement_lemmas(sketch: &Sketch, pp: NodeId) -> Vec<String> {
    match sketch.complement(pp) {
        Some(c) if sketch.node(c).kind == NodeKind::Np => sketch
            .conjuncts(c)
            .into_iter()
            .map(|n| sketch.head_lemma(n).to_string())
            .collect(),
        _ => Vec::new(),
    }
}

fn instrument_evidence(sketch: &Sketch, lkb: &LkbSnapshot, pp: NodeId, verb: NodeId) -> bool {
    let lemma = sketch.head_lemma(verb);
    sketch.node(verb).kind.is_verbal()
        && with_complement_lemmas(sketch, pp)
            .iter()
            .any(|c| instrument_targets(lkb, c).contains(lemma))
}

/// Whether choosing candidate `c` at site `s` is backed by evidence.
fn backed(
    sketch: &Sketch,
    lkb: &LkbSnapshot,
    corpus: &Corpus,
    config: &RunConfig,
    s: usize,
    c: usize,
) -> bool {
    let site = sketch.site(s).unwrap();
    match site.kind {
        SiteKind::CoordScope => {
            let movable = sketch.head_lemma(site.movable);
            let scores: Vec<u64> = site
                .candidates
                .iter()
                .map(|&n| {
                    similarity(
                        lkb,
                        corpus,
                        sketch.head_lemma(n),
                        movable,
                        config.similarity_weights,
                    )
                })
                .collect();
            scores
                .iter()
                .enumerate()
                .all(|(i, &x)| i == c || x < scores[c])
        }
        SiteKind::PpAttach => {
            sketch.node(site.movable).prep.as_deref() == Some("with")
                && instrument_evidence(sketch, lkb, site.movable, site.candidates[c])
        }
    }
}

fn hypernym_bearing(sketch: &Sketch, v: NodeId) -> bool {
    let g = sketch.genus();
    if sketch.node(g).kind.is_verbal() {
        return v == g;
    }
    sketch.of_complement(g) == Some(v) && sketch.node(v).kind == NodeKind::Vp
}

/// The oracle's chosen attachment vector and final sketch for pass `pass`.
pub fn best_sketch(
    entry: &DictEntry,
    lkb: &LkbSnapshot,
    corpus: &Corpus,
    config: &RunConfig,
    pass: u32,
) -> (Vec<usize>, Sketch) {
    let sketch = default_sketch(entry, config);
    if pass < 2 {
        return (sketch.choices(), sketch);
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for v in enumerate_attachments(&sketch) {
        let mut moves = 0;
        let mut valid = true;
        for (s, &c) in v.iter().enumerate() {
            if c != sketch.site(s).unwrap().chosen {
                if backed(&sketch, lkb, corpus, config, s, c) {
                    moves += 1;
                } else {
                    valid = false;
                }
            }
        }
        if valid && best.as_ref().is_none_or(|(m, _)| moves > *m) {
            best = Some((moves, v));
        }
    }
    let v = best.expect("the default vector is always valid").1;
    let mut out = sketch.with_choices(&v).unwrap();
    for (s, &c) in v.iter().enumerate() {
        if backed(&sketch, lkb, corpus, config, s, c) {
            out = out.settle(s, c).unwrap();
        }
    }
    (v, out)
}

/// (label, target) facts the oracle derives for one entry in pass `pass`.
pub fn entry_facts(
    entry: &DictEntry,
    lkb: &LkbSnapshot,
    corpus: &Corpus,
    config: &RunConfig,
    pass: u32,
) -> Facts {
    let (_, sketch) = best_sketch(entry, lkb, corpus, config, pass);
    let mut triples: Vec<RelationTriple> = structural_patterns(&sketch, &config.lists, pass);
    if pass < 2 {
        triples.extend(resolve_of_pp(&sketch, &LkbSnapshot::empty(), &config.lists, pass).0);
    } else {
        triples.extend(resolve_of_pp(&sketch, lkb, &config.lists, pass).0);
        for pp in 0..sketch.nodes().len() {
            let n = sketch.node(pp);
            if n.kind != NodeKind::Pp || n.prep.as_deref() != Some("with") {
                continue;
            }
            let Some(v) = sketch.parent(pp) else { continue };
            if hypernym_bearing(&sketch, v) && instrument_evidence(&sketch, lkb, pp, v) {
                for c in with_complement_lemmas(&sketch, pp) {
                    triples.push(RelationTriple::new(
                        &entry.id,
                        RelationLabel::Instrument,
                        &c,
                        pass,
                        lexboot::patterns::PatternName::WithPpResolver,
                    ));
                }
            }
        }
    }
    triples.into_iter().map(|t| (t.label, t.target)).collect()
}

/// Per-sense facts for a whole pass.
pub fn pass_facts(
    corpus: &Corpus,
    lkb: &LkbSnapshot,
    config: &RunConfig,
    pass: u32,
) -> BTreeMap<SenseId, Facts> {
    corpus
        .entries()
        .iter()
        .map(|e| (e.id.clone(), entry_facts(e, lkb, corpus, config, pass)))
        .collect()
}

/// Runs oracle passes to a fixed point; returns the number of passes run,
/// the last one being the first that adds nothing and moves nothing.
pub fn passes_to_converge(corpus: &Corpus, config: &RunConfig, max: u32) -> (u32, LkbSnapshot) {
    let mut lkb = LkbSnapshot::empty();
    let mut prev_vectors: Option<Vec<Vec<usize>>> = None;
    for pass in 1..=max {
        let facts = pass_facts(corpus, &lkb, config, pass);
        let triples: Vec<RelationTriple> = facts
            .iter()
            .flat_map(|(id, fs)| {
                fs.iter().map(move |(l, t)| {
                    RelationTriple::new(
                        id,
                        *l,
                        t,
                        pass,
                        lexboot::patterns::PatternName::GenusHypernym,
                    )
                })
            })
            .collect();
        let vectors: Vec<Vec<usize>> = corpus
            .entries()
            .iter()
            .map(|e| best_sketch(e, &lkb, corpus, config, pass).0)
            .collect();
        let (next, delta) = lkb.merge_with_delta(triples).unwrap();
        let default_vectors: Vec<Vec<usize>> = corpus
            .entries()
            .iter()
            .map(|e| default_sketch(e, config).choices())
            .collect();
        let moved = prev_vectors.as_ref().unwrap_or(&default_vectors) != &vectors;
        lkb = next;
        if delta.is_empty() && !moved {
            return (pass, lkb);
        }
        prev_vectors = Some(vectors);
    }
    (max, lkb)
}
