//! The lexical knowledge base.
//!
//! An [`LkbSnapshot`] is an immutable set of relation triples keyed by
//! (source sense, label, target) together with the number of passes that
//! produced it. [`LkbSnapshot::merge`] builds the successor snapshot; nothing
//! is ever removed.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::{Corpus, Pos};
use crate::patterns::{RelationLabel, RelationTriple, TripleKey};
use crate::textproc::tokenize;

pub const DUMP_HEADER: &str = "#lexboot-lkb v1";
const PASSES_PREFIX: &str = "#passes-completed ";

/// Content verbs too common to count as definition overlap.
const AUXILIARIES: &[&str] = &["be", "have", "do"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LkbError {
    #[error("triple {triple} carries pass {found}, expected {expected}")]
    BadPassStamp {
        triple: String,
        expected: u32,
        found: u32,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LkbSnapshot {
    /// Sorted by (source lemma, label, target, sense).
    triples: Vec<RelationTriple>,
    pass_completed: u32,
    by_lemma: BTreeMap<String, Vec<usize>>,
    by_target: BTreeMap<String, Vec<usize>>,
}

fn dump_order(t: &RelationTriple) -> (&str, RelationLabel, &str, &crate::corpus::SenseId) {
    (&t.source.headword, t.label, &t.target, &t.source)
}

impl LkbSnapshot {
    pub fn empty() -> Self {
        LkbSnapshot::default()
    }

    fn build(mut triples: Vec<RelationTriple>, pass_completed: u32) -> Self {
        triples.sort_by(|a, b| dump_order(a).cmp(&dump_order(b)));
        let mut by_lemma: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_target: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, t) in triples.iter().enumerate() {
            by_lemma
                .entry(t.source.headword.clone())
                .or_default()
                .push(i);
            by_target.entry(t.target.clone()).or_default().push(i);
        }
        LkbSnapshot {
            triples,
            pass_completed,
            by_lemma,
            by_target,
        }
    }

    pub fn triples(&self) -> &[RelationTriple] {
        &self.triples
    }

    pub fn pass_completed(&self) -> u32 {
        self.pass_completed
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, key: &TripleKey) -> bool {
        self.by_lemma(&key.0.headword)
            .any(|t| t.source == key.0 && t.label == key.1 && t.target == key.2)
    }

    /// Triples whose source lemma is `lemma`, in dump order.
    pub fn by_lemma<'a>(&'a self, lemma: &str) -> impl Iterator<Item = &'a RelationTriple> + 'a {
        self.by_lemma
            .get(lemma)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    fn by_target<'a>(&'a self, lemma: &str) -> impl Iterator<Item = &'a RelationTriple> + 'a {
        self.by_target
            .get(lemma)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    /// Sorted, deduplicated targets of `lemma` under `label`, across senses.
    pub fn targets(&self, lemma: &str, label: RelationLabel) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .by_lemma(lemma)
            .filter(|t| t.label == label)
            .map(|t| t.target.as_str())
            .collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Successor snapshot; every new triple must carry the next pass number.
    pub fn merge(&self, new_triples: Vec<RelationTriple>) -> Result<LkbSnapshot, LkbError> {
        self.merge_with_delta(new_triples).map(|(s, _)| s)
    }

    /// Like [`merge`](Self::merge), also returning the triples that were
    /// actually new, in dump order.
    pub fn merge_with_delta(
        &self,
        new_triples: Vec<RelationTriple>,
    ) -> Result<(LkbSnapshot, Vec<RelationTriple>), LkbError> {
        let next = self.pass_completed + 1;
        if let Some(bad) = new_triples.iter().find(|t| t.pass != next) {
            return Err(LkbError::BadPassStamp {
                triple: bad.to_string(),
                expected: next,
                found: bad.pass,
            });
        }
        let mut seen: HashSet<TripleKey> = self.triples.iter().map(RelationTriple::key).collect();
        let delta: Vec<RelationTriple> = new_triples
            .into_iter()
            .filter(|t| seen.insert(t.key()))
            .collect();
        let mut all = self.triples.clone();
        all.extend(delta.iter().cloned());
        let snapshot = LkbSnapshot::build(all, next);
        let mut delta = delta;
        delta.sort_by(|a, b| dump_order(a).cmp(&dump_order(b)));
        Ok((snapshot, delta))
    }

    /// The snapshot as it stood after pass `k`.
    pub fn at_pass(&self, k: u32) -> LkbSnapshot {
        let kept = self
            .triples
            .iter()
            .filter(|t| t.pass <= k)
            .cloned()
            .collect();
        LkbSnapshot::build(kept, k.min(self.pass_completed))
    }

    /// (label, target) pairs describing `lemma`: its own relations plus the
    /// converse view of PART / PART-OF triples that name it as target.
    pub fn relation_pairs(&self, lemma: &str) -> BTreeSet<(RelationLabel, String)> {
        let mut pairs: BTreeSet<(RelationLabel, String)> = self
            .by_lemma(lemma)
            .map(|t| (t.label, t.target.clone()))
            .collect();
        for t in self.by_target(lemma) {
            if let Some(conv) = t.label.converse() {
                pairs.insert((conv, t.source.headword.clone()));
            }
        }
        pairs
    }

    pub fn serialize(&self) -> String {
        let mut out = String::from(DUMP_HEADER);
        out.push('\n');
        if self.pass_completed > 0 {
            let _ = writeln!(out, "{PASSES_PREFIX}{}", self.pass_completed);
        }
        for t in &self.triples {
            let _ = writeln!(out, "{}", dump_line(t));
        }
        out
    }

    pub fn deserialize(text: &str) -> Result<LkbSnapshot, LkbError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == DUMP_HEADER => {}
            _ => {
                return Err(LkbError::Parse {
                    line: 1,
                    reason: format!("expected header {DUMP_HEADER:?}"),
                })
            }
        }
        let mut declared = 0;
        let mut triples = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let err = |reason: String| LkbError::Parse {
                line: lineno,
                reason,
            };
            if let Some(n) = line.strip_prefix(PASSES_PREFIX) {
                declared = n
                    .parse()
                    .map_err(|_| err(format!("bad pass count {n:?}")))?;
                continue;
            }
            if line.is_empty() {
                return Err(err("empty line".into()));
            }
            let t = parse_line(line).map_err(err)?;
            if !seen.insert(t.key()) {
                return Err(err(format!("duplicate triple {t}")));
            }
            triples.push(t);
        }
        let max_pass = triples.iter().map(|t| t.pass).max().unwrap_or(0);
        Ok(LkbSnapshot::build(triples, declared.max(max_pass)))
    }
}

pub fn dump_line(t: &RelationTriple) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        t.source.headword,
        t.source.pos,
        t.source.citation(),
        t.label,
        t.target,
        t.pass,
        t.pattern
    )
}

fn parse_line(line: &str) -> Result<RelationTriple, String> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != 7 {
        return Err(format!(
            "expected 7 tab-separated fields, found {}",
            f.len()
        ));
    }
    let pos = Pos::from_code(f[1]).ok_or_else(|| format!("unknown pos {:?}", f[1]))?;
    let source = crate::corpus::SenseId::from_parts(f[0], pos, f[2])
        .ok_or_else(|| format!("bad sense citation {:?}", f[2]))?;
    if source.headword != f[0] || f[0].is_empty() {
        return Err(format!("bad source lemma {:?}", f[0]));
    }
    let label = f[3].parse().map_err(|e| format!("{e}"))?;
    if f[4].is_empty() {
        return Err("empty target".into());
    }
    let pass: u32 = f[5].parse().map_err(|_| format!("bad pass {:?}", f[5]))?;
    if pass == 0 {
        return Err("pass must be at least 1".into());
    }
    let pattern = f[6].parse().map_err(|e| format!("{e}"))?;
    Ok(RelationTriple {
        source,
        label,
        target: f[4].to_string(),
        pass,
        pattern,
    })
}

/// Content lemmas of every definition of `lemma` in the corpus.
pub fn definition_lemmas(corpus: &Corpus, lemma: &str) -> BTreeSet<String> {
    corpus
        .lookup(lemma)
        .into_iter()
        .flat_map(|e| tokenize(&e.definition))
        .filter(|t| t.cat.is_content() && !AUXILIARIES.contains(&t.lemma.as_str()))
        .map(|t| t.lemma)
        .collect()
}

/// `w_pair * shared (label, target) pairs + w_text * shared definition lemmas`.
pub fn similarity_weighted(
    lkb: &LkbSnapshot,
    corpus: &Corpus,
    a: &str,
    b: &str,
    weights: (u64, u64),
) -> u64 {
    let pairs = lkb
        .relation_pairs(a)
        .intersection(&lkb.relation_pairs(b))
        .count() as u64;
    let text = definition_lemmas(corpus, a)
        .intersection(&definition_lemmas(corpus, b))
        .count() as u64;
    weights.0 * pairs + weights.1 * text
}

pub fn similarity(lkb: &LkbSnapshot, corpus: &Corpus, a: &str, b: &str) -> u64 {
    similarity_weighted(lkb, corpus, a, b, (2, 1))
}
