//! The multi-pass driver.
//!
//! Pass `k` analyzes every entry against the frozen snapshot `k-1`, collects
//! the triples, and merges them once at the end of the pass. Entries are
//! independent within a pass and are processed in parallel.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{Corpus, DictEntry, SenseId};
use crate::lkb::{dump_line, similarity_weighted, LkbError, LkbSnapshot};
use crate::patterns::{
    run_patterns, Evidence, PatternLists, Reattachment, RelationTriple, UnresolvedSite,
};
use crate::sketch::{parse_definition_with, ParseOptions, SiteKind, Sketch};
use crate::textproc::tokenize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BootstrapError {
    #[error(transparent)]
    Lkb(#[from] LkbError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub max_passes: u32,
    /// (shared relation pair weight, shared definition lemma weight)
    pub similarity_weights: (u64, u64),
    pub lists: PatternLists,
    pub emit_unresolved: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_passes: 5,
            similarity_weights: (2, 1),
            lists: PatternLists::default(),
            emit_unresolved: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), BootstrapError> {
        if self.max_passes == 0 {
            return Err(BootstrapError::Config(
                "max_passes must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            transparent_heads: self.lists.transparent_heads.clone(),
        }
    }
}

/// Everything computed for one entry in one pass.
#[derive(Clone, Debug)]
pub struct EntryAnalysis {
    pub entry: SenseId,
    pub pass: u32,
    pub default_sketch: Sketch,
    pub final_sketch: Sketch,
    /// Reattachments that moved a site away from its default, by site id.
    pub decisions: Vec<Reattachment>,
    pub triples: Vec<RelationTriple>,
    pub unresolved: Vec<UnresolvedSite>,
}

pub fn default_sketch(entry: &DictEntry, config: &RunConfig) -> Sketch {
    parse_definition_with(entry, &tokenize(&entry.definition), &config.parse_options())
}

/// Coordination decisions for every coord-scope site of `sketch`.
///
/// A candidate wins only if its head is strictly more similar to the movable
/// conjunct than every other candidate; the returned decisions include those
/// that confirm the current choice.
pub fn resolve_coordination(
    sketch: &Sketch,
    snapshot: &LkbSnapshot,
    corpus: &Corpus,
    config: &RunConfig,
) -> Vec<Reattachment> {
    let mut out = Vec::new();
    for site in sketch
        .sites()
        .iter()
        .filter(|s| s.kind == SiteKind::CoordScope)
    {
        let movable = sketch.head_lemma(site.movable).to_string();
        let scores: Vec<(String, u64)> = site
            .candidates
            .iter()
            .map(|&c| {
                let lemma = sketch.head_lemma(c).to_string();
                let s = similarity_weighted(
                    snapshot,
                    corpus,
                    &lemma,
                    &movable,
                    config.similarity_weights,
                );
                (lemma, s)
            })
            .collect();
        let best = scores.iter().map(|s| s.1).max().unwrap_or(0);
        let winners: Vec<usize> = (0..scores.len()).filter(|&i| scores[i].1 == best).collect();
        if winners.len() != 1 {
            continue;
        }
        let quoted = |id| {
            format!(
                "\"{}\"",
                sketch.head_token(id).map_or("", |t| t.surface.as_str())
            )
        };
        out.push(Reattachment {
            entry: sketch.entry.clone(),
            site: site.id,
            kind: site.kind,
            from: site.chosen,
            to: winners[0],
            from_label: quoted(site.candidates[site.chosen]),
            to_label: quoted(site.candidates[winners[0]]),
            moved: sketch
                .head_token(site.movable)
                .map_or(String::new(), |t| t.surface.clone()),
            evidence: Evidence::Similarity { movable, scores },
        });
    }
    out
}

/// Runs one entry through pass `pass`, reading only `snapshot`.
pub fn analyze_entry(
    entry: &DictEntry,
    snapshot: &LkbSnapshot,
    corpus: &Corpus,
    config: &RunConfig,
    pass: u32,
) -> EntryAnalysis {
    let default = default_sketch(entry, config);
    let mut sketch = default.clone();
    let mut decisions = Vec::new();
    if pass >= 2 {
        for d in resolve_coordination(&default, snapshot, corpus, config) {
            sketch = sketch
                .settle(d.site, d.to)
                .expect("decision names a candidate");
            if d.moves() {
                decisions.push(d);
            }
        }
    }
    let out = run_patterns(&sketch, snapshot, pass, &config.lists);
    decisions.extend(out.decisions);
    decisions.sort_by_key(|d| d.site);
    let mut unresolved = if config.emit_unresolved {
        out.unresolved
    } else {
        Vec::new()
    };
    unresolved.sort();
    EntryAnalysis {
        entry: entry.id.clone(),
        pass,
        default_sketch: default,
        final_sketch: out.sketch,
        decisions,
        triples: out.triples,
        unresolved,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassReport {
    pub pass: u32,
    pub new_triples: usize,
    pub reattachments: usize,
    /// Decisions (entry, site, chosen) that differ from the previous pass.
    pub decision_changes: usize,
    pub unresolved: Vec<UnresolvedSite>,
    pub fallback_entries: Vec<SenseId>,
    /// The newly merged triples, in dump order.
    pub delta: Vec<RelationTriple>,
    pub decisions: Vec<Reattachment>,
}

type DecisionKey = (SenseId, usize, usize);

impl PassReport {
    fn decision_keys(&self) -> BTreeSet<DecisionKey> {
        self.decisions
            .iter()
            .map(|d| (d.entry.clone(), d.site, d.to))
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "pass {}: {} new triples, {} reattachments, {} decision changes, {} unresolved, {} fallbacks\n",
            self.pass,
            self.new_triples,
            self.reattachments,
            self.decision_changes,
            self.unresolved.len(),
            self.fallback_entries.len()
        );
        for t in &self.delta {
            let _ = writeln!(
                out,
                "  + {} {} {} ({})",
                t.source, t.label, t.target, t.pattern
            );
        }
        for d in &self.decisions {
            let _ = writeln!(out, "  ~ {}: {}", d.entry, d);
        }
        for u in &self.unresolved {
            let _ = writeln!(
                out,
                "  ? {} {}-PP on {}: {}",
                u.entry,
                u.prep,
                u.head,
                u.reason.name()
            );
        }
        for f in &self.fallback_entries {
            let _ = writeln!(out, "  ! {} fell back to a flat sketch", f);
        }
        out
    }

    pub fn render_tsv(&self) -> String {
        let mut out = format!(
            "pass\t{}\t{}\t{}\t{}\t{}\t{}\n",
            self.pass,
            self.new_triples,
            self.reattachments,
            self.decision_changes,
            self.unresolved.len(),
            self.fallback_entries.len()
        );
        for t in &self.delta {
            let _ = writeln!(out, "new\t{}\t{}", self.pass, dump_line(t));
        }
        for d in &self.decisions {
            let _ = writeln!(
                out,
                "reattach\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.pass,
                d.entry.headword,
                d.entry.citation(),
                d.kind.name(),
                d.from,
                d.to,
                d.evidence
            );
        }
        for u in &self.unresolved {
            let _ = writeln!(out, "unresolved\t{}\t{}", self.pass, u);
        }
        for f in &self.fallback_entries {
            let _ = writeln!(
                out,
                "fallback\t{}\t{}\t{}",
                self.pass,
                f.headword,
                f.citation()
            );
        }
        out
    }
}

/// One pass over the corpus against `snapshot`.
pub fn run_pass(
    corpus: &Corpus,
    snapshot: &LkbSnapshot,
    config: &RunConfig,
) -> Result<(LkbSnapshot, PassReport), BootstrapError> {
    let pass = snapshot.pass_completed() + 1;
    let analyses: Vec<EntryAnalysis> = corpus
        .entries()
        .par_iter()
        .map(|e| analyze_entry(e, snapshot, corpus, config, pass))
        .collect();

    let mut triples = Vec::new();
    let mut decisions = Vec::new();
    let mut unresolved = Vec::new();
    let mut fallback_entries = Vec::new();
    for a in analyses {
        if a.default_sketch.is_fallback() {
            fallback_entries.push(a.entry.clone());
        }
        triples.extend(a.triples);
        decisions.extend(a.decisions);
        unresolved.extend(a.unresolved);
    }
    let (next, delta) = snapshot.merge_with_delta(triples)?;
    decisions.sort_by(|a, b| (&a.entry, a.site).cmp(&(&b.entry, b.site)));
    unresolved.sort();
    fallback_entries.sort();
    let report = PassReport {
        pass,
        new_triples: delta.len(),
        reattachments: decisions.len(),
        decision_changes: decisions.len(),
        unresolved,
        fallback_entries,
        delta,
        decisions,
    };
    Ok((next, report))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub snapshot: LkbSnapshot,
    pub reports: Vec<PassReport>,
    /// False when `max_passes` ran out before a quiet pass.
    pub converged: bool,
}

impl RunOutcome {
    /// The snapshot after each pass, starting with the empty one.
    pub fn chain(&self) -> Vec<LkbSnapshot> {
        (0..=self.snapshot.pass_completed())
            .map(|k| self.snapshot.at_pass(k))
            .collect()
    }
}

fn drive(
    corpus: &Corpus,
    config: &RunConfig,
    passes: u32,
    stop_when_quiet: bool,
) -> Result<RunOutcome, BootstrapError> {
    config.validate()?;
    let mut snapshot = LkbSnapshot::empty();
    let mut reports: Vec<PassReport> = Vec::new();
    let mut converged = false;
    for _ in 0..passes {
        let (next, mut report) = run_pass(corpus, &snapshot, config)?;
        let previous = reports
            .last()
            .map(PassReport::decision_keys)
            .unwrap_or_default();
        report.decision_changes = previous
            .symmetric_difference(&report.decision_keys())
            .count();
        let quiet = report.new_triples == 0 && report.decision_changes == 0;
        snapshot = next;
        reports.push(report);
        if quiet {
            converged = true;
            if stop_when_quiet {
                break;
            }
        }
    }
    Ok(RunOutcome {
        snapshot,
        reports,
        converged,
    })
}

/// Passes until one adds no triples and changes no decisions, or until
/// `config.max_passes`.
pub fn run_until_converged(
    corpus: &Corpus,
    config: &RunConfig,
) -> Result<RunOutcome, BootstrapError> {
    drive(corpus, config, config.max_passes, true)
}

/// Exactly `passes` passes.
pub fn run_passes(
    corpus: &Corpus,
    config: &RunConfig,
    passes: u32,
) -> Result<RunOutcome, BootstrapError> {
    drive(corpus, config, passes, false)
}

fn indented(block: &str) -> String {
    block.lines().map(|l| format!("  {l}\n")).collect()
}

/// Human-readable derivation of one entry against a finished LKB.
///
/// The entry is re-analyzed as the last pass recorded in `lkb` saw it, i.e.
/// against `lkb` restricted to the passes before that one.
pub fn explain(
    entry: &DictEntry,
    corpus: &Corpus,
    lkb: &LkbSnapshot,
    config: &RunConfig,
) -> String {
    let pass = lkb.pass_completed().max(1);
    let frozen = lkb.at_pass(pass - 1);
    let a = analyze_entry(entry, &frozen, corpus, config, pass);
    let mut out = String::new();
    let _ = writeln!(out, "entry: {} [{}]", entry.id, entry.pos_code);
    let _ = writeln!(out, "definition: {}", entry.definition);
    let _ = writeln!(out, "analysis: pass {} reading snapshot {}", pass, pass - 1);
    if a.default_sketch.is_fallback() {
        out.push_str("note: chunker fell back to a flat sketch\n");
    }
    out.push_str("default sketch:\n");
    out.push_str(&indented(&a.default_sketch.render()));
    out.push_str("reattachments:\n");
    if a.decisions.is_empty() {
        out.push_str("  none\n");
    }
    for d in &a.decisions {
        let _ = writeln!(out, "  {d}");
    }
    out.push_str("final sketch:\n");
    out.push_str(&indented(&a.final_sketch.render()));
    if !a.unresolved.is_empty() {
        out.push_str("unresolved:\n");
        for u in &a.unresolved {
            let _ = writeln!(out, "  {}-PP on {}: {}", u.prep, u.head, u.reason.name());
        }
    }
    out.push_str("relations:\n");
    let own: Vec<&RelationTriple> = lkb
        .by_lemma(&entry.id.headword)
        .filter(|t| t.source == entry.id)
        .collect();
    if own.is_empty() {
        out.push_str("  none\n");
    }
    for t in own {
        let _ = writeln!(
            out,
            "  {} {}  pass {}  {}",
            t.label, t.target, t.pass, t.pattern
        );
    }
    out
}
