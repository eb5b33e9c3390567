//! Defining-formula patterns.
//!
//! Structural patterns read the sketch only and may fire on the first pass.
//! The of-PP and with-PP resolvers additionally consult a frozen
//! [`LkbSnapshot`] and only run from the second pass on, with one exception:
//! the MATERIAL reading of an of-PP whose complements are all seed substances
//! needs no lexical evidence and is applied on the first pass too.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::corpus::{Pos, SenseId};
use crate::lkb::LkbSnapshot;
use crate::sketch::{NodeId, NodeKind, SiteKind, Sketch};

pub const DEFAULT_TRANSPARENT_HEADS: &[&str] =
    &["type", "kind", "sort", "variety", "form", "ceremony"];
pub const DEFAULT_PORTION_HEADS: &[&str] =
    &["bar", "piece", "sheet", "block", "lump", "strip", "mass"];
pub const DEFAULT_SUBSTANCE_SEEDS: &[&str] = &[
    "gold", "silver", "metal", "plastic", "wood", "stone", "glass", "water",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationLabel {
    Hypernym,
    Instrument,
    Material,
    Part,
    PartOf,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 5] = [
        RelationLabel::Hypernym,
        RelationLabel::Instrument,
        RelationLabel::Material,
        RelationLabel::Part,
        RelationLabel::PartOf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationLabel::Hypernym => "HYPERNYM",
            RelationLabel::Instrument => "INSTRUMENT",
            RelationLabel::Material => "MATERIAL",
            RelationLabel::Part => "PART",
            RelationLabel::PartOf => "PART-OF",
        }
    }

    /// PART and PART-OF are converses; the other labels have none.
    pub fn converse(self) -> Option<RelationLabel> {
        match self {
            RelationLabel::Part => Some(RelationLabel::PartOf),
            RelationLabel::PartOf => Some(RelationLabel::Part),
            _ => None,
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName(pub String);

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown name {:?}", self.0)
    }
}

impl std::error::Error for UnknownName {}

impl FromStr for RelationLabel {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// Closed catalog of pattern names used for provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternName {
    GenusHypernym,
    PartOfLiteral,
    ThatHasPart,
    WithNounPart,
    ForGerundInstrument,
    OfPpResolver,
    WithPpResolver,
    CoordResolver,
}

impl PatternName {
    pub const ALL: [PatternName; 8] = [
        PatternName::GenusHypernym,
        PatternName::PartOfLiteral,
        PatternName::ThatHasPart,
        PatternName::WithNounPart,
        PatternName::ForGerundInstrument,
        PatternName::OfPpResolver,
        PatternName::WithPpResolver,
        PatternName::CoordResolver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternName::GenusHypernym => "genus-hypernym",
            PatternName::PartOfLiteral => "part-of-literal",
            PatternName::ThatHasPart => "that-has-part",
            PatternName::WithNounPart => "with-noun-part",
            PatternName::ForGerundInstrument => "for-gerund-instrument",
            PatternName::OfPpResolver => "of-pp-resolver",
            PatternName::WithPpResolver => "with-pp-resolver",
            PatternName::CoordResolver => "coord-resolver",
        }
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternName {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternName::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationTriple {
    pub source: SenseId,
    pub label: RelationLabel,
    /// Lemma of the related word.
    pub target: String,
    pub pass: u32,
    pub pattern: PatternName,
}

/// Identity of a triple; provenance (pass, pattern) is not part of it.
pub type TripleKey = (SenseId, RelationLabel, String);

impl RelationTriple {
    pub fn new(
        source: &SenseId,
        label: RelationLabel,
        target: &str,
        pass: u32,
        pattern: PatternName,
    ) -> Self {
        RelationTriple {
            source: source.clone(),
            label,
            target: target.to_string(),
            pass,
            pattern,
        }
    }

    pub fn source_lemma(&self) -> &str {
        &self.source.headword
    }

    pub fn key(&self) -> TripleKey {
        (self.source.clone(), self.label, self.target.clone())
    }
}

impl fmt::Display for RelationTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.source.headword, self.label, self.target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnresolvedReason {
    NoLkbEvidence,
    RelationAmbiguous,
}

impl UnresolvedReason {
    pub fn name(self) -> &'static str {
        match self {
            UnresolvedReason::NoLkbEvidence => "no-lkb-evidence",
            UnresolvedReason::RelationAmbiguous => "relation-ambiguous",
        }
    }
}

/// A PP whose reading could not be decided; reported, never emitted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnresolvedSite {
    pub entry: SenseId,
    pub prep: String,
    /// Lemma of the head the PP currently modifies.
    pub head: String,
    /// The PP node.
    pub node: NodeId,
    pub site: Option<usize>,
    pub reason: UnresolvedReason,
}

impl fmt::Display for UnresolvedSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}-PP@{}\t{}",
            self.entry.headword,
            self.entry.pos,
            self.entry.citation(),
            self.prep,
            self.head,
            self.reason.name()
        )
    }
}

/// The lexical lookup that justified a reattachment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Evidence {
    /// `complement INSTRUMENT verb` was found in the snapshot.
    Instrument { complement: String, verb: String },
    /// Similarity of each candidate's head to the movable conjunct, in
    /// candidate order.
    Similarity {
        movable: String,
        scores: Vec<(String, u64)>,
    },
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Instrument { complement, verb } => {
                write!(f, "{complement} INSTRUMENT {verb}")
            }
            Evidence::Similarity { movable, scores } => {
                let mut sorted: Vec<&(String, u64)> = scores.iter().collect();
                sorted.sort_by_key(|s| std::cmp::Reverse(s.1));
                for (i, (c, s)) in sorted.iter().enumerate() {
                    if i > 0 {
                        f.write_str(if sorted[i - 1].1 > *s { " > " } else { " = " })?;
                    }
                    write!(f, "similarity({c}, {movable})={s}")?;
                }
                Ok(())
            }
        }
    }
}

/// A decision to move an ambiguity site away from (or confirm) its default.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reattachment {
    pub entry: SenseId,
    pub site: usize,
    pub kind: SiteKind,
    pub from: usize,
    pub to: usize,
    pub from_label: String,
    pub to_label: String,
    /// Surface text of the moved constituent.
    pub moved: String,
    pub evidence: Evidence,
}

impl Reattachment {
    pub fn moves(&self) -> bool {
        self.from != self.to
    }
}

impl fmt::Display for Reattachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SiteKind::PpAttach => write!(
                f,
                "site {} ({}): {}-PP \"{}\" moves from {} to {}; evidence: {}",
                self.site,
                self.kind.name(),
                self.moved.split_whitespace().next().unwrap_or_default(),
                self.moved,
                self.from_label,
                self.to_label,
                self.evidence
            ),
            SiteKind::CoordScope => write!(
                f,
                "site {} ({}): coordination partner of \"{}\" moves from {} to {}; evidence: {}",
                self.site,
                self.kind.name(),
                self.moved,
                self.from_label,
                self.to_label,
                self.evidence
            ),
        }
    }
}

/// Configurable word lists used by the patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternLists {
    pub transparent_heads: Vec<String>,
    pub portion_heads: Vec<String>,
    pub substance_seeds: Vec<String>,
}

impl Default for PatternLists {
    fn default() -> Self {
        let own = |l: &[&str]| l.iter().map(|s| s.to_string()).collect();
        PatternLists {
            transparent_heads: own(DEFAULT_TRANSPARENT_HEADS),
            portion_heads: own(DEFAULT_PORTION_HEADS),
            substance_seeds: own(DEFAULT_SUBSTANCE_SEEDS),
        }
    }
}

impl PatternLists {
    fn is_transparent(&self, lemma: &str) -> bool {
        self.transparent_heads.iter().any(|h| h == lemma)
    }

    fn is_portion(&self, lemma: &str) -> bool {
        self.portion_heads.iter().any(|h| h == lemma)
    }
}

fn is_noun_sense(sketch: &Sketch) -> bool {
    sketch.entry.pos == Pos::Noun && sketch.node(sketch.genus()).kind == NodeKind::Np
}

fn is_word(sketch: &Sketch, id: NodeId) -> bool {
    sketch.head_token(id).is_some_and(|t| t.cat.is_word())
}

/// Genus, plus the of-complement standing in for a transparent genus.
fn class_heads(sketch: &Sketch, lists: &PatternLists) -> Vec<NodeId> {
    let genus = sketch.genus();
    let eff = sketch.effective_genus(&lists.transparent_heads);
    if eff == genus {
        vec![genus]
    } else {
        vec![genus, eff]
    }
}

/// Trusted modifiers of `head` that are PPs with preposition `prep`.
fn pps(sketch: &Sketch, head: NodeId, prep: &str) -> Vec<NodeId> {
    sketch
        .modifiers(head)
        .into_iter()
        .filter(|&m| {
            let n = sketch.node(m);
            n.kind == NodeKind::Pp && n.prep.as_deref() == Some(prep) && sketch.is_trusted(m)
        })
        .collect()
}

/// Conjunct lemmas of an NP, tagging those reached through a settled
/// coordination site.
fn conjunct_targets(sketch: &Sketch, np: NodeId) -> Vec<(String, bool)> {
    sketch
        .conjuncts(np)
        .into_iter()
        .filter(|&c| is_word(sketch, c))
        .map(|c| {
            let via_coord = sketch
                .site_of(c)
                .and_then(|s| sketch.site(s))
                .is_some_and(|s| s.kind == SiteKind::CoordScope && s.settled);
            (sketch.head_lemma(c).to_string(), via_coord)
        })
        .collect()
}

fn np_complement(sketch: &Sketch, pp: NodeId) -> Option<NodeId> {
    sketch
        .complement(pp)
        .filter(|&c| sketch.node(c).kind == NodeKind::Np)
}

pub fn extract_hypernym(sketch: &Sketch, lists: &PatternLists, pass: u32) -> Vec<RelationTriple> {
    let genus = sketch.genus();
    let src = &sketch.entry;
    let mut out = Vec::new();
    if !is_word(sketch, genus) {
        return out;
    }
    let pattern = PatternName::GenusHypernym;
    out.push(RelationTriple::new(
        src,
        RelationLabel::Hypernym,
        sketch.head_lemma(genus),
        pass,
        pattern,
    ));
    if !is_noun_sense(sketch) {
        return out;
    }
    if let Some(comp) = sketch.of_complement(genus) {
        match sketch.node(comp).kind {
            NodeKind::Vp => {
                out.push(RelationTriple::new(
                    src,
                    RelationLabel::Hypernym,
                    sketch.head_lemma(comp),
                    pass,
                    pattern,
                ));
            }
            NodeKind::Np if lists.is_transparent(sketch.head_lemma(genus)) => {
                for (t, _) in conjunct_targets(sketch, comp) {
                    out.push(RelationTriple::new(
                        src,
                        RelationLabel::Hypernym,
                        &t,
                        pass,
                        pattern,
                    ));
                }
            }
            _ => {}
        }
    }
    out
}

pub fn extract_part_of_literal(sketch: &Sketch, pass: u32) -> Vec<RelationTriple> {
    let genus = sketch.genus();
    if !is_noun_sense(sketch) || sketch.head_lemma(genus) != "part" {
        return Vec::new();
    }
    let Some(comp) = sketch
        .of_complement(genus)
        .filter(|&c| sketch.node(c).kind == NodeKind::Np)
    else {
        return Vec::new();
    };
    conjunct_targets(sketch, comp)
        .into_iter()
        .map(|(t, _)| {
            RelationTriple::new(
                &sketch.entry,
                RelationLabel::PartOf,
                &t,
                pass,
                PatternName::PartOfLiteral,
            )
        })
        .collect()
}

pub fn extract_part(sketch: &Sketch, lists: &PatternLists, pass: u32) -> Vec<RelationTriple> {
    if !is_noun_sense(sketch) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut emit = |targets: Vec<(String, bool)>, pattern: PatternName| {
        for (t, via_coord) in targets {
            let p = if via_coord {
                PatternName::CoordResolver
            } else {
                pattern
            };
            out.push(RelationTriple::new(
                &sketch.entry,
                RelationLabel::Part,
                &t,
                pass,
                p,
            ));
        }
    };
    for head in class_heads(sketch, lists) {
        for m in sketch.modifiers(head) {
            let n = sketch.node(m);
            let has_clause = n.kind == NodeKind::RelClause
                && matches!(n.rel_word.as_deref(), Some("that" | "which"))
                && sketch.head_lemma(m) == "have";
            if has_clause {
                if let Some(obj) = sketch
                    .complement(m)
                    .filter(|&c| sketch.node(c).kind == NodeKind::Np)
                {
                    emit(conjunct_targets(sketch, obj), PatternName::ThatHasPart);
                }
            }
        }
        for pp in pps(sketch, head, "with") {
            if let Some(comp) = np_complement(sketch, pp) {
                emit(conjunct_targets(sketch, comp), PatternName::WithNounPart);
            }
        }
    }
    out
}

pub fn extract_instrument_for(
    sketch: &Sketch,
    lists: &PatternLists,
    pass: u32,
) -> Vec<RelationTriple> {
    if !is_noun_sense(sketch) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for head in class_heads(sketch, lists) {
        for pp in pps(sketch, head, "for") {
            if let Some(vp) = sketch
                .complement(pp)
                .filter(|&c| sketch.node(c).kind == NodeKind::Vp)
            {
                out.push(RelationTriple::new(
                    &sketch.entry,
                    RelationLabel::Instrument,
                    sketch.head_lemma(vp),
                    pass,
                    PatternName::ForGerundInstrument,
                ));
            }
        }
    }
    out
}

/// Lemmas counted as substances: the seeds plus anything whose HYPERNYM chain
/// in the snapshot reaches a seed.
pub fn is_substance(lkb: &LkbSnapshot, lemma: &str, seeds: &[String]) -> bool {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([lemma.to_string()]);
    while let Some(cur) = queue.pop_front() {
        if seeds.contains(&cur) {
            return true;
        }
        if !seen.insert(cur.clone()) {
            continue;
        }
        for t in lkb.targets(&cur, RelationLabel::Hypernym) {
            if !seen.contains(&t) {
                queue.push_back(t);
            }
        }
    }
    false
}

pub fn resolve_of_pp(
    sketch: &Sketch,
    lkb: &LkbSnapshot,
    lists: &PatternLists,
    pass: u32,
) -> (Vec<RelationTriple>, Vec<UnresolvedSite>) {
    let mut triples = Vec::new();
    let mut unresolved = Vec::new();
    if !is_noun_sense(sketch) {
        return (triples, unresolved);
    }
    let genus = sketch.genus();
    let src = &sketch.entry;
    for head in class_heads(sketch, lists) {
        let m = sketch.head_lemma(head);
        if head == genus && m == "part" {
            continue;
        }
        for pp in pps(sketch, head, "of") {
            let Some(comp) = np_complement(sketch, pp) else {
                // gerund complement: the event reading, already a HYPERNYM
                continue;
            };
            let conj: Vec<String> = conjunct_targets(sketch, comp)
                .into_iter()
                .map(|(t, _)| t)
                .collect();
            let part_of: Vec<&String> = conj
                .iter()
                .filter(|c| {
                    lkb.targets(m, RelationLabel::PartOf).contains(*c)
                        || lkb.targets(c, RelationLabel::Part).iter().any(|t| t == m)
                })
                .collect();
            if !part_of.is_empty() {
                for c in part_of {
                    triples.push(RelationTriple::new(
                        src,
                        RelationLabel::PartOf,
                        c,
                        pass,
                        PatternName::OfPpResolver,
                    ));
                }
            } else if lists.is_portion(m)
                && conj
                    .iter()
                    .all(|c| is_substance(lkb, c, &lists.substance_seeds))
            {
                for c in &conj {
                    triples.push(RelationTriple::new(
                        src,
                        RelationLabel::Material,
                        c,
                        pass,
                        PatternName::OfPpResolver,
                    ));
                }
            } else if lists.is_transparent(m) {
                // HYPERNYM through a transparent head; extract_hypernym emits it
            } else {
                unresolved.push(UnresolvedSite {
                    entry: src.clone(),
                    prep: "of".to_string(),
                    head: m.to_string(),
                    node: pp,
                    site: sketch.site_of(pp),
                    reason: UnresolvedReason::RelationAmbiguous,
                });
            }
        }
    }
    (triples, unresolved)
}

/// Verbal nodes whose lemma is a HYPERNYM of the defined sense: the main verb
/// of a verb sense, or the gerund complement of the genus's of-PP.
fn hypernym_bearing_verbs(sketch: &Sketch) -> Vec<NodeId> {
    let genus = sketch.genus();
    if sketch.node(genus).kind.is_verbal() {
        return vec![genus];
    }
    sketch
        .of_complement(genus)
        .filter(|&c| sketch.node(c).kind == NodeKind::Vp)
        .into_iter()
        .collect()
}

/// Outcome of with-PP resolution on one sketch.
#[derive(Clone, Debug)]
pub struct WithPpOutcome {
    pub sketch: Sketch,
    pub triples: Vec<RelationTriple>,
    pub decisions: Vec<Reattachment>,
    pub unresolved: Vec<UnresolvedSite>,
}

pub fn resolve_with_pp(sketch: &Sketch, lkb: &LkbSnapshot, pass: u32) -> WithPpOutcome {
    let mut current = sketch.clone();
    let mut triples = Vec::new();
    let mut decisions = Vec::new();
    let mut unresolved = Vec::new();
    let bearers = hypernym_bearing_verbs(sketch);
    let with_pps: Vec<NodeId> = (0..sketch.nodes().len())
        .filter(|&n| {
            sketch.node(n).kind == NodeKind::Pp && sketch.node(n).prep.as_deref() == Some("with")
        })
        .collect();

    for pp in with_pps {
        let Some(comp) = np_complement(&current, pp) else {
            continue;
        };
        let conj: Vec<String> = conjunct_targets(&current, comp)
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let evidence_for = |verb: &str| {
            conj.iter()
                .find(|c| {
                    lkb.targets(c, RelationLabel::Instrument)
                        .iter()
                        .any(|t| t == verb)
                })
                .cloned()
        };
        let (verbs, site): (Vec<(usize, NodeId)>, Option<usize>) = match current.site_of(pp) {
            Some(s) => {
                let site = current.site(s).expect("site of node");
                let v = site
                    .candidates
                    .iter()
                    .copied()
                    .enumerate()
                    .filter(|&(_, c)| current.node(c).kind.is_verbal())
                    .collect();
                (v, Some(s))
            }
            None => match current.parent(pp) {
                Some(p) if current.node(p).kind.is_verbal() => (vec![(0, p)], None),
                _ => (Vec::new(), None),
            },
        };
        if verbs.is_empty() {
            continue;
        }
        let found = verbs.iter().find_map(|&(i, v)| {
            let lemma = current.head_lemma(v).to_string();
            evidence_for(&lemma).map(|c| (i, v, c, lemma))
        });
        match found {
            Some((idx, verb, complement, verb_lemma)) => {
                if let Some(s) = site {
                    let from = current.site(s).expect("site").chosen;
                    let from_label = current.label(current.parent(pp).expect("attached"));
                    current = current.settle(s, idx).expect("candidate from site");
                    if from != idx {
                        decisions.push(Reattachment {
                            entry: current.entry.clone(),
                            site: s,
                            kind: SiteKind::PpAttach,
                            from,
                            to: idx,
                            from_label,
                            to_label: current.label(verb),
                            moved: current.subtree_text(pp),
                            evidence: Evidence::Instrument {
                                complement,
                                verb: verb_lemma,
                            },
                        });
                    }
                }
                if bearers.contains(&verb) {
                    for c in &conj {
                        triples.push(RelationTriple::new(
                            &current.entry,
                            RelationLabel::Instrument,
                            c,
                            pass,
                            PatternName::WithPpResolver,
                        ));
                    }
                }
            }
            None => unresolved.push(UnresolvedSite {
                entry: current.entry.clone(),
                prep: "with".to_string(),
                head: current
                    .head_lemma(current.parent(pp).expect("attached"))
                    .to_string(),
                node: pp,
                site,
                reason: UnresolvedReason::NoLkbEvidence,
            }),
        }
    }
    WithPpOutcome {
        sketch: current,
        triples,
        decisions,
        unresolved,
    }
}

/// Everything the patterns produced for one sketch in one pass.
#[derive(Clone, Debug)]
pub struct PatternOutput {
    /// The sketch the structural patterns were applied to.
    pub sketch: Sketch,
    pub triples: Vec<RelationTriple>,
    pub decisions: Vec<Reattachment>,
    pub unresolved: Vec<UnresolvedSite>,
}

/// Structural patterns only; these never read the LKB.
pub fn structural_patterns(
    sketch: &Sketch,
    lists: &PatternLists,
    pass: u32,
) -> Vec<RelationTriple> {
    let mut out = extract_hypernym(sketch, lists, pass);
    out.extend(extract_part_of_literal(sketch, pass));
    out.extend(extract_part(sketch, lists, pass));
    out.extend(extract_instrument_for(sketch, lists, pass));
    out
}

/// Runs the patterns for `pass` on one sketch.
///
/// Pass 1 ignores `lkb` entirely. Later passes resolve with-PPs against the
/// snapshot first and apply the structural patterns to the resulting sketch.
pub fn run_patterns(
    sketch: &Sketch,
    lkb: &LkbSnapshot,
    pass: u32,
    lists: &PatternLists,
) -> PatternOutput {
    let mut triples = Vec::new();
    let mut decisions = Vec::new();
    let mut unresolved = Vec::new();
    let final_sketch = if pass <= 1 {
        triples.extend(structural_patterns(sketch, lists, pass));
        let (of_triples, _) = resolve_of_pp(sketch, &LkbSnapshot::empty(), lists, pass);
        triples.extend(of_triples);
        sketch.clone()
    } else {
        let with = resolve_with_pp(sketch, lkb, pass);
        triples.extend(structural_patterns(&with.sketch, lists, pass));
        triples.extend(with.triples);
        let (of_triples, of_unresolved) = resolve_of_pp(&with.sketch, lkb, lists, pass);
        triples.extend(of_triples);
        decisions = with.decisions;
        unresolved.extend(with.unresolved);
        unresolved.extend(of_unresolved);
        with.sketch
    };
    PatternOutput {
        sketch: final_sketch,
        triples: dedup(triples),
        decisions,
        unresolved,
    }
}

/// Drops later triples with an already-seen (source, label, target).
pub fn dedup(triples: Vec<RelationTriple>) -> Vec<RelationTriple> {
    let mut seen = BTreeSet::new();
    triples
        .into_iter()
        .filter(|t| seen.insert(t.key()))
        .collect()
}
