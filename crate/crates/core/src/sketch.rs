//! Chunk-level syntactic sketches of definitions.
//!
//! A [`Sketch`] is the closest-head analysis of one definition together with
//! the places where that analysis is a guess. Each guess is an
//! [`AmbiguitySite`]: a movable node (a PP or a coordinated NP) and the
//! ordered list of heads it could attach to, nearest first. Moving a node is
//! done with [`Sketch::reattach`]; node identities and token spans never change.
//!
//! The chunker covers the definition sublanguage only:
//!
//! * noun senses: `[Det] Mod* Noun (PP | RelClause | PartClause)*`
//! * verb senses: `to Verb [NP | (NP)] PP*`
//!
//! A PP that directly follows its clause head attaches to it. Any later PP is a
//! `pp-attach` site whose candidates are the NP and VP heads of the current
//! clause. A coordinated NP is a `coord-scope` site when the nearest NP sits
//! inside a participle clause, in which case the noun that clause modifies is
//! a candidate too. A comma closes every open clause and attaches the next
//! constituent to the definition head.

use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::{DictEntry, Pos, SenseId};
use crate::textproc::{Cat, Token};

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SketchError {
    #[error("no ambiguity site {0}")]
    NoSuchSite(usize),
    #[error("site {site} has no candidate {candidate}")]
    NoSuchCandidate { site: usize, candidate: usize },
    #[error("attachment vector has {found} entries, sketch has {expected} sites")]
    VectorLength { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Np,
    Pp,
    Vp,
    RelClause,
    PartClause,
    /// Only produced in rendered views; see [`Sketch::render`].
    CoordGroup,
    Tail,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Np => "NP",
            NodeKind::Pp => "PP",
            NodeKind::Vp => "VP",
            NodeKind::RelClause => "RelClause",
            NodeKind::PartClause => "PartClause",
            NodeKind::CoordGroup => "CoordGroup",
            NodeKind::Tail => "Tail",
        }
    }

    /// Nodes whose head is a verb.
    pub fn is_verbal(self) -> bool {
        matches!(
            self,
            NodeKind::Vp | NodeKind::RelClause | NodeKind::PartClause
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Root,
    /// Object of a verb or complement of a preposition.
    Complement,
    Modifier,
    /// A non-initial conjunct, attached to its partner NP.
    Conjunct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attach {
    Root,
    Fixed(NodeId),
    Site(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchNode {
    pub kind: NodeKind,
    /// Token index of the head word (the preposition for PPs).
    pub head: usize,
    /// Token range `[start, end)` covered by this node's own words.
    pub tokens: (usize, usize),
    pub prep: Option<String>,
    pub rel_word: Option<String>,
    pub conj: Option<String>,
    /// Parenthesized object, e.g. `(something)`.
    pub optional: bool,
    pub role: Role,
    pub attach: Attach,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteKind {
    PpAttach,
    CoordScope,
}

impl SiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SiteKind::PpAttach => "pp-attach",
            SiteKind::CoordScope => "coord-scope",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguitySite {
    pub id: usize,
    pub kind: SiteKind,
    pub movable: NodeId,
    /// Nearest first.
    pub candidates: Vec<NodeId>,
    pub chosen: usize,
    /// Set once lexical evidence has decided the site.
    pub settled: bool,
}

impl AmbiguitySite {
    /// A single-candidate site never needs evidence.
    pub fn is_trusted(&self) -> bool {
        self.candidates.len() == 1 || self.settled
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sketch {
    pub entry: SenseId,
    tokens: Vec<Token>,
    nodes: Vec<SketchNode>,
    root: NodeId,
    genus: NodeId,
    sites: Vec<AmbiguitySite>,
    fallback: bool,
}

/// Parser configuration; heads in `transparent_heads` are skipped as
/// attachment candidates because their of-complement stands in for them.
#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub transparent_heads: Vec<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            transparent_heads: crate::patterns::DEFAULT_TRANSPARENT_HEADS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

pub fn parse_definition(entry: &DictEntry, tokens: &[Token]) -> Sketch {
    parse_definition_with(entry, tokens, &ParseOptions::default())
}

pub fn parse_definition_with(entry: &DictEntry, tokens: &[Token], opts: &ParseOptions) -> Sketch {
    let mut p = Parser::new(tokens, opts);
    let parsed = match entry.id.pos {
        Pos::Noun => p.noun_definition(),
        Pos::Verb => p.verb_definition(),
    };
    match parsed {
        Some(root) => Sketch {
            entry: entry.id.clone(),
            tokens: tokens.to_vec(),
            nodes: p.nodes,
            root,
            genus: root,
            sites: p.sites,
            fallback: false,
        },
        None => flat_sketch(entry, tokens),
    }
}

/// Genus = last noun before the first preposition; no sites.
fn flat_sketch(entry: &DictEntry, tokens: &[Token]) -> Sketch {
    let first_prep = tokens
        .iter()
        .position(|t| t.cat == Cat::Prep)
        .unwrap_or(tokens.len());
    let (kind, head) = match entry.id.pos {
        Pos::Noun => (
            NodeKind::Np,
            tokens[..first_prep]
                .iter()
                .rposition(|t| t.cat == Cat::Noun)
                .or_else(|| tokens.iter().position(|t| t.cat.is_word())),
        ),
        Pos::Verb => (
            NodeKind::Vp,
            tokens
                .iter()
                .position(|t| t.cat == Cat::Verb)
                .or_else(|| tokens.iter().position(|t| t.cat.is_word())),
        ),
    };
    let head = head.unwrap_or(0);
    let node = SketchNode {
        kind,
        head,
        tokens: (head, (head + 1).min(tokens.len())),
        prep: None,
        rel_word: None,
        conj: None,
        optional: false,
        role: Role::Root,
        attach: Attach::Root,
    };
    Sketch {
        entry: entry.id.clone(),
        tokens: tokens.to_vec(),
        nodes: vec![node],
        root: 0,
        genus: 0,
        sites: Vec::new(),
        fallback: true,
    }
}

impl Sketch {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn nodes(&self) -> &[SketchNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &SketchNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// The genus NP of a noun sense, or the main VP of a verb sense.
    pub fn genus(&self) -> NodeId {
        self.genus
    }

    pub fn sites(&self) -> &[AmbiguitySite] {
        &self.sites
    }

    pub fn site(&self, id: usize) -> Option<&AmbiguitySite> {
        self.sites.get(id)
    }

    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    pub fn head_lemma(&self, id: NodeId) -> &str {
        match self.tokens.get(self.nodes[id].head) {
            Some(t) => &t.lemma,
            None => "",
        }
    }

    pub fn head_token(&self, id: NodeId) -> Option<&Token> {
        self.tokens.get(self.nodes[id].head)
    }

    /// Surface text from the first to the last word under `id`.
    pub fn subtree_text(&self, id: NodeId) -> String {
        let mut ids = vec![id];
        let mut i = 0;
        while i < ids.len() {
            ids.extend(self.children(ids[i]));
            i += 1;
        }
        let covered = ids
            .iter()
            .map(|&n| self.nodes[n].tokens)
            .filter(|(s, e)| s < e);
        let Some((start, end)) = covered.reduce(|a, b| (a.0.min(b.0), a.1.max(b.1))) else {
            return String::new();
        };
        self.tokens[start..end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Current parent of `id` under the chosen attachments.
    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        match self.nodes[id].attach {
            Attach::Root => None,
            Attach::Fixed(p) => Some(p),
            Attach::Site(s) => {
                let site = &self.sites[s];
                Some(site.candidates[site.chosen])
            }
        }
    }

    /// Whether the attachment of `id` is unambiguous or evidence-decided.
    pub fn is_trusted(&self, id: NodeId) -> bool {
        match self.nodes[id].attach {
            Attach::Root | Attach::Fixed(_) => true,
            Attach::Site(s) => self.sites[s].is_trusted(),
        }
    }

    pub fn site_of(&self, id: NodeId) -> Option<usize> {
        match self.nodes[id].attach {
            Attach::Site(s) => Some(s),
            _ => None,
        }
    }

    /// Children of `id` in token order, conjuncts included.
    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = (0..self.nodes.len())
            .filter(|&n| self.parent(n) == Some(id))
            .collect();
        out.sort_by_key(|&n| self.nodes[n].tokens.0);
        out
    }

    /// Post-head modifiers of `id` (PPs, clauses, tails) in token order.
    pub fn modifiers(&self, id: NodeId) -> Vec<NodeId> {
        self.children(id)
            .into_iter()
            .filter(|&n| self.nodes[n].role == Role::Modifier)
            .collect()
    }

    /// Object of a verbal node or complement of a PP.
    pub fn complement(&self, id: NodeId) -> Option<NodeId> {
        self.children(id)
            .into_iter()
            .find(|&n| self.nodes[n].role == Role::Complement)
    }

    /// `id` followed by every conjunct coordinated with it through a trusted
    /// attachment, in token order.
    pub fn conjuncts(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            let cur = out[i];
            for c in self.children(cur) {
                if self.nodes[c].role == Role::Conjunct && self.is_trusted(c) {
                    out.push(c);
                }
            }
            i += 1;
        }
        out.sort_by_key(|&n| self.nodes[n].tokens.0);
        out
    }

    /// The NP that carries the class of the defined word: the of-complement
    /// when the genus is a transparent head such as *type*, otherwise the genus.
    pub fn effective_genus(&self, transparent_heads: &[String]) -> NodeId {
        if self.nodes[self.genus].kind != NodeKind::Np
            || !transparent_heads
                .iter()
                .any(|h| h == self.head_lemma(self.genus))
        {
            return self.genus;
        }
        self.of_complement(self.genus)
            .filter(|&c| self.nodes[c].kind == NodeKind::Np)
            .unwrap_or(self.genus)
    }

    /// Complement of the trusted of-PP directly modifying `id`, if any.
    pub fn of_complement(&self, id: NodeId) -> Option<NodeId> {
        self.modifiers(id)
            .into_iter()
            .find(|&m| {
                self.nodes[m].kind == NodeKind::Pp
                    && self.nodes[m].prep.as_deref() == Some("of")
                    && self.is_trusted(m)
            })
            .and_then(|pp| self.complement(pp))
    }

    /// Returns a copy with `site.chosen = candidate`.
    pub fn reattach(&self, site: usize, candidate: usize) -> Result<Sketch, SketchError> {
        let mut out = self.clone();
        out.choose(site, candidate)?;
        Ok(out)
    }

    /// Like [`Sketch::reattach`] but also marks the site as decided by evidence.
    pub fn settle(&self, site: usize, candidate: usize) -> Result<Sketch, SketchError> {
        let mut out = self.clone();
        out.choose(site, candidate)?;
        out.sites[site].settled = true;
        Ok(out)
    }

    fn choose(&mut self, site: usize, candidate: usize) -> Result<(), SketchError> {
        let s = self
            .sites
            .get_mut(site)
            .ok_or(SketchError::NoSuchSite(site))?;
        if candidate >= s.candidates.len() {
            return Err(SketchError::NoSuchCandidate { site, candidate });
        }
        s.chosen = candidate;
        Ok(())
    }

    /// Applies one chosen index per site.
    pub fn with_choices(&self, choices: &[usize]) -> Result<Sketch, SketchError> {
        if choices.len() != self.sites.len() {
            return Err(SketchError::VectorLength {
                expected: self.sites.len(),
                found: choices.len(),
            });
        }
        let mut out = self.clone();
        for (site, &c) in choices.iter().enumerate() {
            out.choose(site, c)?;
        }
        Ok(out)
    }

    pub fn choices(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.chosen).collect()
    }

    /// Short label such as `NP(fish)` or `PP(with)`.
    pub fn label(&self, id: NodeId) -> String {
        let n = &self.nodes[id];
        let head = match n.kind {
            NodeKind::Pp => n.prep.clone().unwrap_or_default(),
            _ => self.head_lemma(id).to_string(),
        };
        format!("{}({})", n.kind.name(), head)
    }

    /// Indented one-node-per-line rendering of the current analysis.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_slot(self.root, 0, &mut out);
        out
    }

    fn render_slot(&self, id: NodeId, depth: usize, out: &mut String) {
        let conjuncts: Vec<NodeId> = self
            .children(id)
            .into_iter()
            .filter(|&c| self.nodes[c].role == Role::Conjunct)
            .collect();
        if conjuncts.is_empty() {
            self.render_node(id, depth, out);
            return;
        }
        let conj = self.nodes[conjuncts[0]].conj.as_deref().unwrap_or("and");
        let _ = writeln!(
            out,
            "{}{}({})",
            indent(depth),
            NodeKind::CoordGroup.name(),
            conj
        );
        self.render_node(id, depth + 1, out);
        for c in conjuncts {
            self.render_slot(c, depth + 1, out);
        }
    }

    fn render_node(&self, id: NodeId, depth: usize, out: &mut String) {
        let n = &self.nodes[id];
        let _ = write!(out, "{}{}", indent(depth), self.label(id));
        if n.optional {
            out.push_str(" optional");
        }
        if let Attach::Site(s) = n.attach {
            let site = &self.sites[s];
            let _ = write!(
                out,
                " [site {}: chosen {} of {}]",
                s,
                site.chosen,
                site.candidates.len()
            );
        }
        out.push('\n');
        for c in self.children(id) {
            if self.nodes[c].role != Role::Conjunct {
                self.render_slot(c, depth + 1, out);
            }
        }
    }
}

fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

/// Every chosen-vector over the sketch's sites, in lexicographic order.
pub fn enumerate_attachments(sketch: &Sketch) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for site in sketch.sites() {
        let mut next = Vec::with_capacity(out.len() * site.candidates.len());
        for prefix in &out {
            for c in 0..site.candidates.len() {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

const COMPLEX_PREPS: &[(&str, &str)] = &[
    ("close", "to"),
    ("equal", "to"),
    ("next", "to"),
    ("such", "as"),
    ("according", "to"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClauseKind {
    Root,
    Complement,
    Relative,
    Participle,
}

#[derive(Clone, Debug)]
struct Clause {
    kind: ClauseKind,
    head: NodeId,
    /// NP and VP heads opened in this clause, left to right.
    frontier: Vec<NodeId>,
    constituents: usize,
    attached_to: Option<NodeId>,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    nodes: Vec<SketchNode>,
    sites: Vec<AmbiguitySite>,
    clauses: Vec<Clause>,
    opts: &'a ParseOptions,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], opts: &'a ParseOptions) -> Self {
        Parser {
            toks,
            pos: 0,
            nodes: Vec::new(),
            sites: Vec::new(),
            clauses: Vec::new(),
            opts,
        }
    }

    fn tok(&self, i: usize) -> Option<&'a Token> {
        self.toks.get(i)
    }

    fn cur(&self) -> Option<&'a Token> {
        self.tok(self.pos)
    }

    fn lower(&self, i: usize) -> String {
        self.tok(i)
            .map(|t| t.surface.to_lowercase())
            .unwrap_or_default()
    }

    fn is(&self, i: usize, word: &str) -> bool {
        self.tok(i)
            .is_some_and(|t| t.surface.eq_ignore_ascii_case(word))
    }

    fn is_ignorable(&self, i: usize) -> bool {
        self.is(i, "usu.") || self.is(i, "etc.")
    }

    fn complex_prep_at(&self, i: usize) -> Option<String> {
        let a = self.lower(i);
        let b = self.lower(i + 1);
        COMPLEX_PREPS
            .iter()
            .find(|(x, y)| *x == a && *y == b)
            .map(|(x, y)| format!("{x} {y}"))
    }

    fn is_participle(&self, i: usize) -> bool {
        self.tok(i)
            .is_some_and(|t| t.cat == Cat::Verb && t.surface.to_lowercase().ends_with("ed"))
    }

    fn add(&mut self, node: SketchNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn node(
        kind: NodeKind,
        head: usize,
        tokens: (usize, usize),
        role: Role,
        attach: Attach,
    ) -> SketchNode {
        SketchNode {
            kind,
            head,
            tokens,
            prep: None,
            rel_word: None,
            conj: None,
            optional: false,
            role,
            attach,
        }
    }

    fn root_head(&self) -> NodeId {
        self.clauses[0].head
    }

    fn innermost(&mut self) -> &mut Clause {
        self.clauses.last_mut().expect("root clause")
    }

    fn nearest_np(&self) -> NodeId {
        let c = self.clauses.last().expect("root clause");
        c.frontier
            .iter()
            .rev()
            .copied()
            .find(|&n| self.nodes[n].kind == NodeKind::Np)
            .unwrap_or(c.head)
    }

    fn is_transparent_genus(&self, id: NodeId) -> bool {
        id == self.root_head()
            && self.nodes[id].kind == NodeKind::Np
            && self
                .tok(self.nodes[id].head)
                .is_some_and(|t| self.opts.transparent_heads.contains(&t.lemma))
    }

    // ---- top level ----

    fn noun_definition(&mut self) -> Option<NodeId> {
        self.skip_ignorable();
        let genus = self.np(Role::Root, Attach::Root)?;
        self.clauses.push(Clause {
            kind: ClauseKind::Root,
            head: genus,
            frontier: vec![genus],
            constituents: 0,
            attached_to: None,
        });
        self.coordination(genus);
        self.postmodifiers()?;
        Some(genus)
    }

    fn verb_definition(&mut self) -> Option<NodeId> {
        if !self.is(0, "to") || self.tok(1).map(|t| t.cat) != Some(Cat::Verb) {
            return None;
        }
        let vp = self.add(Self::node(
            NodeKind::Vp,
            1,
            (0, 2),
            Role::Root,
            Attach::Root,
        ));
        self.pos = 2;
        self.clauses.push(Clause {
            kind: ClauseKind::Root,
            head: vp,
            frontier: vec![vp],
            constituents: 0,
            attached_to: None,
        });
        self.object(vp)?;
        self.postmodifiers()?;
        Some(vp)
    }

    fn skip_ignorable(&mut self) {
        while self.is_ignorable(self.pos) {
            self.pos += 1;
        }
    }

    /// Optional object of a verbal node, plain or parenthesized.
    fn object(&mut self, verb: NodeId) -> Option<()> {
        self.skip_ignorable();
        if self.is(self.pos, "(") {
            let save = (self.pos, self.nodes.len(), self.sites.len());
            self.pos += 1;
            if let Some(np) = self.np(Role::Complement, Attach::Fixed(verb)) {
                if self.is(self.pos, ")") {
                    self.pos += 1;
                    self.nodes[np].optional = true;
                    let c = self.innermost();
                    c.frontier.push(np);
                    c.constituents += 1;
                    return Some(());
                }
            }
            self.rollback(save);
            return Some(());
        }
        if self.np_start(self.pos) {
            self.np_group(Role::Complement, Attach::Fixed(verb))?;
            self.innermost().constituents += 1;
        }
        Some(())
    }

    fn rollback(&mut self, (pos, nodes, sites): (usize, usize, usize)) {
        self.pos = pos;
        self.nodes.truncate(nodes);
        self.sites.truncate(sites);
        for c in &mut self.clauses {
            c.frontier.retain(|&n| n < nodes);
        }
    }

    fn postmodifiers(&mut self) -> Option<()> {
        while let Some(t) = self.cur() {
            let lower = t.surface.to_lowercase();
            if lower == "," {
                self.pos += 1;
                self.after_comma()?;
            } else if self.is_ignorable(self.pos) || (t.cat == Cat::Other && lower != "...") {
                self.pos += 1;
            } else if lower == ")" {
                return None;
            } else if lower == "(" {
                self.parenthetical()?;
            } else if self.complex_prep_at(self.pos).is_some() || t.cat == Cat::Prep {
                self.pp(None);
            } else if lower == "used" && self.is(self.pos + 1, "for") {
                let head = self.clauses.last().expect("root clause").head;
                self.formula_pp(head);
            } else if t.cat == Cat::RelPron {
                let at = self.nearest_np();
                self.relative_clause(at);
            } else if t.cat == Cat::Gerund {
                let at = self.nearest_np();
                self.participle_clause(at);
            } else {
                self.tail_to_end();
            }
        }
        Some(())
    }

    /// A comma closes all open clauses; the next constituent attaches to the
    /// definition head.
    fn after_comma(&mut self) -> Option<()> {
        self.clauses.truncate(1);
        let head = self.root_head();
        let root = &mut self.clauses[0];
        root.frontier = vec![head];
        let Some(t) = self.cur() else { return Some(()) };
        let lower = t.surface.to_lowercase();
        if lower == "," {
            return Some(());
        }
        if self.complex_prep_at(self.pos).is_some() || t.cat == Cat::Prep {
            self.pp(Some(head));
        } else if lower == "used" && self.is(self.pos + 1, "for") {
            self.formula_pp(head);
        } else if t.cat == Cat::RelPron {
            self.relative_clause(head);
        } else if t.cat == Cat::Gerund {
            self.participle_clause(head);
        } else if matches!(t.cat, Cat::Other | Cat::Adj) && !self.is_ignorable(self.pos) {
            self.tail_to_comma();
        } else if lower == "(" {
            self.parenthetical()?;
        } else {
            self.tail_to_end();
        }
        Some(())
    }

    fn parenthetical(&mut self) -> Option<()> {
        let (verb, empty) = {
            let c = self.clauses.last().expect("root clause");
            (c.head, c.constituents == 0)
        };
        if empty && self.nodes[verb].kind.is_verbal() {
            let before = self.pos;
            self.object(verb)?;
            if self.pos != before {
                return Some(());
            }
        }
        let start = self.pos;
        let close = (start..self.toks.len()).find(|&i| self.is(i, ")"))?;
        let head = self.root_head();
        self.add(Self::node(
            NodeKind::Tail,
            start,
            (start, close + 1),
            Role::Modifier,
            Attach::Fixed(head),
        ));
        self.pos = close + 1;
        Some(())
    }

    fn tail_to_end(&mut self) {
        let start = self.pos;
        let head = self.root_head();
        self.add(Self::node(
            NodeKind::Tail,
            start,
            (start, self.toks.len()),
            Role::Modifier,
            Attach::Fixed(head),
        ));
        self.pos = self.toks.len();
    }

    fn tail_to_comma(&mut self) {
        let start = self.pos;
        let end = (start..self.toks.len())
            .find(|&i| self.is(i, ","))
            .unwrap_or(self.toks.len());
        let head = self.root_head();
        self.add(Self::node(
            NodeKind::Tail,
            start,
            (start, end),
            Role::Modifier,
            Attach::Fixed(head),
        ));
        self.pos = end;
    }

    // ---- phrases ----

    fn np_start(&self, i: usize) -> bool {
        self.np_end(i).is_some()
    }

    /// End (exclusive, just past the head noun) of an NP starting at `i`.
    fn np_end(&self, i: usize) -> Option<usize> {
        let mut j = i;
        if self.tok(j).map(|t| t.cat) == Some(Cat::Det) {
            j += 1;
        }
        // a bare gerund opens a verb phrase, not a modified noun
        if j == i && self.tok(i).map(|t| t.cat) == Some(Cat::Gerund) {
            return None;
        }
        let mut last_noun = None;
        while let Some(t) = self.tok(j) {
            if self.complex_prep_at(j).is_some() {
                break;
            }
            let ok = match t.cat {
                Cat::Adj | Cat::Noun => true,
                Cat::Verb => self.is_participle(j) && !self.is(j + 1, "for"),
                Cat::Gerund => {
                    last_noun.is_none()
                        && self
                            .tok(j + 1)
                            .is_some_and(|n| matches!(n.cat, Cat::Adj | Cat::Noun))
                }
                _ => false,
            };
            if !ok {
                break;
            }
            if t.cat == Cat::Noun {
                last_noun = Some(j);
            }
            j += 1;
        }
        last_noun.map(|n| n + 1)
    }

    fn np(&mut self, role: Role, attach: Attach) -> Option<NodeId> {
        let start = self.pos;
        let end = self.np_end(start)?;
        self.pos = end;
        Some(self.add(Self::node(
            NodeKind::Np,
            end - 1,
            (start, end),
            role,
            attach,
        )))
    }

    /// An NP with any directly following coordination; returns the first conjunct.
    fn np_group(&mut self, role: Role, attach: Attach) -> Option<NodeId> {
        let first = self.np(role, attach)?;
        self.innermost().frontier.push(first);
        self.coordination(first);
        Some(first)
    }

    fn coordination(&mut self, first: NodeId) {
        loop {
            if self.is(self.pos, "etc.") {
                self.pos += 1;
                continue;
            }
            let is_conj = self.cur().is_some_and(|t| t.cat == Cat::Conj);
            if is_conj && self.np_start(self.pos + 1) {
                let conj = self.lower(self.pos);
                let candidates = self.coordination_candidates();
                self.pos += 1;
                let attach = if candidates.len() > 1 {
                    Attach::Site(self.sites.len())
                } else {
                    Attach::Fixed(candidates[0])
                };
                let np = self.np(Role::Conjunct, attach).expect("np_start checked");
                self.nodes[np].conj = Some(conj);
                if candidates.len() > 1 {
                    self.sites.push(AmbiguitySite {
                        id: self.sites.len(),
                        kind: SiteKind::CoordScope,
                        movable: np,
                        candidates,
                        chosen: 0,
                        settled: false,
                    });
                }
                self.innermost().frontier.push(np);
                continue;
            }
            if self.is(self.pos, ",") && self.list_continues(self.pos) {
                self.comma_list(first);
                continue;
            }
            break;
        }
    }

    /// `, NP` followed by `, etc.`, `, NP ...` or `and/or NP`.
    fn list_continues(&self, comma: usize) -> bool {
        let Some(end) = self.np_end(comma + 1) else {
            return false;
        };
        if self.is(end, ",") {
            self.is(end + 1, "etc.") || self.list_continues(end)
        } else {
            self.tok(end).is_some_and(|t| t.cat == Cat::Conj) && self.np_start(end + 1)
        }
    }

    fn comma_list(&mut self, first: NodeId) {
        let mut items = Vec::new();
        while self.is(self.pos, ",") && self.np_start(self.pos + 1) {
            self.pos += 1;
            let np = self
                .np(Role::Conjunct, Attach::Fixed(first))
                .expect("np_start checked");
            items.push(np);
        }
        let mut conj = "and".to_string();
        if self.is(self.pos, ",") && self.is(self.pos + 1, "etc.") {
            self.pos += 2;
        } else if self.cur().is_some_and(|t| t.cat == Cat::Conj) && self.np_start(self.pos + 1) {
            conj = self.lower(self.pos);
            self.pos += 1;
            let np = self
                .np(Role::Conjunct, Attach::Fixed(first))
                .expect("np_start checked");
            items.push(np);
        }
        for &np in &items {
            self.nodes[np].conj = Some(conj.clone());
        }
        if let Some(&last) = items.last() {
            self.innermost().frontier.push(last);
        }
    }

    /// Nearest NP, plus the noun modified by each participle clause crossed
    /// on the way out.
    fn coordination_candidates(&self) -> Vec<NodeId> {
        let mut out = vec![self.nearest_np()];
        for c in self.clauses.iter().rev() {
            if c.kind != ClauseKind::Participle {
                break;
            }
            if let Some(a) = c.attached_to {
                if self.nodes[a].kind == NodeKind::Np && !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    fn pp(&mut self, forced: Option<NodeId>) {
        let start = self.pos;
        let (prep, width) = match self.complex_prep_at(start) {
            Some(p) => (p, 2),
            None => (self.lower(start), 1),
        };
        let has_complement = self
            .tok(start + width)
            .is_some_and(|t| t.cat == Cat::Gerund)
            || self.np_start(start + width);
        if !has_complement {
            self.tail_to_end();
            return;
        }
        let attach = match forced {
            Some(h) => Attach::Fixed(h),
            None => self.pp_attachment(),
        };
        let pp = self.add(Self::node(
            NodeKind::Pp,
            start,
            (start, start + width),
            Role::Modifier,
            attach,
        ));
        self.nodes[pp].prep = Some(prep);
        if let Attach::Site(_) = attach {
            let candidates = self.pp_candidates();
            self.sites.push(AmbiguitySite {
                id: self.sites.len(),
                kind: SiteKind::PpAttach,
                movable: pp,
                candidates,
                chosen: 0,
                settled: false,
            });
        }
        self.innermost().constituents += 1;
        self.pos = start + width;
        self.pp_complement(pp);
    }

    fn pp_attachment(&self) -> Attach {
        let c = self.clauses.last().expect("root clause");
        if c.constituents == 0 || self.pp_candidates().is_empty() {
            Attach::Fixed(c.head)
        } else {
            Attach::Site(self.sites.len())
        }
    }

    fn pp_candidates(&self) -> Vec<NodeId> {
        let c = self.clauses.last().expect("root clause");
        c.frontier
            .iter()
            .rev()
            .copied()
            .filter(|&n| !self.is_transparent_genus(n))
            .collect()
    }

    fn pp_complement(&mut self, pp: NodeId) {
        if self.cur().is_some_and(|t| t.cat == Cat::Gerund) {
            let g = self.pos;
            let vp = self.add(Self::node(
                NodeKind::Vp,
                g,
                (g, g + 1),
                Role::Complement,
                Attach::Fixed(pp),
            ));
            self.pos += 1;
            self.clauses.push(Clause {
                kind: ClauseKind::Complement,
                head: vp,
                frontier: vec![vp],
                constituents: 0,
                attached_to: Some(pp),
            });
            if self.np_start(self.pos) {
                self.np_group(Role::Complement, Attach::Fixed(vp));
                self.innermost().constituents += 1;
            }
        } else {
            self.np_group(Role::Complement, Attach::Fixed(pp));
        }
    }

    /// `used for V-ing`: the participle is formula text, the PP is fixed.
    fn formula_pp(&mut self, head: NodeId) {
        let start = self.pos;
        let for_idx = start + 1;
        let has_complement = self.tok(for_idx + 1).is_some_and(|t| t.cat == Cat::Gerund)
            || self.np_start(for_idx + 1);
        if !has_complement {
            self.tail_to_end();
            return;
        }
        let pp = self.add(Self::node(
            NodeKind::Pp,
            for_idx,
            (start, for_idx + 1),
            Role::Modifier,
            Attach::Fixed(head),
        ));
        self.nodes[pp].prep = Some("for".to_string());
        self.innermost().constituents += 1;
        self.pos = for_idx + 1;
        self.pp_complement(pp);
    }

    fn relative_clause(&mut self, at: NodeId) {
        let start = self.pos;
        let rel = self.lower(start);
        let mut v = start + 1;
        while self.is_ignorable(v)
            || self
                .tok(v)
                .is_some_and(|t| t.cat == Cat::Other && t.surface != "...")
        {
            v += 1;
        }
        if self.tok(v).map(|t| t.cat) != Some(Cat::Verb) {
            self.tail_to_end();
            return;
        }
        self.innermost().constituents += 1;
        let rc = self.add(Self::node(
            NodeKind::RelClause,
            v,
            (start, v + 1),
            Role::Modifier,
            Attach::Fixed(at),
        ));
        self.nodes[rc].rel_word = Some(rel);
        self.pos = v + 1;
        self.clauses.push(Clause {
            kind: ClauseKind::Relative,
            head: rc,
            frontier: vec![rc],
            constituents: 0,
            attached_to: Some(at),
        });
        if self.np_start(self.pos) {
            self.np_group(Role::Complement, Attach::Fixed(rc));
            self.innermost().constituents += 1;
        }
    }

    fn participle_clause(&mut self, at: NodeId) {
        let g = self.pos;
        self.innermost().constituents += 1;
        let pc = self.add(Self::node(
            NodeKind::PartClause,
            g,
            (g, g + 1),
            Role::Modifier,
            Attach::Fixed(at),
        ));
        self.pos = g + 1;
        self.clauses.push(Clause {
            kind: ClauseKind::Participle,
            head: pc,
            frontier: vec![pc],
            constituents: 0,
            attached_to: Some(at),
        });
        if self.complex_prep_at(self.pos).is_none() && self.np_start(self.pos) {
            self.np_group(Role::Complement, Attach::Fixed(pc));
            self.innermost().constituents += 1;
        }
    }
}
