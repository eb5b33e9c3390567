//! Multi-pass acquisition of semantic relations from dictionary definitions.
//!
//! Each pass parses every definition into a [`Sketch`], applies the
//! defining-formula patterns, and merges the resulting triples into a new
//! [`LkbSnapshot`]. Ambiguous attachments are left at their closest-head
//! default until an earlier pass has stored the evidence needed to move them.

pub mod bootstrap;
pub mod corpus;
pub mod lkb;
pub mod patterns;
pub mod sketch;
pub mod textproc;

pub use bootstrap::{
    analyze_entry, explain, resolve_coordination, run_pass, run_passes, run_until_converged,
    BootstrapError, EntryAnalysis, PassReport, RunConfig, RunOutcome,
};
pub use corpus::{load_corpus, load_corpus_str, Corpus, CorpusError, DictEntry, Pos, SenseId};
pub use lkb::{similarity, similarity_weighted, LkbError, LkbSnapshot};
pub use patterns::{
    run_patterns, PatternLists, PatternName, Reattachment, RelationLabel, RelationTriple,
    UnresolvedSite,
};
pub use sketch::{enumerate_attachments, parse_definition, Sketch};
pub use textproc::{lemmatize, tokenize, Cat, Token};
