//! Dictionary input: a strict five-field TSV of word senses.
//!
//! Each record is `headword<TAB>pos<TAB>sense_label<TAB>source<TAB>definition`.
//! Lines starting with `#` are comments and blank lines are skipped.
//!
//! Loading normalizes headwords to lowercase and trims trailing whitespace from
//! every line. [`Corpus::to_tsv`] writes the canonical form back, so a file that
//! is already canonical (lowercase headwords, no comments, no blank lines, no
//! trailing whitespace, `\n` line endings) round-trips byte for byte.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 5 tab-separated fields, found {found}")]
    MalformedLine { line: usize, found: usize },
    #[error("line {line}: unknown part-of-speech code {code:?}")]
    BadPos { line: usize, code: String },
    #[error("line {line}: empty {field}")]
    EmptyField { line: usize, field: &'static str },
    #[error("duplicate sense {0}")]
    DuplicateSense(SenseId),
    #[error("read error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
}

impl Pos {
    /// Maps a dictionary pos code (`n`, `v`, `vi`, `vt`) to a coarse POS.
    pub fn from_code(code: &str) -> Option<Pos> {
        match code {
            "n" => Some(Pos::Noun),
            "v" | "vi" | "vt" => Some(Pos::Verb),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Pos::Noun => "n",
            Pos::Verb => "v",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Identity of one dictionary sense, e.g. `flower (L 1,n,1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseId {
    pub headword: String,
    pub pos: Pos,
    pub sense_label: String,
    pub source: String,
}

impl SenseId {
    pub fn new(headword: &str, pos: Pos, sense_label: &str, source: &str) -> Self {
        SenseId {
            headword: headword.trim().to_lowercase(),
            pos,
            sense_label: sense_label.to_string(),
            source: source.to_string(),
        }
    }

    /// The `source sense_label` form used in dumps and reports, e.g. `L 1,n,1`.
    pub fn citation(&self) -> String {
        format!("{} {}", self.source, self.sense_label)
    }

    /// Inverse of [`SenseId::citation`].
    pub fn from_parts(headword: &str, pos: Pos, citation: &str) -> Option<Self> {
        let (source, label) = citation.split_once(' ')?;
        if source.is_empty() || label.is_empty() {
            return None;
        }
        Some(SenseId::new(headword, pos, label, source))
    }
}

impl fmt::Display for SenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} {})",
            self.headword, self.source, self.sense_label
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DictEntry {
    pub id: SenseId,
    /// The pos code as written in the file (`n`, `v`, `vi`, `vt`).
    pub pos_code: String,
    pub definition: String,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    entries: Vec<DictEntry>,
    index: BTreeMap<String, Vec<usize>>,
}

impl Corpus {
    pub fn from_entries(entries: Vec<DictEntry>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, entry) in entries.iter().enumerate() {
            if !seen.insert(entry.id.clone()) {
                return Err(CorpusError::DuplicateSense(entry.id.clone()));
            }
            index.entry(entry.id.headword.clone()).or_default().push(i);
        }
        Ok(Corpus { entries, index })
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All senses of `lemma`, in file order.
    pub fn lookup(&self, lemma: &str) -> Vec<&DictEntry> {
        self.index
            .get(lemma)
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn get(&self, id: &SenseId) -> Option<&DictEntry> {
        self.lookup(&id.headword).into_iter().find(|e| &e.id == id)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.id.headword, e.pos_code, e.id.sense_label, e.id.source, e.definition
            ));
        }
        out
    }
}

/// Parses a dictionary file.
pub fn load_corpus<R: BufRead>(input: R) -> Result<Corpus, CorpusError> {
    let mut entries = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(CorpusError::MalformedLine {
                line: lineno,
                found: fields.len(),
            });
        }
        let headword = fields[0].trim().to_lowercase();
        if headword.is_empty() {
            return Err(CorpusError::EmptyField {
                line: lineno,
                field: "headword",
            });
        }
        let pos = Pos::from_code(fields[1]).ok_or_else(|| CorpusError::BadPos {
            line: lineno,
            code: fields[1].to_string(),
        })?;
        for (field, name) in [(fields[2], "sense label"), (fields[3], "source")] {
            if field.trim().is_empty() {
                return Err(CorpusError::EmptyField {
                    line: lineno,
                    field: name,
                });
            }
        }
        if fields[4].trim().is_empty() {
            return Err(CorpusError::EmptyField {
                line: lineno,
                field: "definition",
            });
        }
        entries.push(DictEntry {
            id: SenseId::new(&headword, pos, fields[2], fields[3]),
            pos_code: fields[1].to_string(),
            definition: fields[4].to_string(),
        });
    }
    Corpus::from_entries(entries)
}

pub fn load_corpus_str(text: &str) -> Result<Corpus, CorpusError> {
    load_corpus(text.as_bytes())
}
