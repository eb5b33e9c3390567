#![allow(dead_code)]

pub mod oracle;
pub mod props;

use std::fs;
use std::path::PathBuf;

use lexboot::corpus::{load_corpus_str, Corpus};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn sample_corpus() -> Corpus {
    load_corpus_str(&fixture("sample.tsv")).unwrap()
}

pub fn chain_corpus() -> Corpus {
    load_corpus_str(&fixture("chain.tsv")).unwrap()
}
