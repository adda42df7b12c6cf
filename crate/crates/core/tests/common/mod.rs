#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use std::path::PathBuf;

use conceptir_core::engine::{bundled_hierarchy, Resources};
use conceptir_core::lexdb::{DomainDb, LexicalDb};
use conceptir_core::textprep::Stopwords;

pub const BUNDLED_HIERARCHY: &str = include_str!("../../data/domain_hierarchy.tsv");

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bankworld")
}

pub fn tiny_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny")
}

pub fn lexdb() -> LexicalDb {
    LexicalDb::load_dir(&fixture_dir()).expect("fixture lexicon loads")
}

pub fn domains() -> DomainDb {
    let mut d = bundled_hierarchy();
    let path = fixture_dir().join("domains.map");
    let text = std::fs::read_to_string(&path).unwrap();
    d.add_mapping_str(&text, "domains.map", &Default::default()).unwrap();
    d
}

pub fn resources() -> Resources {
    Resources::new(lexdb(), domains(), Stopwords::builtin())
}
