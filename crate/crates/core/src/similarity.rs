//! Relatedness measures: Wu-Palmer over the domain hierarchy and
//! information-content (Resnik) relatedness over WordNet synsets.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use crate::lexdb::{DomainDb, LexError, LexicalDb, PartOfSpeech, SynsetId, FACTOTUM};

#[derive(Debug, thiserror::Error)]
pub enum SimilarityError {
    #[error("factotum domain `{0}` cannot be compared")]
    FactotumNotComparable(String),
    #[error("unknown domain label `{0}`")]
    UnknownDomainLabel(String),
    #[error(transparent)]
    Lex(#[from] LexError),
}

/// `2·depth(lcs) / (depth(a) + depth(b))` over the `top_level` tree.
pub fn wup_domain(a: &str, b: &str, db: &DomainDb) -> Result<f64, SimilarityError> {
    let depth_a = domain_depth(a, db)?;
    let depth_b = domain_depth(b, db)?;
    if a == b {
        return Ok(1.0);
    }
    // Both labels are in the tree, so they share at least top_level.
    let lcs = db.least_common_subsumer(a, b).expect("tree domains share top_level");
    let depth_lcs = db.depth(lcs).expect("tree domain has a depth");
    Ok(2.0 * f64::from(depth_lcs) / f64::from(depth_a + depth_b))
}

fn domain_depth(name: &str, db: &DomainDb) -> Result<u32, SimilarityError> {
    let node = db
        .node(name)
        .ok_or_else(|| SimilarityError::UnknownDomainLabel(name.to_string()))?;
    match node.depth {
        Some(d) if !node.is_factotum => Ok(d),
        _ => Err(SimilarityError::FactotumNotComparable(node.name.clone())),
    }
}

/// True when a label can take part in Wu-Palmer scoring.
pub fn is_scorable_domain(name: &str, db: &DomainDb) -> bool {
    name != FACTOTUM && db.is_comparable(name)
}

/// `-ln P(S)` for every noun and verb synset, with add-one smoothed counts
/// propagated to every distinct ancestor.
#[derive(Debug, Clone)]
pub struct InformationContent {
    ic: HashMap<SynsetId, f64>,
    ic_max: f64,
}

impl InformationContent {
    pub fn build(db: &LexicalDb) -> Self {
        let mut counts: HashMap<SynsetId, f64> = HashMap::new();
        let mut totals: BTreeMap<PartOfSpeech, f64> = BTreeMap::new();
        for synset in db.synsets() {
            let pos = synset.id.pos;
            if !pos.has_hierarchy() {
                continue;
            }
            let own = f64::from(synset.tagged_count) + 1.0;
            *totals.entry(pos).or_default() += own;
            let ancestors = db.ancestors(synset.id).expect("synset comes from db");
            for a in ancestors {
                *counts.entry(*a).or_default() += own;
            }
        }
        let mut ic = HashMap::with_capacity(counts.len());
        let mut ic_max: f64 = 0.0;
        for (id, count) in counts {
            let value = (-(count / totals[&id.pos]).ln()).max(0.0);
            ic_max = ic_max.max(value);
            ic.insert(id, value);
        }
        InformationContent { ic, ic_max }
    }

    /// `None` for adjectives, adverbs and unknown ids.
    pub fn ic(&self, id: SynsetId) -> Option<f64> {
        self.ic.get(&id).copied()
    }

    pub fn ic_max(&self) -> f64 {
        self.ic_max
    }

    pub fn len(&self) -> usize {
        self.ic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ic.is_empty()
    }

    /// IC of the least common subsumer; 0 across parts of speech, for
    /// hierarchy-less parts of speech and when no subsumer exists.
    pub fn resnik(&self, a: SynsetId, b: SynsetId, db: &LexicalDb) -> Result<f64, SimilarityError> {
        match db.least_common_subsumer(a, b)? {
            Some(lcs) => Ok(self.ic(lcs).unwrap_or(0.0)),
            None => Ok(0.0),
        }
    }

    /// Resnik scaled into [0, 1] by the largest IC in the table.
    pub fn resnik_norm(&self, a: SynsetId, b: SynsetId, db: &LexicalDb) -> Result<f64, SimilarityError> {
        let raw = self.resnik(a, b, db)?;
        if self.ic_max > 0.0 {
            Ok((raw / self.ic_max).min(1.0))
        } else {
            Ok(0.0)
        }
    }

    /// Writes `offset-pos<TAB>ic` lines in id order.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let ordered: BTreeMap<_, _> = self.ic.iter().collect();
        for (id, value) in ordered {
            writeln!(out, "{id}\t{value}")?;
        }
        Ok(())
    }
}
