//! cc-idc concept weighting and the tf·idf / BM25 keyword baselines.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::lexdb::{LexicalDb, SynsetId};
use crate::similarity::InformationContent;
use crate::wsd::Disambiguation;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WeightError {
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("centrality threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),
    #[error("invalid value `{value}` for {key}")]
    InvalidValue { key: &'static str, value: String },
}

/// Concepts sort before orphan keywords.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexUnit {
    Concept(SynsetId),
    Orphan(String),
}

impl fmt::Display for IndexUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexUnit::Concept(id) => write!(f, "{id}"),
            IndexUnit::Orphan(word) => write!(f, "#{word}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    CcIdc,
    TfIdf,
    Bm25,
}

impl FromStr for Scheme {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cc-idc" | "ccidc" => Ok(Scheme::CcIdc),
            "tf-idf" | "tfidf" => Ok(Scheme::TfIdf),
            "bm25" | "okapi-bm25" => Ok(Scheme::Bm25),
            _ => Err(WeightError::InvalidValue {
                key: "scheme",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::CcIdc => "cc-idc",
            Scheme::TfIdf => "tf-idf",
            Scheme::Bm25 => "bm25",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    Absolute(f64),
    /// Mean of every cc value in the collection.
    CollectionMean,
}

impl FromStr for ThresholdMode {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mean") {
            return Ok(ThresholdMode::CollectionMean);
        }
        s.parse()
            .map(ThresholdMode::Absolute)
            .map_err(|_| WeightError::InvalidValue {
                key: "threshold",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdMode::Absolute(s) => write!(f, "{s}"),
            ThresholdMode::CollectionMean => f.write_str("mean"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfMode {
    /// Divided by the largest count in the document.
    MaxNormalized,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Normalized Resnik averaged over the other concepts.
    Mean,
    /// Plain sum of raw Resnik values.
    RawSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingConfig {
    pub alpha: f64,
    pub threshold: ThresholdMode,
    pub scheme: Scheme,
    pub bm25_k1: f64,
    pub bm25_b: f64,
    pub tf_mode: TfMode,
    pub sim_mode: SimMode,
}

impl Default for WeightingConfig {
    fn default() -> Self {
        WeightingConfig {
            alpha: 0.2,
            threshold: ThresholdMode::CollectionMean,
            scheme: Scheme::CcIdc,
            bm25_k1: 1.2,
            bm25_b: 0.75,
            tf_mode: TfMode::MaxNormalized,
            sim_mode: SimMode::Mean,
        }
    }
}

impl WeightingConfig {
    pub fn validate(&self) -> Result<(), WeightError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(WeightError::AlphaOutOfRange(self.alpha));
        }
        if let ThresholdMode::Absolute(s) = self.threshold {
            if s.is_nan() || s < 0.0 {
                return Err(WeightError::NegativeThreshold(s));
            }
        }
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Per-unit quantities that do not depend on the weighting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitStats {
    pub unit: IndexUnit,
    pub tf_raw: u32,
    /// Σ resnik_norm to the other distinct concepts of the document.
    pub sim_norm_sum: f64,
    /// Σ resnik to the other distinct concepts of the document.
    pub sim_raw_sum: f64,
    pub n_other: u32,
}

impl UnitStats {
    pub fn orphan(word: impl Into<String>, tf_raw: u32) -> Self {
        UnitStats {
            unit: IndexUnit::Orphan(word.into()),
            tf_raw,
            sim_norm_sum: 0.0,
            sim_raw_sum: 0.0,
            n_other: 0,
        }
    }

    pub fn is_orphan(&self) -> bool {
        matches!(self.unit, IndexUnit::Orphan(_))
    }
}

/// The disambiguated content of one document (or query), sorted by unit.
#[derive(Debug, Clone, PartialEq)]
pub struct DocAnalysis {
    pub doc_id: String,
    pub units: Vec<UnitStats>,
}

impl DocAnalysis {
    /// Folds annotations onto their synsets and measures each concept's
    /// relatedness to the others.
    pub fn from_disambiguation(
        doc_id: impl Into<String>,
        d: &Disambiguation,
        db: &LexicalDb,
        ic: &InformationContent,
    ) -> Self {
        let mut concepts: BTreeMap<SynsetId, u32> = BTreeMap::new();
        for a in &d.annotations {
            *concepts.entry(a.synset).or_default() += a.term.count() as u32;
        }
        let mut orphans: BTreeMap<&str, u32> = BTreeMap::new();
        for o in &d.orphans {
            *orphans.entry(o.lemma.as_str()).or_default() += o.count() as u32;
        }
        let ids: Vec<SynsetId> = concepts.keys().copied().collect();
        let mut units = Vec::with_capacity(ids.len() + orphans.len());
        for (&id, &tf_raw) in &concepts {
            let mut norm = 0.0;
            let mut raw = 0.0;
            for &other in ids.iter().filter(|o| **o != id) {
                raw += ic.resnik(id, other, db).unwrap_or(0.0);
                norm += ic.resnik_norm(id, other, db).unwrap_or(0.0);
            }
            units.push(UnitStats {
                unit: IndexUnit::Concept(id),
                tf_raw,
                sim_norm_sum: norm,
                sim_raw_sum: raw,
                n_other: (ids.len() - 1) as u32,
            });
        }
        for (word, tf_raw) in orphans {
            units.push(UnitStats::orphan(word, tf_raw));
        }
        DocAnalysis {
            doc_id: doc_id.into(),
            units,
        }
    }

    /// Keyword-only analysis from a bag of words.
    pub fn from_keywords<'a>(doc_id: impl Into<String>, words: impl IntoIterator<Item = &'a str>) -> Self {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for w in words {
            *counts.entry(w).or_default() += 1;
        }
        DocAnalysis {
            doc_id: doc_id.into(),
            units: counts.into_iter().map(|(w, n)| UnitStats::orphan(w, n)).collect(),
        }
    }

    pub fn max_tf(&self) -> u32 {
        self.units.iter().map(|u| u.tf_raw).max().unwrap_or(0)
    }

    pub fn doclen(&self) -> f64 {
        self.units.iter().map(|u| f64::from(u.tf_raw)).sum()
    }
}

/// tf of a unit, normalized by the document's largest count unless raw
/// counts are configured.
pub fn concept_tf(u: &UnitStats, doc: &DocAnalysis, cfg: &WeightingConfig) -> f64 {
    match cfg.tf_mode {
        TfMode::Raw => f64::from(u.tf_raw),
        TfMode::MaxNormalized => {
            let max = doc.max_tf();
            if max == 0 {
                0.0
            } else {
                f64::from(u.tf_raw) / f64::from(max)
            }
        }
    }
}

/// cc = α·tf + (1−α)·sim; orphans keep only the tf part.
pub fn local_centrality(u: &UnitStats, doc: &DocAnalysis, cfg: &WeightingConfig) -> f64 {
    let tf = concept_tf(u, doc, cfg);
    if u.is_orphan() {
        return cfg.alpha * tf;
    }
    let sim = match cfg.sim_mode {
        SimMode::Mean => u.sim_norm_sum / f64::from(u.n_other.max(1)),
        SimMode::RawSum => u.sim_raw_sum,
    };
    cfg.alpha * tf + (1.0 - cfg.alpha) * sim
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionStats {
    pub n_docs: u32,
    pub df: BTreeMap<IndexUnit, u32>,
    /// Documents in which the unit is central.
    pub n_central: BTreeMap<IndexUnit, u32>,
    pub doclen: BTreeMap<String, f64>,
    pub avg_doclen: f64,
    pub mean_cc: f64,
    /// Resolved value of s.
    pub threshold: f64,
}

impl CollectionStats {
    /// Second pass over the analysed collection: fixes s, then counts
    /// document frequencies and centralities.
    pub fn compute(docs: &[DocAnalysis], cfg: &WeightingConfig) -> Self {
        let mut df: BTreeMap<IndexUnit, u32> = BTreeMap::new();
        let mut doclen = BTreeMap::new();
        let mut cc_sum = 0.0;
        let mut cc_count = 0u64;
        let mut ccs: Vec<Vec<f64>> = Vec::with_capacity(docs.len());
        for doc in docs {
            let row: Vec<f64> = doc.units.iter().map(|u| local_centrality(u, doc, cfg)).collect();
            for (u, cc) in doc.units.iter().zip(&row) {
                *df.entry(u.unit.clone()).or_default() += 1;
                cc_sum += cc;
                cc_count += 1;
            }
            ccs.push(row);
            doclen.insert(doc.doc_id.clone(), doc.doclen());
        }
        let mean_cc = if cc_count == 0 { 0.0 } else { cc_sum / cc_count as f64 };
        let threshold = match cfg.threshold {
            ThresholdMode::Absolute(s) => s,
            ThresholdMode::CollectionMean => mean_cc,
        };
        let mut n_central: BTreeMap<IndexUnit, u32> = BTreeMap::new();
        for (doc, row) in docs.iter().zip(&ccs) {
            for (u, cc) in doc.units.iter().zip(row) {
                if *cc > threshold {
                    *n_central.entry(u.unit.clone()).or_default() += 1;
                }
            }
        }
        let avg_doclen = if docs.is_empty() {
            0.0
        } else {
            doclen.values().sum::<f64>() / docs.len() as f64
        };
        CollectionStats {
            n_docs: docs.len() as u32,
            df,
            n_central,
            doclen,
            avg_doclen,
            mean_cc,
            threshold,
        }
    }

    pub fn df(&self, unit: &IndexUnit) -> u32 {
        self.df.get(unit).copied().unwrap_or(0)
    }

    pub fn central_count(&self, unit: &IndexUnit) -> u32 {
        self.n_central.get(unit).copied().unwrap_or(0)
    }

    pub fn is_central(&self, cc: f64) -> bool {
        cc > self.threshold
    }

    /// n/N with n clamped to at least 1.
    pub fn document_centrality(&self, unit: &IndexUnit) -> f64 {
        f64::from(self.central_count(unit).max(1)) / f64::from(self.n_docs.max(1))
    }

    /// N/n with n clamped to at least 1.
    pub fn idc(&self, unit: &IndexUnit) -> f64 {
        f64::from(self.n_docs) / f64::from(self.central_count(unit).max(1))
    }
}

/// tf·idf or BM25 weight of a unit with the given raw count; 0 for units
/// unseen in the collection.
pub fn baseline_weight(tf_raw: f64, df: u32, doclen: f64, stats: &CollectionStats, cfg: &WeightingConfig) -> f64 {
    if df == 0 || tf_raw <= 0.0 {
        return 0.0;
    }
    let n = f64::from(stats.n_docs);
    let df = f64::from(df);
    match cfg.scheme {
        Scheme::TfIdf | Scheme::CcIdc => tf_raw * (n / df).ln(),
        Scheme::Bm25 => {
            let idf = ((n - df + 0.5) / (df + 0.5)).ln();
            let norm = if stats.avg_doclen > 0.0 {
                doclen / stats.avg_doclen
            } else {
                1.0
            };
            let k1 = cfg.bm25_k1;
            let part = tf_raw * (k1 + 1.0) / (tf_raw + k1 * (1.0 - cfg.bm25_b + cfg.bm25_b * norm));
            (idf * part).max(0.0)
        }
    }
}

/// Diagnostic row for one unit of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitWeight {
    pub unit: IndexUnit,
    pub tf: f64,
    pub cc: f64,
    pub n: u32,
    pub idc: f64,
    pub weight: f64,
}

/// Every unit of `doc` with its weight under the configured scheme.
pub fn unit_weights(doc: &DocAnalysis, stats: &CollectionStats, cfg: &WeightingConfig) -> Vec<UnitWeight> {
    let doclen = doc.doclen();
    doc.units
        .iter()
        .map(|u| {
            let cc = local_centrality(u, doc, cfg);
            let idc = stats.idc(&u.unit);
            let weight = match cfg.scheme {
                Scheme::CcIdc => cc * idc,
                _ => baseline_weight(f64::from(u.tf_raw), stats.df(&u.unit), doclen, stats, cfg),
            };
            UnitWeight {
                unit: u.unit.clone(),
                tf: concept_tf(u, doc, cfg),
                cc,
                n: stats.central_count(&u.unit),
                idc,
                weight,
            }
        })
        .collect()
}

/// The positive weights of `doc`, in unit order.
pub fn weigh(doc: &DocAnalysis, stats: &CollectionStats, cfg: &WeightingConfig) -> Vec<(IndexUnit, f64)> {
    unit_weights(doc, stats, cfg)
        .into_iter()
        .filter(|w| w.weight > 0.0)
        .map(|w| (w.unit, w.weight))
        .collect()
}
