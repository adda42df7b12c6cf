use std::path::{Path, PathBuf};

use crate::evalkit::DEFAULT_CUTOFFS;
use crate::weighting::{SimMode, TfMode, WeightingConfig};

use super::{CorpusFormat, EngineError, Representation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaggerChoice {
    Builtin,
    /// Reads `<dir>/<doc_id>.tags` for every document and query.
    External(PathBuf),
}

/// Settings read from a `key = value` file. Relative paths are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub wordnet_dir: Option<PathBuf>,
    pub domains_map: Option<PathBuf>,
    /// `None` selects the bundled hierarchy.
    pub domains_hierarchy: Option<PathBuf>,
    pub domains_translation: Option<PathBuf>,
    /// `None` selects the bundled stopword list.
    pub stopwords: Option<PathBuf>,
    pub tagger: TaggerChoice,
    pub corpus: Option<PathBuf>,
    pub corpus_format: CorpusFormat,
    pub index_out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub representation: Representation,
    pub weighting: WeightingConfig,
    pub cutoffs: Vec<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            wordnet_dir: None,
            domains_map: None,
            domains_hierarchy: None,
            domains_translation: None,
            stopwords: None,
            tagger: TaggerChoice::Builtin,
            corpus: None,
            corpus_format: CorpusFormat::DirOfText,
            index_out: None,
            cache_dir: None,
            representation: Representation::Semantic,
            weighting: WeightingConfig::default(),
            cutoffs: DEFAULT_CUTOFFS.to_vec(),
        }
    }
}

impl EngineConfig {
    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let text = super::corpus::read(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, EngineError> {
        let mut cfg = EngineConfig::default();
        let mut tags_dir: Option<PathBuf> = None;
        let mut external = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| EngineError::Config(format!("line {}: expected key = value", i + 1)))?;
            let bad = || EngineError::Config(format!("line {}: invalid value `{value}` for {key}", i + 1));
            let path = || Some(base.join(value));
            let w = &mut cfg.weighting;
            match key {
                "wordnet_dir" => cfg.wordnet_dir = path(),
                "domains_map" => cfg.domains_map = path(),
                "domains_hierarchy" => cfg.domains_hierarchy = path(),
                "domains_translation" => cfg.domains_translation = path(),
                "stopword_path" | "stopwords" => cfg.stopwords = path(),
                "tagger" => {
                    external = match value {
                        "builtin" => false,
                        "external" => true,
                        _ => return Err(bad()),
                    }
                }
                "external_tags_dir" => tags_dir = path(),
                "corpus" => cfg.corpus = path(),
                "corpus_format" => cfg.corpus_format = value.parse().map_err(|_| bad())?,
                "index_out" | "index" => cfg.index_out = path(),
                "cache_dir" => cfg.cache_dir = path(),
                "representation" => cfg.representation = value.parse().map_err(|_| bad())?,
                "scheme" => w.scheme = value.parse().map_err(|_| bad())?,
                "alpha" => w.alpha = value.parse().map_err(|_| bad())?,
                "threshold" | "centrality_threshold" => w.threshold = value.parse().map_err(|_| bad())?,
                "bm25_k1" => w.bm25_k1 = value.parse().map_err(|_| bad())?,
                "bm25_b" => w.bm25_b = value.parse().map_err(|_| bad())?,
                "tf_mode" => {
                    w.tf_mode = match value {
                        "normalized" | "max" => TfMode::MaxNormalized,
                        "raw" => TfMode::Raw,
                        _ => return Err(bad()),
                    }
                }
                "sim_mode" => {
                    w.sim_mode = match value {
                        "mean" | "normalized" => SimMode::Mean,
                        "raw" => SimMode::RawSum,
                        _ => return Err(bad()),
                    }
                }
                "cutoffs" => {
                    cfg.cutoffs = value
                        .split(',')
                        .map(|c| c.trim().parse::<usize>().ok().filter(|x| *x >= 1))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(bad)?
                }
                _ => return Err(EngineError::Config(format!("line {}: unknown key `{key}`", i + 1))),
            }
        }
        if external {
            let dir =
                tags_dir.ok_or_else(|| EngineError::Config("tagger = external needs external_tags_dir".into()))?;
            cfg.tagger = TaggerChoice::External(dir);
        }
        cfg.weighting.validate()?;
        Ok(cfg)
    }

    /// Every configured path that does not exist.
    pub fn missing_paths(&self) -> Vec<PathBuf> {
        let mut all: Vec<&PathBuf> = [
            &self.wordnet_dir,
            &self.domains_map,
            &self.domains_hierarchy,
            &self.domains_translation,
            &self.stopwords,
            &self.corpus,
        ]
        .into_iter()
        .flatten()
        .collect();
        if let TaggerChoice::External(dir) = &self.tagger {
            all.push(dir);
        }
        all.into_iter().filter(|p| !p.exists()).cloned().collect()
    }
}
