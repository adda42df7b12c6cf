//! End-to-end indexing: text to disambiguated analyses, collection
//! statistics, weighted vectors, postings, persistence and cosine search.

mod config;
mod corpus;
mod persist;
mod sweep;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::conceptid::{contexts, identify_terms, CollocationLexicon, IdentifiedTerms};
use crate::evalkit::EvalError;
use crate::lexdb::{hex, DomainDb, DomainError, LexError, LexicalDb, PartOfSpeech, WordNetFiles};
use crate::similarity::InformationContent;
use crate::textprep::{
    tag_document, tokenize, ExternalTagger, FrequencyTagger, PosTagger, Stopwords, TaggedToken, TextError,
};
use crate::weighting::{
    unit_weights, weigh, CollectionStats, DocAnalysis, IndexUnit, UnitWeight, WeightError, WeightingConfig,
};
use crate::wsd::{disambiguate, Disambiguation, StandardRelatedness};

pub use config::{EngineConfig, TaggerChoice};
pub use corpus::{canonical_id, ingest_corpus, parse_time_queries, CorpusFormat, Document};
pub use persist::{read_analyses, write_analyses, FORMAT_VERSION};
pub use sweep::{run_queries, sweep_alpha, QuerySet, SweepMatrix};

const INDEX_MAGIC: &[u8; 4] = b"CIDX";
const BUNDLED_HIERARCHY: &str = include_str!("../../data/domain_hierarchy.tsv");

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("malformed record at line {line} of {file}")]
    MalformedRecord { file: String, line: usize },
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("index format version {found} cannot be read (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt index data at byte {0}")]
    CorruptIndex(usize),
    #[error("query has no indexable terms")]
    EmptyQueryVector,
    #[error("configuration: {0}")]
    Config(String),
}

/// Concepts (disambiguated synsets plus orphans) or plain lemmatized keywords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Semantic,
    Classic,
}

impl FromStr for Representation {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "semantic" | "sem" | "concept" | "concepts" => Ok(Representation::Semantic),
            "classic" | "keyword" | "keywords" => Ok(Representation::Classic),
            _ => Err(EngineError::Config(format!("unknown representation `{s}`"))),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Semantic => "semantic",
            Representation::Classic => "classic",
        })
    }
}

/// Every intermediate product of processing one text.
#[derive(Debug, Clone)]
pub struct DocReport {
    pub tokens: Vec<TaggedToken>,
    pub terms: IdentifiedTerms,
    pub disambiguation: Disambiguation,
}

/// The loaded lexical stores and text-processing settings.
pub struct Resources {
    pub db: LexicalDb,
    pub domains: DomainDb,
    pub ic: InformationContent,
    pub stopwords: Stopwords,
    pub lexicon: CollocationLexicon,
    pub tagger: TaggerChoice,
}

impl Resources {
    pub fn new(db: LexicalDb, domains: DomainDb, stopwords: Stopwords) -> Self {
        let ic = InformationContent::build(&db);
        let lexicon = CollocationLexicon::build(&db);
        Resources {
            db,
            domains,
            ic,
            stopwords,
            lexicon,
            tagger: TaggerChoice::Builtin,
        }
    }

    pub fn from_config(cfg: &EngineConfig) -> Result<Self, EngineError> {
        let wn = cfg
            .wordnet_dir
            .as_ref()
            .ok_or_else(|| EngineError::Config("wordnet_dir is not set".into()))?;
        let db = LexicalDb::load(&WordNetFiles::from_dir(wn)?)?;
        let mut domains = match &cfg.domains_hierarchy {
            Some(h) => DomainDb::from_hierarchy_str(&corpus::read(h)?, &h.display().to_string())?,
            None => bundled_hierarchy(),
        };
        if let Some(map) = &cfg.domains_map {
            let table = match &cfg.domains_translation {
                Some(t) => crate::lexdb::parse_translation(&corpus::read(t)?, &t.display().to_string())?,
                None => HashMap::new(),
            };
            domains.add_mapping_str(&corpus::read(map)?, &map.display().to_string(), &table)?;
        }
        let stopwords = match &cfg.stopwords {
            Some(p) => Stopwords::load(p)?,
            None => Stopwords::builtin(),
        };
        let mut res = Resources::new(db, domains, stopwords);
        res.tagger = cfg.tagger.clone();
        Ok(res)
    }

    /// Hash of every input that affects analyses.
    pub fn fingerprint(&self, rep: Representation) -> String {
        let mut h = Sha256::new();
        h.update(self.db.fingerprint());
        h.update(self.domains.fingerprint());
        for w in self.stopwords.sorted() {
            h.update(w);
            h.update([0]);
        }
        h.update(format!("{:?}|{rep}", self.tagger));
        hex(&h.finalize())
    }

    fn tagger_for(&self, doc_id: &str) -> Result<Box<dyn PosTagger>, EngineError> {
        Ok(match &self.tagger {
            TaggerChoice::Builtin => Box::new(FrequencyTagger),
            TaggerChoice::External(dir) => Box::new(ExternalTagger::load(&dir.join(format!("{doc_id}.tags")))?),
        })
    }

    /// Tokenize, tag, identify terms and disambiguate.
    pub fn process(&self, doc_id: &str, text: &str) -> Result<DocReport, EngineError> {
        let tokens = tokenize(text, &self.stopwords);
        let tagger = self.tagger_for(doc_id)?;
        let tagged = tag_document(&tokens, tagger.as_ref(), &self.db)?;
        let terms = identify_terms(&tagged, &self.lexicon, &self.db);
        let ctx = contexts(&terms);
        let rel = StandardRelatedness::new(&self.db, &self.domains, &self.ic);
        let disambiguation = disambiguate(&terms, &ctx, &self.db, &self.domains, &rel);
        Ok(DocReport {
            tokens: tagged,
            terms,
            disambiguation,
        })
    }

    pub fn analyze(&self, doc_id: &str, text: &str, rep: Representation) -> Result<DocAnalysis, EngineError> {
        match rep {
            Representation::Semantic => {
                let report = self.process(doc_id, text)?;
                Ok(DocAnalysis::from_disambiguation(
                    doc_id,
                    &report.disambiguation,
                    &self.db,
                    &self.ic,
                ))
            }
            Representation::Classic => {
                let words: Vec<String> = tokenize(text, &self.stopwords)
                    .into_iter()
                    .filter(|t| !t.is_stopword)
                    .map(|t| self.keyword(&t.norm))
                    .collect();
                Ok(DocAnalysis::from_keywords(doc_id, words.iter().map(String::as_str)))
            }
        }
    }

    /// Base form used by the keyword representation.
    pub fn keyword(&self, norm: &str) -> String {
        PartOfSpeech::ALL
            .iter()
            .find_map(|p| self.db.morphy(norm, *p).into_iter().next())
            .unwrap_or_else(|| norm.to_string())
    }

    /// Analyses every document in parallel, keeping input order.
    pub fn analyze_corpus(&self, docs: &[Document], rep: Representation) -> Result<Vec<DocAnalysis>, EngineError> {
        if docs.is_empty() {
            return Err(EngineError::EmptyCorpus);
        }
        docs.par_iter().map(|(id, text)| self.analyze(id, text, rep)).collect()
    }

    /// Hash of the corpus together with [`Resources::fingerprint`].
    pub fn analysis_key(&self, docs: &[Document], rep: Representation) -> String {
        let mut h = Sha256::new();
        h.update(self.fingerprint(rep));
        for (id, text) in docs {
            h.update(id);
            h.update([0]);
            h.update(text);
            h.update([0]);
        }
        hex(&h.finalize())
    }

    /// Like [`Resources::analyze_corpus`], reusing `<cache_dir>/analyses-<key>.bin`
    /// when its key matches. The flag tells whether the cache was used.
    pub fn analyze_corpus_cached(
        &self,
        docs: &[Document],
        rep: Representation,
        cache_dir: &Path,
    ) -> Result<(Vec<DocAnalysis>, bool), EngineError> {
        let key = self.analysis_key(docs, rep);
        let path = cache_dir.join(format!("analyses-{}.bin", &key[..16]));
        if let Ok(bytes) = std::fs::read(&path) {
            if let Ok(Some(hit)) = read_analyses(&bytes, &key) {
                return Ok((hit, true));
            }
        }
        let analyses = self.analyze_corpus(docs, rep)?;
        let io = |source| EngineError::Io {
            path: path.clone(),
            source,
        };
        std::fs::create_dir_all(cache_dir).map_err(io)?;
        std::fs::write(&path, write_analyses(&analyses, &key)).map_err(io)?;
        Ok((analyses, false))
    }
}

/// The shipped domain hierarchy with no synset annotations.
pub fn bundled_hierarchy() -> DomainDb {
    DomainDb::from_hierarchy_str(BUNDLED_HIERARCHY, "domain_hierarchy.tsv").expect("bundled hierarchy is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentVector {
    pub doc_id: String,
    /// Positive weights in unit order.
    pub weights: Vec<(IndexUnit, f64)>,
    pub norm: f64,
}

impl DocumentVector {
    pub fn new(doc_id: impl Into<String>, weights: Vec<(IndexUnit, f64)>) -> Self {
        let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        DocumentVector {
            doc_id: doc_id.into(),
            weights,
            norm,
        }
    }

    pub fn get(&self, unit: &IndexUnit) -> Option<f64> {
        self.weights
            .binary_search_by(|(u, _)| u.cmp(unit))
            .ok()
            .map(|i| self.weights[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    pub config: WeightingConfig,
    pub representation: Representation,
    pub stats: CollectionStats,
    /// Parameter-free per-document data the weights derive from.
    pub analyses: Vec<DocAnalysis>,
    /// In corpus order.
    pub vectors: Vec<DocumentVector>,
    /// Unit to `(position in vectors, weight)`.
    pub postings: BTreeMap<IndexUnit, Vec<(usize, f64)>>,
    by_id: HashMap<String, usize>,
}

impl Index {
    /// Collection pass plus final weights over already analysed documents.
    pub fn build(analyses: Vec<DocAnalysis>, rep: Representation, cfg: WeightingConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        if analyses.is_empty() {
            return Err(EngineError::EmptyCorpus);
        }
        let stats = CollectionStats::compute(&analyses, &cfg);
        let vectors: Vec<DocumentVector> = analyses
            .par_iter()
            .map(|a| DocumentVector::new(a.doc_id.clone(), weigh(a, &stats, &cfg)))
            .collect();
        Ok(Self::assemble(cfg, rep, stats, analyses, vectors))
    }

    pub fn build_from_corpus(
        res: &Resources,
        docs: &[Document],
        rep: Representation,
        cfg: WeightingConfig,
    ) -> Result<Self, EngineError> {
        cfg.validate()?;
        let analyses = res.analyze_corpus(docs, rep)?;
        Self::build(analyses, rep, cfg)
    }

    fn assemble(
        config: WeightingConfig,
        representation: Representation,
        stats: CollectionStats,
        analyses: Vec<DocAnalysis>,
        vectors: Vec<DocumentVector>,
    ) -> Self {
        let mut postings: BTreeMap<IndexUnit, Vec<(usize, f64)>> = BTreeMap::new();
        for (i, v) in vectors.iter().enumerate() {
            for (u, w) in &v.weights {
                postings.entry(u.clone()).or_default().push((i, *w));
            }
        }
        let by_id = vectors.iter().enumerate().map(|(i, v)| (v.doc_id.clone(), i)).collect();
        Index {
            config,
            representation,
            stats,
            analyses,
            vectors,
            postings,
            by_id,
        }
    }

    /// Same analyses, new weighting parameters.
    pub fn reweight(&self, cfg: WeightingConfig) -> Result<Self, EngineError> {
        Self::build(self.analyses.clone(), self.representation, cfg)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, doc_id: &str) -> Option<&DocumentVector> {
        self.by_id.get(doc_id).map(|&i| &self.vectors[i])
    }

    pub fn analysis(&self, doc_id: &str) -> Option<&DocAnalysis> {
        self.by_id.get(doc_id).map(|&i| &self.analyses[i])
    }

    /// Weight breakdown of one indexed document.
    pub fn inspect(&self, doc_id: &str) -> Option<Vec<UnitWeight>> {
        self.analysis(doc_id)
            .map(|a| unit_weights(a, &self.stats, &self.config))
    }

    /// Weights a query analysis against this collection's statistics.
    pub fn query_vector(&self, query: &DocAnalysis) -> DocumentVector {
        DocumentVector::new(query.doc_id.clone(), weigh(query, &self.stats, &self.config))
    }

    /// Cosine ranking over the postings of the query's units.
    pub fn search_vector(&self, q: &DocumentVector, k: usize) -> Vec<SearchHit> {
        if q.norm == 0.0 || k == 0 {
            return Vec::new();
        }
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for (u, wq) in &q.weights {
            if let Some(list) = self.postings.get(u) {
                for (d, wd) in list {
                    *acc.entry(*d).or_default() += wq * wd;
                }
            }
        }
        let scored = acc
            .into_iter()
            .map(|(d, dot)| (d, dot / (q.norm * self.vectors[d].norm)));
        self.rank(scored, k)
    }

    /// Scores every document vector directly; the reference for [`Index::search_vector`].
    pub fn search_exhaustive(&self, q: &DocumentVector, k: usize) -> Vec<SearchHit> {
        if q.norm == 0.0 || k == 0 {
            return Vec::new();
        }
        let scored = self.vectors.iter().enumerate().map(|(d, v)| {
            let dot: f64 = q.weights.iter().filter_map(|(u, wq)| v.get(u).map(|wd| wq * wd)).sum();
            let denom = q.norm * v.norm;
            (d, if denom > 0.0 { dot / denom } else { 0.0 })
        });
        self.rank(scored, k)
    }

    fn rank(&self, scored: impl Iterator<Item = (usize, f64)>, k: usize) -> Vec<SearchHit> {
        let mut hits: Vec<SearchHit> = scored
            .filter(|(_, s)| *s > 0.0)
            .map(|(d, s)| SearchHit {
                doc_id: self.vectors[d].doc_id.clone(),
                score: s.min(1.0),
            })
            .collect();
        hits.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id)));
        hits.truncate(k);
        hits
    }

    /// Runs the query text through the indexing pipeline, then ranks.
    pub fn search(&self, res: &Resources, query_id: &str, text: &str, k: usize) -> Result<Vec<SearchHit>, EngineError> {
        let analysis = res.analyze(query_id, text, self.representation)?;
        let q = self.query_vector(&analysis);
        if q.is_empty() {
            return Err(EngineError::EmptyQueryVector);
        }
        Ok(self.search_vector(&q, k))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = persist::Writer::new(INDEX_MAGIC);
        w.record(persist::REC_CONFIG, |w| w.config(&self.config, self.representation));
        w.record(persist::REC_STATS, |w| w.stats(&self.stats));
        for a in &self.analyses {
            w.record(persist::REC_ANALYSIS, |w| w.analysis(a));
        }
        for v in &self.vectors {
            w.record(persist::REC_VECTOR, |w| {
                w.str(&v.doc_id);
                w.u32(v.weights.len() as u32);
                for (u, x) in &v.weights {
                    w.unit(u);
                    w.f64(*x);
                }
            });
        }
        w.record(persist::REC_END, |_| {});
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EngineError> {
        let mut r = persist::Reader::open(bytes, INDEX_MAGIC)?;
        let mut config = None;
        let mut stats = None;
        let mut analyses = Vec::new();
        let mut vectors = Vec::new();
        let eof = bytes.len();
        while let Some((kind, mut rec)) = r.record()? {
            match kind {
                persist::REC_CONFIG => config = Some(rec.config()?),
                persist::REC_STATS => stats = Some(rec.stats()?),
                persist::REC_ANALYSIS => analyses.push(rec.analysis()?),
                persist::REC_VECTOR => {
                    let doc_id = rec.str()?;
                    let n = rec.u32()?;
                    let mut weights = Vec::with_capacity(n.min(1 << 16) as usize);
                    for _ in 0..n {
                        let u = rec.unit()?;
                        weights.push((u, rec.f64()?));
                    }
                    vectors.push(DocumentVector::new(doc_id, weights));
                }
                _ => return Err(EngineError::CorruptIndex(rec.offset())),
            }
            rec.finish()?;
        }
        r.finish()?;
        let (config, representation) = config.ok_or(EngineError::CorruptIndex(eof))?;
        let stats = stats.ok_or(EngineError::CorruptIndex(eof))?;
        if analyses.len() != vectors.len() {
            return Err(EngineError::CorruptIndex(eof));
        }
        Ok(Self::assemble(config, representation, stats, analyses, vectors))
    }

    /// Writes the index and its `.manifest` text sidecar.
    pub fn save(&self, path: &Path) -> Result<(), EngineError> {
        let bytes = self.to_bytes();
        let io = |p: &Path| {
            let p = p.to_path_buf();
            move |source| EngineError::Io { path: p, source }
        };
        std::fs::write(path, &bytes).map_err(io(path))?;
        let manifest = manifest_path(path);
        std::fs::write(&manifest, self.manifest(&bytes)).map_err(io(&manifest))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let bytes = std::fs::read(path).map_err(|source| EngineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }

    fn manifest(&self, bytes: &[u8]) -> String {
        let c = &self.config;
        let postings: usize = self.postings.values().map(Vec::len).sum();
        let config_line = format!(
            "{}|{}|{}|{}|{}|{}|{:?}|{:?}",
            self.representation, c.scheme, c.alpha, c.threshold, c.bm25_k1, c.bm25_b, c.tf_mode, c.sim_mode
        );
        format!(
            "format_version = {FORMAT_VERSION}\nrepresentation = {}\nscheme = {}\nalpha = {}\nthreshold_mode = {}\nthreshold = {}\nbm25_k1 = {}\nbm25_b = {}\ndocuments = {}\nunits = {}\npostings = {}\nconfig_sha256 = {}\nindex_sha256 = {}\n",
            self.representation,
            c.scheme,
            c.alpha,
            c.threshold,
            self.stats.threshold,
            c.bm25_k1,
            c.bm25_b,
            self.vectors.len(),
            self.postings.len(),
            postings,
            hex(&Sha256::digest(config_line.as_bytes())),
            hex(&Sha256::digest(bytes)),
        )
    }
}

pub fn manifest_path(index: &Path) -> PathBuf {
    let mut name = index.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}
