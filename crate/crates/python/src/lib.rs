//! Python bindings: load the lexical resources once, then disambiguate,
//! index, search and evaluate from Python.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use conceptir_core::engine::{self, EngineConfig, EngineError, Representation, Resources};
use conceptir_core::evalkit::{self, EvalError, Qrels, RunList};
use conceptir_core::lexdb::{PartOfSpeech, SynsetId};
use conceptir_core::weighting::{Scheme, WeightingConfig};

fn engine_err(e: EngineError) -> PyErr {
    match e {
        EngineError::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn eval_err(e: EvalError) -> PyErr {
    match e {
        EvalError::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_pos(s: &str) -> PyResult<PartOfSpeech> {
    s.chars()
        .next()
        .and_then(PartOfSpeech::from_letter)
        .ok_or_else(|| value_err(format!("unknown part of speech `{s}`")))
}

/// `"08420278-n"` style synset ids.
fn parse_synset(s: &str) -> PyResult<SynsetId> {
    s.parse().map_err(value_err)
}

type AnnotationRow = (String, String, String, String, f64, f64);
type WeightRow = (String, f64, f64, u32, f64, f64);

/// Loaded WordNet, domain and stopword resources.
#[pyclass(module = "conceptir")]
struct Engine {
    res: Resources,
}

#[pymethods]
impl Engine {
    /// Either a config file, or the WordNet directory plus an optional
    /// domain mapping.
    #[new]
    #[pyo3(signature = (config=None, wordnet_dir=None, domains_map=None))]
    fn new(config: Option<PathBuf>, wordnet_dir: Option<PathBuf>, domains_map: Option<PathBuf>) -> PyResult<Self> {
        let mut cfg = match config {
            Some(p) => EngineConfig::load(&p).map_err(engine_err)?,
            None => EngineConfig::default(),
        };
        if wordnet_dir.is_some() {
            cfg.wordnet_dir = wordnet_dir;
        }
        if domains_map.is_some() {
            cfg.domains_map = domains_map;
        }
        let res = Resources::from_config(&cfg).map_err(engine_err)?;
        Ok(Engine { res })
    }

    fn senses(&self, lemma: &str, pos: &str) -> PyResult<Vec<String>> {
        Ok(self
            .res
            .db
            .senses(lemma, parse_pos(pos)?)
            .iter()
            .map(ToString::to_string)
            .collect())
    }

    fn domains_of(&self, synset: &str) -> PyResult<Vec<String>> {
        Ok(self.res.domains.domains_of(parse_synset(synset)?).to_vec())
    }

    fn resnik(&self, a: &str, b: &str) -> PyResult<f64> {
        self.res
            .ic
            .resnik(parse_synset(a)?, parse_synset(b)?, &self.res.db)
            .map_err(value_err)
    }

    fn wup_domain(&self, a: &str, b: &str) -> PyResult<f64> {
        conceptir_core::similarity::wup_domain(a, b, &self.res.domains).map_err(value_err)
    }

    /// `(lemma, kind, count)` for every identified term.
    fn terms(&self, text: &str) -> PyResult<Vec<(String, String, usize)>> {
        let report = self.res.process("text", text).map_err(engine_err)?;
        Ok(report
            .terms
            .all()
            .map(|t| (t.lemma.clone(), t.kind.as_str().to_string(), t.count()))
            .collect())
    }

    /// `(lemma, pos, domain, synset, domain_score, sense_score)` per annotation.
    fn disambiguate(&self, text: &str) -> PyResult<Vec<AnnotationRow>> {
        let report = self.res.process("text", text).map_err(engine_err)?;
        Ok(report
            .disambiguation
            .annotations
            .iter()
            .map(|a| {
                (
                    a.term.lemma.clone(),
                    a.term.pos.to_string(),
                    a.domain.clone(),
                    a.synset.to_string(),
                    a.domain_score,
                    a.sense_score,
                )
            })
            .collect())
    }

    /// Builds an index over `(doc_id, text)` pairs.
    #[pyo3(signature = (docs, scheme="cc-idc", alpha=0.2, representation="semantic"))]
    fn build_index(
        &self,
        py: Python<'_>,
        docs: Vec<(String, String)>,
        scheme: &str,
        alpha: f64,
        representation: &str,
    ) -> PyResult<Index> {
        let cfg = WeightingConfig {
            scheme: scheme.parse::<Scheme>().map_err(value_err)?,
            alpha,
            ..Default::default()
        };
        let rep: Representation = representation.parse().map_err(engine_err)?;
        let inner = py
            .detach(|| engine::Index::build_from_corpus(&self.res, &docs, rep, cfg))
            .map_err(engine_err)?;
        Ok(Index { inner })
    }
}

/// A weighted, searchable collection.
#[pyclass(module = "conceptir")]
struct Index {
    inner: engine::Index,
}

#[pymethods]
impl Index {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Index {
            inner: engine::Index::load(&path).map_err(engine_err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(engine_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.config.alpha
    }

    #[getter]
    fn scheme(&self) -> String {
        self.inner.config.scheme.to_string()
    }

    /// Same analyses under new parameters.
    #[pyo3(signature = (alpha=None, scheme=None))]
    fn reweight(&self, alpha: Option<f64>, scheme: Option<&str>) -> PyResult<Self> {
        let mut cfg = self.inner.config;
        if let Some(a) = alpha {
            cfg.alpha = a;
        }
        if let Some(s) = scheme {
            cfg.scheme = s.parse().map_err(value_err)?;
        }
        Ok(Index {
            inner: self.inner.reweight(cfg).map_err(engine_err)?,
        })
    }

    /// `(doc_id, score)` pairs, best first; empty when the query has no
    /// indexable terms.
    #[pyo3(signature = (engine, query, k=10))]
    fn search(&self, engine: &Engine, query: &str, k: usize) -> PyResult<Vec<(String, f64)>> {
        match self.inner.search(&engine.res, "query", query, k) {
            Ok(hits) => Ok(hits.into_iter().map(|h| (h.doc_id, h.score)).collect()),
            Err(EngineError::EmptyQueryVector) => Ok(Vec::new()),
            Err(e) => Err(engine_err(e)),
        }
    }

    /// `(unit, tf, cc, n, idc, weight)` rows for one document.
    fn inspect(&self, doc_id: &str) -> PyResult<Vec<WeightRow>> {
        let rows = self
            .inner
            .inspect(doc_id)
            .ok_or_else(|| value_err(format!("document `{doc_id}` is not in the index")))?;
        Ok(rows
            .into_iter()
            .map(|r| (r.unit.to_string(), r.tf, r.cc, r.n, r.idc, r.weight))
            .collect())
    }
}

/// Metric name to value for a TREC run against TREC qrels.
#[pyfunction]
#[pyo3(signature = (run, qrels, cutoffs=None))]
fn evaluate(run: PathBuf, qrels: PathBuf, cutoffs: Option<Vec<usize>>) -> PyResult<Vec<(String, f64)>> {
    let run = RunList::load(&run).map_err(eval_err)?;
    let qrels = Qrels::load(&qrels).map_err(eval_err)?;
    let cutoffs = cutoffs.unwrap_or_else(|| evalkit::DEFAULT_CUTOFFS.to_vec());
    let e = evalkit::evaluate(&run, &qrels, &cutoffs).map_err(eval_err)?;
    Ok(e.metrics())
}

#[pymodule]
fn conceptir(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_class::<Index>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
