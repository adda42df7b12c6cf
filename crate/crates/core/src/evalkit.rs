//! TREC-style evaluation: qrels and run files, P@x, MAP and the
//! percentage-improvement report between two runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const DEFAULT_CUTOFFS: [usize; 11] = [1, 2, 3, 4, 5, 10, 15, 20, 30, 50, 100];

/// Deltas beyond this many percent are flagged.
pub const SIGNIFICANT_PCT: f64 = 25.0;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed qrels line {line} in {file}")]
    MalformedQrelLine { file: String, line: usize },
    #[error("malformed run line {line} in {file}")]
    MalformedRunLine { file: String, line: usize },
    #[error("ranks of query {0} are not 1..n")]
    NonContiguousRanks(String),
    #[error("query {0} has no relevant documents")]
    NoRelevantDocs(String),
    #[error("query {0} is not in the qrels")]
    UnknownQuery(String),
    #[error("cutoff must be at least 1")]
    ZeroCutoff,
    #[error("the two runs evaluate different query sets")]
    QuerySetMismatch,
}

fn read(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Judgments per query; relevance is any positive grade.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    pub judgments: BTreeMap<String, BTreeMap<String, i32>>,
}

impl Qrels {
    /// `qid iter docid rel` lines.
    pub fn parse(text: &str, file: &str) -> Result<Self, EvalError> {
        let mut q = Qrels::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || EvalError::MalformedQrelLine {
                file: file.to_string(),
                line: i + 1,
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let rel: i32 = f[3].parse().map_err(|_| bad())?;
            q.insert(f[0], f[2], rel);
        }
        Ok(q)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    /// `qid docid docid ...` lines, as shipped with the TIME collection.
    pub fn from_time_rel(text: &str, file: &str) -> Result<Self, EvalError> {
        let mut q = Qrels::default();
        for (i, line) in text.lines().enumerate() {
            let mut f = line.split_whitespace();
            let Some(qid) = f.next() else { continue };
            let docs: Vec<&str> = f.collect();
            if docs.is_empty() || docs.iter().chain([&qid]).any(|d| d.parse::<u64>().is_err()) {
                return Err(EvalError::MalformedQrelLine {
                    file: file.to_string(),
                    line: i + 1,
                });
            }
            for d in docs {
                q.insert(&strip_zeros(qid), &strip_zeros(d), 1);
            }
        }
        Ok(q)
    }

    pub fn insert(&mut self, qid: &str, doc_id: &str, rel: i32) {
        self.judgments
            .entry(qid.to_string())
            .or_default()
            .insert(doc_id.to_string(), rel);
    }

    pub fn contains_query(&self, qid: &str) -> bool {
        self.judgments.contains_key(qid)
    }

    pub fn relevant(&self, qid: &str) -> BTreeSet<&str> {
        self.judgments
            .get(qid)
            .map(|m| m.iter().filter(|(_, r)| **r > 0).map(|(d, _)| d.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn to_trec_string(&self) -> String {
        let mut out = String::new();
        for (q, docs) in &self.judgments {
            for (d, r) in docs {
                let _ = writeln!(out, "{q} 0 {d} {r}");
            }
        }
        out
    }
}

fn strip_zeros(s: &str) -> String {
    let t = s.trim_start_matches('0');
    if t.is_empty() {
        "0".into()
    } else {
        t.into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunList {
    pub tag: String,
    /// Entries in rank order.
    pub queries: BTreeMap<String, Vec<RunEntry>>,
}

impl RunList {
    pub fn new(tag: impl Into<String>) -> Self {
        RunList {
            tag: tag.into(),
            queries: BTreeMap::new(),
        }
    }

    /// Adds an already ranked list; ranks are assigned 1..n.
    pub fn push_ranked(&mut self, qid: &str, ranked: impl IntoIterator<Item = (String, f64)>) {
        let entries = ranked
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| RunEntry {
                doc_id,
                score,
                rank: i + 1,
            })
            .collect();
        self.queries.insert(qid.to_string(), entries);
    }

    /// `qid Q0 docid rank score tag` lines.
    pub fn parse(text: &str, file: &str) -> Result<Self, EvalError> {
        let mut run = RunList::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || EvalError::MalformedRunLine {
                file: file.to_string(),
                line: i + 1,
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let rank: usize = f[3].parse().map_err(|_| bad())?;
            let score: f64 = f[4].parse().map_err(|_| bad())?;
            run.tag = f[5].to_string();
            run.queries.entry(f[0].to_string()).or_default().push(RunEntry {
                doc_id: f[2].to_string(),
                score,
                rank,
            });
        }
        for (qid, entries) in run.queries.iter_mut() {
            entries.sort_by_key(|e| e.rank);
            if entries.iter().enumerate().any(|(i, e)| e.rank != i + 1) {
                return Err(EvalError::NonContiguousRanks(qid.clone()));
            }
        }
        Ok(run)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    pub fn to_trec_string(&self) -> String {
        let mut out = String::new();
        for (q, entries) in &self.queries {
            for e in entries {
                let _ = writeln!(out, "{q} Q0 {} {} {} {}", e.doc_id, e.rank, e.score, self.tag);
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), EvalError> {
        std::fs::write(path, self.to_trec_string()).map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn ranked(&self, qid: &str) -> Vec<&str> {
        self.queries
            .get(qid)
            .map(|v| v.iter().map(|e| e.doc_id.as_str()).collect())
            .unwrap_or_default()
    }
}

/// Relevant documents among the first `x`, divided by `x`.
pub fn precision_at(ranked: &[&str], relevant: &BTreeSet<&str>, x: usize) -> f64 {
    if x == 0 {
        return 0.0;
    }
    let hits = ranked.iter().take(x).filter(|d| relevant.contains(*d)).count();
    hits as f64 / x as f64
}

/// Relevant documents among the first `x`, divided by all relevant ones.
pub fn recall_at(ranked: &[&str], relevant: &BTreeSet<&str>, x: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let hits = ranked.iter().take(x).filter(|d| relevant.contains(*d)).count();
    hits as f64 / relevant.len() as f64
}

/// Mean of the precision at each relevant document's rank, over every
/// relevant document; unretrieved ones contribute zero.
pub fn average_precision(ranked: &[&str], relevant: &BTreeSet<&str>) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut found = 0usize;
    let mut sum = 0.0;
    let mut seen = BTreeSet::new();
    for (i, d) in ranked.iter().enumerate() {
        if relevant.contains(d) && seen.insert(*d) {
            found += 1;
            sum += found as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryMetrics {
    pub qid: String,
    /// Aligned with the evaluation's cutoffs.
    pub precision: Vec<f64>,
    pub ap: f64,
    pub num_rel: usize,
    pub num_ret: usize,
    pub rel_ret: usize,
}

#[derive(Debug)]
pub struct Evaluation {
    pub cutoffs: Vec<usize>,
    pub per_query: Vec<QueryMetrics>,
    /// Queries left out, with the reason.
    pub skipped: Vec<EvalError>,
}

impl Evaluation {
    fn mean(&self, f: impl Fn(&QueryMetrics) -> f64) -> f64 {
        if self.per_query.is_empty() {
            return 0.0;
        }
        self.per_query.iter().map(f).sum::<f64>() / self.per_query.len() as f64
    }

    pub fn precision_at(&self, cutoff_idx: usize) -> f64 {
        self.mean(|q| q.precision[cutoff_idx])
    }

    pub fn map(&self) -> f64 {
        self.mean(|q| q.ap)
    }

    /// Arithmetic mean of the P@x means.
    pub fn mean_precision(&self) -> f64 {
        if self.cutoffs.is_empty() {
            return 0.0;
        }
        (0..self.cutoffs.len()).map(|i| self.precision_at(i)).sum::<f64>() / self.cutoffs.len() as f64
    }

    /// `(name, value)` for every P@x, then MP@x and MAP.
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .cutoffs
            .iter()
            .enumerate()
            .map(|(i, x)| (format!("P@{x}"), self.precision_at(i)))
            .collect();
        out.push(("MP@x".into(), self.mean_precision()));
        out.push(("MAP".into(), self.map()));
        out
    }

    pub fn query_ids(&self) -> BTreeSet<&str> {
        self.per_query.iter().map(|q| q.qid.as_str()).collect()
    }
}

/// Scores each query of the run that has at least one relevant judgment.
pub fn evaluate(run: &RunList, qrels: &Qrels, cutoffs: &[usize]) -> Result<Evaluation, EvalError> {
    if cutoffs.contains(&0) {
        return Err(EvalError::ZeroCutoff);
    }
    let mut eval = Evaluation {
        cutoffs: cutoffs.to_vec(),
        per_query: Vec::new(),
        skipped: Vec::new(),
    };
    for qid in run.queries.keys() {
        if !qrels.contains_query(qid) {
            eval.skipped.push(EvalError::UnknownQuery(qid.clone()));
            continue;
        }
        let relevant = qrels.relevant(qid);
        if relevant.is_empty() {
            eval.skipped.push(EvalError::NoRelevantDocs(qid.clone()));
            continue;
        }
        let ranked = run.ranked(qid);
        eval.per_query.push(QueryMetrics {
            qid: qid.clone(),
            precision: cutoffs.iter().map(|x| precision_at(&ranked, &relevant, *x)).collect(),
            ap: average_precision(&ranked, &relevant),
            num_rel: relevant.len(),
            num_ret: ranked.len(),
            rel_ret: ranked.iter().filter(|d| relevant.contains(*d)).count(),
        });
    }
    Ok(eval)
}

pub fn mean_average_precision(run: &RunList, qrels: &Qrels) -> f64 {
    evaluate(run, qrels, &[]).map(|e| e.map()).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    /// `None` when the baseline value is zero.
    pub delta_pct: Option<f64>,
    pub significant: bool,
}

/// Percentage change of run `a` over baseline `b` for every metric.
pub fn improvement_report(a: &Evaluation, b: &Evaluation) -> Result<Vec<ReportRow>, EvalError> {
    if a.query_ids() != b.query_ids() || a.cutoffs != b.cutoffs {
        return Err(EvalError::QuerySetMismatch);
    }
    Ok(a.metrics()
        .into_iter()
        .zip(b.metrics())
        .map(|((metric, va), (_, vb))| {
            let delta_pct = (vb != 0.0).then(|| 100.0 * (va - vb) / vb);
            ReportRow {
                metric,
                a: va,
                b: vb,
                delta_pct,
                significant: delta_pct.is_some_and(|d| d.abs() > SIGNIFICANT_PCT),
            }
        })
        .collect())
}

/// `metric<TAB>run_a<TAB>run_b<TAB>delta_pct` lines.
pub fn report_tsv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let delta = r.delta_pct.map_or("undefined".to_string(), |d| format!("{d:.2}"));
        let _ = writeln!(out, "{}\t{:.4}\t{:.4}\t{}", r.metric, r.a, r.b, delta);
    }
    out
}

/// Aligned table; significant rows carry a `*`.
pub fn report_text(rows: &[ReportRow], name_a: &str, name_b: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>10} {:>10} {:>10}", "metric", name_a, name_b, "delta%");
    for r in rows {
        let delta = r.delta_pct.map_or("undefined".to_string(), |d| format!("{d:+.2}"));
        let flag = if r.significant { " *" } else { "" };
        let _ = writeln!(out, "{:<8} {:>10.4} {:>10.4} {:>10}{flag}", r.metric, r.a, r.b, delta);
    }
    out
}
