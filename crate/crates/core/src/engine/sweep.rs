use crate::evalkit::{evaluate, Qrels, RunList};
use crate::weighting::{DocAnalysis, WeightingConfig};

use super::{Document, EngineError, Index, Resources};

/// Queries analysed once under the index's representation, so that weight
/// changes never repeat tagging or disambiguation.
pub struct QuerySet {
    pub analyses: Vec<DocAnalysis>,
}

impl QuerySet {
    pub fn analyze(res: &Resources, queries: &[Document], index: &Index) -> Result<Self, EngineError> {
        let analyses = queries
            .iter()
            .map(|(id, text)| res.analyze(id, text, index.representation))
            .collect::<Result<_, _>>()?;
        Ok(QuerySet { analyses })
    }
}

/// Ranks every query against `index`; a query whose vector is empty gets
/// an empty ranking.
pub fn run_queries(index: &Index, queries: &QuerySet, k: usize, tag: &str) -> RunList {
    let mut run = RunList::new(tag);
    for q in &queries.analyses {
        let v = index.query_vector(q);
        let hits = index.search_vector(&v, k);
        run.push_ranked(&q.doc_id, hits.into_iter().map(|h| (h.doc_id, h.score)));
    }
    run
}

/// Metric rows by alpha columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrix {
    pub alphas: Vec<f64>,
    pub metrics: Vec<String>,
    /// `values[m][a]` is metric `m` at `alphas[a]`.
    pub values: Vec<Vec<f64>>,
}

impl SweepMatrix {
    /// The alpha with the highest MAP; ties keep the smaller alpha.
    pub fn best_map_alpha(&self) -> Option<f64> {
        let row = self.metrics.iter().position(|m| m == "MAP")?;
        let mut best: Option<(f64, f64)> = None;
        for (a, v) in self.alphas.iter().zip(&self.values[row]) {
            if best.is_none_or(|(_, b)| *v > b) {
                best = Some((*a, *v));
            }
        }
        best.map(|(a, _)| a)
    }

    /// Tab-separated, one header row of alphas then one row per metric.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric");
        for a in &self.alphas {
            out.push_str(&format!("\talpha={a}"));
        }
        out.push('\n');
        for (m, row) in self.metrics.iter().zip(&self.values) {
            out.push_str(m);
            for v in row {
                out.push_str(&format!("\t{v:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Reweights one analysed index for each alpha and evaluates the queries.
pub fn sweep_alpha(
    index: &Index,
    queries: &QuerySet,
    qrels: &Qrels,
    grid: &[f64],
    cutoffs: &[usize],
    k: usize,
) -> Result<SweepMatrix, EngineError> {
    let mut metrics: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &alpha in grid {
        let cfg = WeightingConfig { alpha, ..index.config };
        let reweighted = index.reweight(cfg)?;
        let run = run_queries(&reweighted, queries, k, &format!("alpha-{alpha}"));
        let eval = evaluate(&run, qrels, cutoffs)?;
        let rows = eval.metrics();
        metrics = rows.iter().map(|(m, _)| m.clone()).collect();
        columns.push(rows.into_iter().map(|(_, v)| v).collect());
    }
    let values = (0..metrics.len())
        .map(|m| columns.iter().map(|c| c[m]).collect())
        .collect();
    Ok(SweepMatrix {
        alphas: grid.to_vec(),
        metrics,
        values,
    })
}
