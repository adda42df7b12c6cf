//! `conceptir` command line: build, search, evaluate and inspect
//! concept-based indexes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use conceptir_core::conceptid::dump_terms;
use conceptir_core::engine::{
    ingest_corpus, parse_time_queries, sweep_alpha, CorpusFormat, Document, EngineConfig, EngineError, Index, QuerySet,
    Representation, Resources,
};
use conceptir_core::evalkit::{evaluate, improvement_report, report_text, report_tsv, EvalError, Qrels, RunList};
use conceptir_core::weighting::{Scheme, WeightError};
use conceptir_core::wsd::dump_annotations;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Engine(EngineError::Config(_) | EngineError::Weight(_)) => 1,
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "conceptir",
    version,
    about = "Concept-based indexing and retrieval over WordNet"
)]
struct Cli {
    /// `key = value` settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Weighting scheme, overriding the config.
    #[arg(long, global = true)]
    scheme: Option<Scheme>,
    #[arg(long, global = true)]
    representation: Option<Representation>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Index file, overriding `index_out`.
    #[arg(long, global = true)]
    index: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse the corpus and save a weighted index.
    Index {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        format: Option<CorpusFormat>,
    },
    /// Rank indexed documents for one query.
    Search {
        #[arg(short, long)]
        query: String,
        #[arg(short = 'k', long = "topk", default_value_t = 10)]
        k: usize,
        /// Also write the ranking as a TREC run file.
        #[arg(long)]
        run: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        qid: String,
    },
    /// Compare two TREC runs metric by metric.
    Eval {
        #[arg(long, num_args = 2, value_names = ["RUN_A", "RUN_B"], required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long, value_enum, default_value_t = QrelsFormat::Trec)]
        qrels_format: QrelsFormat,
        /// Machine-readable `metric, run_a, run_b, delta_pct` lines.
        #[arg(long)]
        tsv: bool,
    },
    /// Print the sense chosen for every ambiguous term of a text.
    Disambiguate {
        #[command(flatten)]
        input: TextInput,
        /// Print the identified terms instead.
        #[arg(long)]
        dump_terms: bool,
    },
    /// Weight breakdown of one indexed document.
    Inspect {
        #[arg(long)]
        doc: String,
    },
    /// Reweight one analysed index over a grid of alphas and evaluate each.
    SweepAlpha {
        /// `start:end:step`, both ends included.
        #[arg(long, default_value = "0.1:0.9:0.1")]
        alpha_grid: String,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long, value_enum, default_value_t = QrelsFormat::Trec)]
        qrels_format: QrelsFormat,
        #[arg(short = 'k', long = "topk", default_value_t = 1000)]
        k: usize,
        /// Also write the matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TextInput {
    #[arg(long)]
    text: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum QrelsFormat {
    Trec,
    Time,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(CliError::Internal(msg))
    });
    match outcome {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };
    if let Some(s) = cli.scheme {
        cfg.weighting.scheme = s;
    }
    if let Some(r) = cli.representation {
        cfg.representation = r;
    }
    if let Some(a) = cli.alpha {
        cfg.weighting.alpha = a;
    }
    if cli.index.is_some() {
        cfg.index_out = cli.index.clone();
    }
    cfg.weighting.validate()?;
    match cli.command {
        Command::Index { corpus, format } => {
            if corpus.is_some() {
                cfg.corpus = corpus;
            }
            if let Some(f) = format {
                cfg.corpus_format = f;
            }
            index(&cfg)
        }
        Command::Search { query, k, run, qid } => search(&cfg, &query, k, run.as_deref(), &qid),
        Command::Eval {
            runs,
            qrels,
            qrels_format,
            tsv,
        } => eval(&cfg, &runs[0], &runs[1], &qrels, qrels_format, tsv),
        Command::Disambiguate { input, dump_terms } => disambiguate(&cfg, &input, dump_terms),
        Command::Inspect { doc } => inspect(&cfg, &doc),
        Command::SweepAlpha {
            alpha_grid,
            queries,
            qrels,
            qrels_format,
            k,
            out,
        } => sweep(&cfg, &alpha_grid, &queries, &qrels, qrels_format, k, out.as_deref()),
    }
}

fn check_paths(cfg: &EngineConfig) -> Result<()> {
    match cfg.missing_paths().first() {
        Some(p) => Err(EngineError::Io {
            path: p.clone(),
            source: std::io::ErrorKind::NotFound.into(),
        }
        .into()),
        None => Ok(()),
    }
}

fn resources(cfg: &EngineConfig) -> Result<Resources> {
    check_paths(cfg)?;
    if cfg.wordnet_dir.is_none() {
        return Err(CliError::Usage("wordnet_dir must be set in the config file".into()));
    }
    Ok(Resources::from_config(cfg)?)
}

fn index_path(cfg: &EngineConfig) -> Result<&Path> {
    cfg.index_out
        .as_deref()
        .ok_or_else(|| CliError::Usage("no index path: pass --index or set index_out".into()))
}

/// Analyses the configured corpus, through the cache when one is configured.
fn build_index(cfg: &EngineConfig, res: &Resources) -> Result<(Index, usize, bool)> {
    let corpus = cfg
        .corpus
        .as_deref()
        .ok_or_else(|| CliError::Usage("no corpus: pass --corpus or set corpus".into()))?;
    let docs = ingest_corpus(corpus, cfg.corpus_format)?;
    let (analyses, cached) = match &cfg.cache_dir {
        Some(dir) => res.analyze_corpus_cached(&docs, cfg.representation, dir)?,
        None => (res.analyze_corpus(&docs, cfg.representation)?, false),
    };
    let index = Index::build(analyses, cfg.representation, cfg.weighting)?;
    Ok((index, docs.len(), cached))
}

/// The saved index, reweighted when the requested parameters differ. Its
/// representation is kept as built.
fn load_index(cfg: &EngineConfig) -> Result<Index> {
    let index = Index::load(index_path(cfg)?)?;
    if index.config == cfg.weighting {
        Ok(index)
    } else {
        Ok(index.reweight(cfg.weighting)?)
    }
}

fn index(cfg: &EngineConfig) -> Result<String> {
    let out = index_path(cfg)?.to_path_buf();
    let res = resources(cfg)?;
    let (index, n, cached) = build_index(cfg, &res)?;
    index.save(&out)?;
    Ok(format!(
        "indexed {n} documents ({} units, {} {}, analyses {}) into {}\n",
        index.postings.len(),
        index.representation,
        index.config.scheme,
        if cached { "from cache" } else { "computed" },
        out.display()
    ))
}

fn search(cfg: &EngineConfig, query: &str, k: usize, run: Option<&Path>, qid: &str) -> Result<String> {
    let res = resources(cfg)?;
    let index = load_index(cfg)?;
    let hits = match index.search(&res, qid, query, k) {
        Ok(h) => h,
        Err(EngineError::EmptyQueryVector) => {
            eprintln!("warning: query has no indexable terms");
            Vec::new()
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = run {
        let mut list = RunList::new("conceptir");
        list.push_ranked(qid, hits.iter().map(|h| (h.doc_id.clone(), h.score)));
        list.write(path)?;
    }
    let mut out = String::new();
    for (i, h) in hits.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{:.6}", i + 1, h.doc_id, h.score);
    }
    Ok(out)
}

fn load_qrels(path: &Path, format: QrelsFormat) -> Result<Qrels> {
    Ok(match format {
        QrelsFormat::Trec => Qrels::load(path)?,
        QrelsFormat::Time => {
            let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            Qrels::from_time_rel(&text, &path.display().to_string())?
        }
    })
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned())
}

fn eval(cfg: &EngineConfig, a: &Path, b: &Path, qrels: &Path, format: QrelsFormat, tsv: bool) -> Result<String> {
    let qrels = load_qrels(qrels, format)?;
    let ea = evaluate(&RunList::load(a)?, &qrels, &cfg.cutoffs)?;
    let eb = evaluate(&RunList::load(b)?, &qrels, &cfg.cutoffs)?;
    for skipped in ea.skipped.iter().chain(&eb.skipped) {
        eprintln!("note: {skipped}");
    }
    let rows = improvement_report(&ea, &eb)?;
    Ok(if tsv {
        report_tsv(&rows)
    } else {
        report_text(&rows, &stem(a), &stem(b))
    })
}

fn disambiguate(cfg: &EngineConfig, input: &TextInput, terms: bool) -> Result<String> {
    let res = resources(cfg)?;
    let (id, text) = match (&input.text, &input.file) {
        (Some(t), _) => ("text".to_string(), t.clone()),
        (None, Some(f)) => (
            stem(f),
            std::fs::read_to_string(f).map_err(|source| EngineError::Io {
                path: f.clone(),
                source,
            })?,
        ),
        (None, None) => return Err(CliError::Usage("pass --text or --file".into())),
    };
    let report = res.process(&id, &text)?;
    Ok(if terms {
        dump_terms(&report.terms)
    } else {
        dump_annotations(&report.disambiguation)
    })
}

fn inspect(cfg: &EngineConfig, doc: &str) -> Result<String> {
    let index = load_index(cfg)?;
    let rows = index
        .inspect(doc)
        .ok_or_else(|| CliError::Usage(format!("document `{doc}` is not in the index")))?;
    let mut out = String::from("unit\ttf\tcc\tn\tidc\tweight\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6}",
            r.unit, r.tf, r.cc, r.n, r.idc, r.weight
        );
    }
    Ok(out)
}

/// `start:end:step` with integer stepping, so that 0.1:0.9:0.1 gives nine
/// points despite binary rounding.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("alpha grid `{spec}` is not start:end:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if step.is_nan() || step <= 0.0 || end < start || !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) {
        return Err(bad());
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

/// `*FIND` records, or one `qid<TAB>text` per line.
fn read_queries(path: &Path) -> Result<Vec<Document>> {
    let text = std::fs::read_to_string(path).map_err(|source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with("*FIND") {
        return Ok(parse_time_queries(&text, &path.display().to_string())?);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_once('\t')
                .map(|(q, t)| (q.trim().to_string(), t.trim().to_string()))
                .ok_or_else(|| {
                    EngineError::MalformedRecord {
                        file: path.display().to_string(),
                        line: i + 1,
                    }
                    .into()
                })
        })
        .collect()
}

fn sweep(
    cfg: &EngineConfig,
    grid: &str,
    queries: &Path,
    qrels: &Path,
    format: QrelsFormat,
    k: usize,
    out: Option<&Path>,
) -> Result<String> {
    let grid = parse_grid(grid)?;
    let res = resources(cfg)?;
    let index = match &cfg.index_out {
        Some(p) if p.exists() => load_index(cfg)?,
        _ => build_index(cfg, &res)?.0,
    };
    let qs = QuerySet::analyze(&res, &read_queries(queries)?, &index)?;
    let qrels = load_qrels(qrels, format)?;
    let matrix = sweep_alpha(&index, &qs, &qrels, &grid, &cfg.cutoffs, k)?;
    let tsv = matrix.to_tsv();
    if let Some(path) = out {
        std::fs::write(path, &tsv).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })?;
    }
    if let Some(best) = matrix.best_map_alpha() {
        eprintln!("best MAP at alpha={best}");
    }
    Ok(tsv)
}
