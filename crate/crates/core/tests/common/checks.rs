//! One check per acceptance criterion. Each returns a short summary on
//! success and the first discrepancy on failure, so the same code backs the
//! topic test files and the `acceptance` report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use conceptir_core::conceptid::{contexts, identify_terms, match_at, TermInstance, TermKind};
use conceptir_core::engine::{
    ingest_corpus, parse_time_queries, sweep_alpha, CorpusFormat, EngineConfig, Index, QuerySet, Representation,
    Resources, SweepMatrix,
};
use conceptir_core::evalkit::{self, Qrels, RunList};
use conceptir_core::lexdb::{DomainDb, LexicalDb, PartOfSpeech, SynsetId};
use conceptir_core::similarity::{wup_domain, InformationContent};
use conceptir_core::textprep::{tag_document, tokenize, FrequencyTagger, TaggedToken};
use conceptir_core::weighting::{IndexUnit, Scheme, ThresholdMode, WeightingConfig};
use conceptir_core::wsd::{disambiguate, ScaledRelatedness, StandardRelatedness};

use super::oracle::{OracleDomains, OracleWordNet};
use super::{fixture_dir, resources, tiny_dir, BUNDLED_HIERARCHY};

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

pub const FINANCE: &str = "The bank is a financial institution that accepts deposits of money.";
pub const RIVER: &str = "He sat on the bank of the river and watched the water flow down the slope.";

// ---------------------------------------------------------------- lexdb

/// Compares the loaded stores with the brute-force oracle on one fixture.
pub fn compare_lexdb(dir: &Path, hierarchy: &str) -> Check {
    let db = LexicalDb::load_dir(dir).map_err(|e| e.to_string())?;
    let mapping = std::fs::read_to_string(dir.join("domains.map")).unwrap();
    let mut domains = DomainDb::from_hierarchy_str(hierarchy, "h").map_err(|e| e.to_string())?;
    domains
        .add_mapping_str(&mapping, "domains.map", &Default::default())
        .map_err(|e| e.to_string())?;
    let ic = InformationContent::build(&db);
    let wn = OracleWordNet::load(dir);
    let od = OracleDomains::parse(hierarchy, &mapping);

    for ((lemma, pos), senses) in &wn.senses {
        ensure!(
            db.senses(lemma, *pos) == senses.as_slice(),
            "senses of {lemma}/{pos} differ"
        );
    }
    let ids = wn.ids();
    ensure!(ids.len() == db.len(), "synset count {} vs {}", db.len(), ids.len());
    let mut ic_max: f64 = 0.0;
    for &id in &ids {
        ensure!(db.hypernym_depth(id).unwrap() == wn.depth(id), "depth of {id}");
        let anc: BTreeSet<SynsetId> = db.ancestors(id).unwrap().iter().copied().collect();
        ensure!(anc == wn.ancestors(id), "ancestors of {id}");
        let want = wn.ic(id);
        ensure!(ic.ic(id) == Some(want), "ic of {id}: {:?} vs {want}", ic.ic(id));
        ic_max = ic_max.max(want);
        let mut labels = domains.domains_of(id).to_vec();
        let mut expected = od.domains_of(id);
        labels.sort();
        expected.sort();
        ensure!(labels == expected, "domains of {id}");
    }
    ensure!(ic.ic_max() == ic_max, "ic_max {} vs {ic_max}", ic.ic_max());
    let mut pairs = 0;
    for &a in &ids {
        for &b in &ids {
            pairs += 1;
            let lcs = db.least_common_subsumer(a, b).unwrap();
            ensure!(lcs == wn.lcs(a, b), "lcs({a}, {b}): {lcs:?} vs {:?}", wn.lcs(a, b));
            let r = ic.resnik(a, b, &db).unwrap();
            ensure!(r == wn.resnik(a, b), "resnik({a}, {b})");
            let norm = ic.resnik_norm(a, b, &db).unwrap();
            let want = if ic_max > 0.0 {
                (wn.resnik(a, b) / ic_max).min(1.0)
            } else {
                0.0
            };
            ensure!(norm == want, "resnik_norm({a}, {b})");
        }
    }
    let labels: Vec<&String> = od.parent.keys().collect();
    let mut scored = 0;
    for a in &labels {
        for b in &labels {
            match wup_domain(a, b, &domains) {
                Ok(v) => {
                    ensure!(od.scorable(a) && od.scorable(b), "wup({a}, {b}) should be rejected");
                    ensure!(v == od.wup(a, b), "wup({a}, {b}): {v} vs {}", od.wup(a, b));
                    scored += 1;
                }
                Err(_) => ensure!(!od.scorable(a) || !od.scorable(b), "wup({a}, {b}) rejected"),
            }
        }
    }
    Ok(format!(
        "{} synsets, {pairs} synset pairs, {} domains, {scored} domain pairs",
        ids.len(),
        labels.len()
    ))
}

pub fn lexdb_oracle() -> Check {
    let start = Instant::now();
    let hierarchy = std::fs::read_to_string(tiny_dir().join("domains.tsv")).unwrap();
    let summary = compare_lexdb(&tiny_dir(), &hierarchy)?;
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("{summary} in {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

// ---------------------------------------------------------------- term identification

const PHRASES: &[&str] = &[
    "financial institution",
    "depository financial institution",
    "savings bank",
    "bank deposit",
    "body of water",
    "credit union",
    "medium of exchange",
    "money box",
    "coin bank",
    "banking concern",
    "social group",
    "physical object",
    "human action",
    "sit down",
    "care for",
];

const WORDS: &[&str] = &[
    "bank",
    "banks",
    "deposit",
    "deposits",
    "deposited",
    "money",
    "river",
    "rivers",
    "water",
    "slope",
    "car",
    "cars",
    "doctor",
    "sat",
    "sits",
    "financial",
    "institution",
    "body",
    "exchange",
    "medium",
    "union",
    "credit",
    "care",
    "down",
    "savings",
    "box",
    "tree",
    "garden",
    "flowers",
    "zorblat",
    "kennedy",
    "1963",
    "quickly",
    "run",
    "lent",
    "physical",
];

const FUNCTION: &[&str] = &["the", "of", "a", "and", "in", "for", "to", "was"];

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// A random document of at most `max_tokens` words built from collocation
/// pieces, content words, stopwords and unknown words, with occasional
/// sentence breaks.
pub fn random_document(rng: &mut StdRng, max_tokens: usize) -> String {
    let target = rng.gen_range(3..=max_tokens);
    let mut words: Vec<String> = Vec::new();
    let mut text = String::new();
    let mut sentence_start = true;
    while words.len() < target {
        let roll: f64 = rng.gen();
        let piece: Vec<&str> = if roll < 0.3 {
            PHRASES[rng.gen_range(0..PHRASES.len())].split(' ').collect()
        } else if roll < 0.75 {
            vec![WORDS[rng.gen_range(0..WORDS.len())]]
        } else {
            vec![FUNCTION[rng.gen_range(0..FUNCTION.len())]]
        };
        for w in piece.into_iter().take(target - words.len()) {
            if !text.is_empty() {
                text.push(' ');
            }
            if sentence_start {
                text.push_str(&capitalize(w));
                sentence_start = false;
            } else {
                text.push_str(w);
            }
            words.push(w.to_string());
        }
        if rng.gen_bool(0.12) && words.len() < target {
            text.push('.');
            sentence_start = true;
        }
    }
    text.push('.');
    text
}

type Found = BTreeMap<(TermKind, String, PartOfSpeech), Vec<(usize, usize, usize)>>;

/// Exhaustive window matcher: every window of two or more tokens in one
/// sentence is joined and looked up directly in the word index.
pub fn oracle_identify(doc: &[TaggedToken], db: &LexicalDb) -> Found {
    let colloc_at = |i: usize| -> Option<(String, PartOfSpeech, usize)> {
        let head = &doc[i].token;
        let mut variants = vec![head.norm.clone()];
        for pos in PartOfSpeech::ALL {
            variants.extend(db.morphy(&head.norm, pos));
        }
        let mut best: Option<(String, PartOfSpeech, usize)> = None;
        let mut j = i + 2;
        while j <= doc.len() && doc[j - 1].token.sentence_idx == head.sentence_idx {
            for v in &variants {
                let mut lemma = v.clone();
                for t in &doc[i + 1..j] {
                    lemma.push('_');
                    lemma.push_str(&t.token.norm);
                }
                let Some(pos) = PartOfSpeech::ALL.into_iter().find(|p| db.has_entry(&lemma, *p)) else {
                    continue;
                };
                let span = j - i;
                let better = match &best {
                    None => true,
                    Some((l, _, s)) => span > *s || (span == *s && lemma < *l),
                };
                if better {
                    best = Some((lemma, pos, span));
                }
            }
            j += 1;
        }
        best
    };
    let mut out = Found::new();
    let mut i = 0;
    while i < doc.len() {
        let t = &doc[i].token;
        if let Some((lemma, pos, span)) = colloc_at(i) {
            out.entry((TermKind::Collocation, lemma, pos))
                .or_default()
                .push((t.sentence_idx, t.position, span));
            i += span;
            continue;
        }
        if !t.is_stopword {
            let key = match doc[i]
                .pos
                .and_then(|p| db.morphy(&t.norm, p).first().cloned().map(|l| (l, p)))
            {
                Some((l, p)) => (TermKind::Simple, l, p),
                None => (TermKind::Orphan, t.norm.clone(), PartOfSpeech::Noun),
            };
            out.entry(key).or_default().push((t.sentence_idx, t.position, 1));
        }
        i += 1;
    }
    out
}

pub fn term_identification_oracle(docs: usize, seed: u64) -> Check {
    let res = resources();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut collocations = 0;
    for n in 0..docs {
        let text = random_document(&mut rng, 30);
        let tokens = tokenize(&text, &res.stopwords);
        ensure!(tokens.len() <= 30, "doc {n} has {} tokens", tokens.len());
        let doc = tag_document(&tokens, &FrequencyTagger, &res.db).unwrap();
        let terms = identify_terms(&doc, &res.lexicon, &res.db);
        let mut got = Found::new();
        for t in terms.all() {
            got.insert(
                (t.kind, t.lemma.clone(), t.pos),
                t.occurrences
                    .iter()
                    .map(|o| (o.sentence_idx, o.position, o.span))
                    .collect(),
            );
        }
        let want = oracle_identify(&doc, &res.db);
        ensure!(got == want, "doc {n} `{text}`: {got:?} vs {want:?}");
        collocations += terms.collocations.len();

        // partition: every non-stopword token is covered exactly once
        let mut cover = vec![0usize; doc.len()];
        for t in terms.all() {
            for o in &t.occurrences {
                for c in &mut cover[o.position..o.position + o.span] {
                    *c += 1;
                }
                if t.kind != TermKind::Collocation {
                    ensure!(!doc[o.position].token.is_stopword, "doc {n}: stopword indexed");
                }
            }
        }
        for (i, c) in cover.iter().enumerate() {
            ensure!(*c <= 1, "doc {n}: token {i} covered {c} times");
            ensure!(doc[i].token.is_stopword || *c == 1, "doc {n}: token {i} uncovered");
        }
        // longest match: no simple or orphan occurrence starts a collocation
        for t in terms.simple.iter().chain(&terms.orphans) {
            for o in &t.occurrences {
                ensure!(
                    match_at(&doc, o.position, &res.lexicon, &res.db).is_none(),
                    "doc {n}: rescan at {}",
                    o.position
                );
            }
        }
    }
    Ok(format!(
        "{docs} random documents, {collocations} collocation terms, partition and longest-match hold"
    ))
}

// ---------------------------------------------------------------- disambiguation

type Key = (String, PartOfSpeech);

pub struct OracleAnnotation {
    pub domain: String,
    pub synset: SynsetId,
    pub domain_score: f64,
    pub sense_score: f64,
}

fn first_max(scores: &[f64]) -> Option<usize> {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().position(|s| *s >= m - 1e-9 * m.abs())
}

/// Scores every candidate domain and sense of every term from scratch.
pub fn oracle_disambiguate(
    res: &Resources,
    text: &str,
    wn: &OracleWordNet,
    od: &OracleDomains,
) -> BTreeMap<(String, PartOfSpeech), OracleAnnotation> {
    let report = res.process("oracle", text).unwrap();
    let ctx = contexts(&report.terms);
    let senses = |lemma: &str, pos| wn.senses.get(&(lemma.to_string(), pos)).cloned().unwrap_or_default();
    let candidates = |ss: &[SynsetId]| {
        let mut out: Vec<String> = Vec::new();
        for s in ss {
            let mut labels = od.domains_of(*s);
            labels.sort();
            for l in labels {
                if od.scorable(&l) && l != "factotum" && !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    };
    let concepts: Vec<_> = report
        .terms
        .collocations
        .iter()
        .chain(&report.terms.simple)
        .filter(|t| !senses(&t.lemma, t.pos).is_empty())
        .collect();
    let is_concept = |k: &Key| concepts.iter().any(|t| t.lemma == k.0 && t.pos == k.1);
    let others = |t: &TermInstance| -> Vec<Key> {
        ctx.global[&t.key()]
            .terms
            .iter()
            .map(|k| (k.lemma.clone(), k.pos))
            .filter(|k| (k.0.as_str(), k.1) != (t.lemma.as_str(), t.pos) && is_concept(k))
            .collect()
    };

    let mut level2: BTreeMap<Key, (String, f64, bool, Vec<SynsetId>)> = BTreeMap::new();
    for t in &concepts {
        let ss = senses(&t.lemma, t.pos);
        let cands = candidates(&ss);
        let (domain, score, fallback) = if t.kind == TermKind::Collocation && ss.len() == 1 {
            match cands.first() {
                Some(d) => (d.clone(), 0.0, false),
                None => ("factotum".to_string(), 0.0, true),
            }
        } else {
            let scores: Vec<f64> = cands
                .iter()
                .map(|d| {
                    let mut total = 0.0;
                    for o in others(t) {
                        for l in candidates(&senses(&o.0, o.1)) {
                            total += od.wup(d, &l);
                        }
                    }
                    total
                })
                .collect();
            match first_max(&scores) {
                Some(i) => (cands[i].clone(), scores[i], false),
                None => ("factotum".to_string(), 0.0, true),
            }
        };
        let restricted = if fallback {
            ss.clone()
        } else {
            ss.iter()
                .copied()
                .filter(|s| od.domains_of(*s).contains(&domain))
                .collect()
        };
        level2.insert((t.lemma.clone(), t.pos), (domain, score, fallback, restricted));
    }

    let mut out = BTreeMap::new();
    for t in &concepts {
        let key = (t.lemma.clone(), t.pos);
        let (domain, domain_score, _, restricted) = &level2[&key];
        let (synset, sense_score) = if restricted.len() == 1 {
            (restricted[0], 0.0)
        } else {
            let scores: Vec<f64> = restricted
                .iter()
                .map(|c| {
                    let mut total = 0.0;
                    for o in others(t) {
                        for s in &level2[&o].3 {
                            total += wn.resnik(*c, *s);
                        }
                    }
                    total
                })
                .collect();
            let i = first_max(&scores).unwrap();
            (restricted[i], scores[i])
        };
        out.insert(
            key,
            OracleAnnotation {
                domain: domain.clone(),
                synset,
                domain_score: *domain_score,
                sense_score,
            },
        );
    }
    out
}

pub const WSD_DOCS: &[&str] = &[
    FINANCE,
    RIVER,
    "The pilot put the plane into a bank over the river and the water below.",
    "She deposited the check at the savings bank and took the money home.",
    "The doctor drove the car to the hospital. The patient was treated with medicine.",
    "The bank lent money to the garden center. The tree by the river grew.",
];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn wsd_oracle(seed: u64) -> Check {
    let res = resources();
    let wn = OracleWordNet::load(&fixture_dir());
    let mapping = std::fs::read_to_string(fixture_dir().join("domains.map")).unwrap();
    let od = OracleDomains::parse(BUNDLED_HIERARCHY, &mapping);
    let mut rng = StdRng::seed_from_u64(seed);
    let factors: Vec<f64> = (0..3).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
    let mut checked = 0;
    for text in WSD_DOCS {
        let report = res.process("d", text).unwrap();
        let ambiguous = report
            .terms
            .all()
            .filter(|t| res.db.senses(&t.lemma, t.pos).len() > 1)
            .count();
        ensure!(ambiguous <= 6, "`{text}` has {ambiguous} ambiguous terms");
        let want = oracle_disambiguate(&res, text, &wn, &od);
        let got = &report.disambiguation.annotations;
        ensure!(
            got.len() == want.len(),
            "`{text}`: {} annotations vs {}",
            got.len(),
            want.len()
        );
        for a in got {
            let w = &want[&(a.term.lemma.clone(), a.term.pos)];
            ensure!(
                a.domain == w.domain && a.synset == w.synset,
                "`{text}` {}: {}/{} vs {}/{}",
                a.term.lemma,
                a.domain,
                a.synset,
                w.domain,
                w.synset
            );
            ensure!(
                close(a.domain_score, w.domain_score) && close(a.sense_score, w.sense_score),
                "`{text}` {}: scores differ",
                a.term.lemma
            );
            checked += 1;
        }
        let ctx = contexts(&report.terms);
        for f in &factors {
            let rel = ScaledRelatedness {
                inner: StandardRelatedness::new(&res.db, &res.domains, &res.ic),
                factor: *f,
            };
            let scaled = disambiguate(&report.terms, &ctx, &res.db, &res.domains, &rel);
            for (x, y) in scaled.annotations.iter().zip(got) {
                ensure!(
                    x.domain == y.domain && x.synset == y.synset,
                    "`{text}` {} flips under scale {f}",
                    x.term.lemma
                );
            }
        }
    }
    Ok(format!(
        "{} documents, {checked} annotations match; scale factors {:.4}, {:.4}, {:.4}",
        WSD_DOCS.len(),
        factors[0],
        factors[1],
        factors[2]
    ))
}

pub const BANK_SENSE_1: u32 = 8420278;

pub fn bank_demonstration() -> Check {
    let res = resources();
    let wn = OracleWordNet::load(&fixture_dir());
    let mapping = std::fs::read_to_string(fixture_dir().join("domains.map")).unwrap();
    let od = OracleDomains::parse(BUNDLED_HIERARCHY, &mapping);
    let first = res.db.senses("bank", PartOfSpeech::Noun)[0];
    ensure!(first.offset == BANK_SENSE_1, "sense 1 of bank is {first}");
    let oracle = oracle_disambiguate(&res, FINANCE, &wn, &od);
    let o = &oracle[&("bank".to_string(), PartOfSpeech::Noun)];
    ensure!(
        o.domain == "economy" && o.synset == first,
        "oracle picks {}/{}",
        o.domain,
        o.synset
    );
    let report = res.process("finance", FINANCE).unwrap();
    let a = report
        .disambiguation
        .annotations
        .iter()
        .find(|a| a.term.lemma == "bank" && a.term.pos == PartOfSpeech::Noun)
        .ok_or("bank not annotated")?;
    ensure!(
        a.domain == "economy" && a.synset == first,
        "engine picks {}/{}",
        a.domain,
        a.synset
    );
    Ok(format!(
        "bank -> economy / {} (sense 1), sense score {:.4}",
        a.synset, a.sense_score
    ))
}

// ---------------------------------------------------------------- weighting

pub const CORPUS: &[(&str, &str)] = &[
    (
        "d01",
        "The doctor drove his car to the hospital. The car was fast and the doctor was late.",
    ),
    ("d02", "A doctor repaired the old car in the garden."),
    ("d03", "The car hit a tree and the doctor treated the patient."),
    ("d04", "The bank accepts deposits of money and lends money to people."),
    ("d05", "He sat on the bank of the river and watched the water."),
    ("d06", "The river flows down the slope into the stream."),
    ("d07", "The pilot flew the plane over the river. The plane made a bank."),
    ("d08", "Flowers grow in the garden under the tree."),
    ("d09", "The savings bank keeps money for the children."),
    (
        "d10",
        "The financial institution cashed the check and paid interest on the loan.",
    ),
];

pub fn corpus() -> Vec<(String, String)> {
    CORPUS.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn weighting_laws() -> Check {
    let res = resources();
    let docs = corpus();
    let analyses = res
        .analyze_corpus(&docs, Representation::Semantic)
        .map_err(|e| e.to_string())?;

    // alpha = 1: cc orders concepts exactly as normalized tf does
    let cfg = WeightingConfig {
        alpha: 1.0,
        threshold: ThresholdMode::Absolute(0.5),
        ..Default::default()
    };
    let index = Index::build(analyses.clone(), Representation::Semantic, cfg).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for d in &docs {
        let rows = index.inspect(&d.0).unwrap();
        for x in &rows {
            for y in &rows {
                ensure!(
                    x.cc.total_cmp(&y.cc) == x.tf.total_cmp(&y.tf),
                    "{}: {} vs {}",
                    d.0,
                    x.unit,
                    y.unit
                );
                compared += 1;
            }
        }
    }

    // idc = N / max(1, n), bit for bit
    let default = Index::build(analyses.clone(), Representation::Semantic, WeightingConfig::default())
        .map_err(|e| e.to_string())?;
    let s = &default.stats;
    for u in s.df.keys() {
        let n = s.n_central.get(u).copied().unwrap_or(0);
        let want = f64::from(s.n_docs) / f64::from(n.max(1));
        ensure!(s.idc(u).to_bits() == want.to_bits(), "idc of {u}");
    }
    let unseen = IndexUnit::Orphan("never-indexed".into());
    ensure!(s.idc(&unseen).to_bits() == f64::from(s.n_docs).to_bits(), "clamped idc");

    // two passes from scratch give identical bytes, as does a save/load round trip
    let rebuilt = Index::build_from_corpus(
        &resources(),
        &docs,
        Representation::Semantic,
        WeightingConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let bytes = default.to_bytes();
    ensure!(rebuilt.to_bytes() == bytes, "rebuild differs");
    let reloaded = Index::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let reweighted = reloaded
        .reweight(WeightingConfig::default())
        .map_err(|e| e.to_string())?;
    ensure!(reweighted.to_bytes() == bytes, "recomputed stats differ");
    Ok(format!(
        "{compared} cc/tf pairs ordered alike, {} idc values exact, rebuild of {} bytes identical",
        s.df.len(),
        bytes.len()
    ))
}

// ---------------------------------------------------------------- evaluation

pub const MICRO_SEEDS: [u64; 5] = [11, 23, 37, 41, 59];

/// A random run and qrels: up to 5 queries over up to 20 documents,
/// distinct scores, some queries with no relevant documents.
pub fn micro_run(seed: u64) -> (RunList, Qrels) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut run = RunList::new("micro");
    let mut qrels = Qrels::default();
    let queries = rng.gen_range(2..=5);
    for q in 1..=queries {
        let qid = format!("q{q}");
        let pool = rng.gen_range(4..=20);
        let mut docs: Vec<String> = (1..=pool).map(|d| format!("doc{d:02}")).collect();
        for d in &docs {
            let rel = if rng.gen_bool(0.35) { rng.gen_range(1..=2) } else { 0 };
            qrels.insert(&qid, d, rel);
        }
        if q == queries && queries > 2 {
            // judged but without any relevant document
            for d in &docs {
                qrels.insert(&qid, d, 0);
            }
        }
        let shown = rng.gen_range(1..=pool);
        for i in (1..docs.len()).rev() {
            docs.swap(i, rng.gen_range(0..=i));
        }
        docs.truncate(shown);
        let n = docs.len();
        run.push_ranked(
            &qid,
            docs.into_iter().enumerate().map(|(i, d)| (d, (n - i) as f64 + 0.5)),
        );
    }
    (run, qrels)
}

/// Straight from the definitions, reading ranks off the run.
pub fn brute_force_scores(run: &RunList, qrels: &Qrels, cutoffs: &[usize]) -> (Vec<f64>, f64) {
    let mut p_sum = vec![0.0; cutoffs.len()];
    let mut ap_sum = 0.0;
    let mut n = 0;
    for (qid, entries) in &run.queries {
        let Some(judged) = qrels.judgments.get(qid) else {
            continue;
        };
        let relevant: Vec<&String> = judged.iter().filter(|(_, r)| **r > 0).map(|(d, _)| d).collect();
        if relevant.is_empty() {
            continue;
        }
        n += 1;
        let mut by_rank: Vec<_> = entries.iter().collect();
        by_rank.sort_by_key(|e| e.rank);
        let is_rel: Vec<bool> = by_rank.iter().map(|e| relevant.contains(&&e.doc_id)).collect();
        for (k, x) in cutoffs.iter().enumerate() {
            let hits = (0..*x).filter(|i| is_rel.get(*i).copied().unwrap_or(false)).count();
            p_sum[k] += hits as f64 / *x as f64;
        }
        let mut ap = 0.0;
        for (r, rel) in is_rel.iter().enumerate() {
            if *rel {
                let above = is_rel[..=r].iter().filter(|b| **b).count();
                ap += above as f64 / (r + 1) as f64;
            }
        }
        ap_sum += ap / relevant.len() as f64;
    }
    let n = n.max(1) as f64;
    (p_sum.into_iter().map(|p| p / n).collect(), ap_sum / n)
}

/// Reference values from trec_eval 9 (`-m map -m P`), frozen per seed:
/// `(map, [P_5, P_10, P_15, P_20, P_30, P_100])`.
pub const TREC_EVAL_REFERENCE: [(u64, f64, [f64; 6]); 5] = [
    (11, 0.422619, [0.3, 0.25, 0.166667, 0.125, 0.083333, 0.025]),
    (23, 0.382867, [0.4, 0.35, 0.3, 0.225, 0.15, 0.045]),
    (37, 0.500000, [0.1, 0.05, 0.033333, 0.025, 0.016667, 0.005]),
    (41, 0.083333, [0.1, 0.05, 0.033333, 0.025, 0.016667, 0.005]),
    (59, 0.335185, [0.266667, 0.2, 0.133333, 0.1, 0.066667, 0.02]),
];

pub const TREC_CUTOFFS: [usize; 6] = [5, 10, 15, 20, 30, 100];

pub fn evaluation_parity() -> Check {
    for seed in MICRO_SEEDS {
        let (run, qrels) = micro_run(seed);
        let eval = evalkit::evaluate(&run, &qrels, &evalkit::DEFAULT_CUTOFFS).map_err(|e| e.to_string())?;
        let (p, map) = brute_force_scores(&run, &qrels, &evalkit::DEFAULT_CUTOFFS);
        ensure!(
            eval.map() == map,
            "seed {seed}: MAP {} vs brute force {map}",
            eval.map()
        );
        for (k, want) in p.iter().enumerate() {
            ensure!(
                eval.precision_at(k) == *want,
                "seed {seed}: P@{}",
                evalkit::DEFAULT_CUTOFFS[k]
            );
        }
        let (_, ref_map, ref_p) = TREC_EVAL_REFERENCE
            .iter()
            .find(|r| r.0 == seed)
            .ok_or("missing reference")?;
        ensure!(
            (eval.map() - ref_map).abs() < 5e-5,
            "seed {seed}: MAP {} vs trec_eval {ref_map}",
            eval.map()
        );
        for (x, want) in TREC_CUTOFFS.iter().zip(ref_p) {
            let k = evalkit::DEFAULT_CUTOFFS.iter().position(|c| c == x).unwrap();
            ensure!(
                (eval.precision_at(k) - want).abs() < 5e-5,
                "seed {seed}: P@{x} vs trec_eval {want}"
            );
        }
    }
    // relevant {d1, d3}, ranking d1 d2 d3: (1 + 2/3) / 2
    let mut run = RunList::new("hand");
    run.push_ranked(
        "1",
        [
            ("d1".to_string(), 3.0),
            ("d2".to_string(), 2.0),
            ("d3".to_string(), 1.0),
        ],
    );
    let mut qrels = Qrels::default();
    qrels.insert("1", "d1", 1);
    qrels.insert("1", "d2", 0);
    qrels.insert("1", "d3", 1);
    let map = evalkit::mean_average_precision(&run, &qrels);
    ensure!(format!("{map:.4}") == "0.8333", "hand MAP {map}");
    Ok(format!(
        "{} micro-runs match brute force exactly and trec_eval to 4 dp; hand MAP {map:.4}",
        MICRO_SEEDS.len()
    ))
}

// ---------------------------------------------------------------- synonymy

pub const SYNONYM_QUERY: &str = "automobile physician";
pub const SYNONYM_RELEVANT: [&str; 3] = ["d01", "d02", "d03"];

pub fn recall_at_5(index: &Index, res: &Resources) -> (f64, Vec<(String, f64)>) {
    let hits = index.search(res, "q", SYNONYM_QUERY, 10).unwrap_or_default();
    let top: Vec<&str> = hits.iter().take(5).map(|h| h.doc_id.as_str()).collect();
    let found = SYNONYM_RELEVANT.iter().filter(|d| top.contains(d)).count();
    (
        found as f64 / SYNONYM_RELEVANT.len() as f64,
        hits.into_iter().map(|h| (h.doc_id, h.score)).collect(),
    )
}

pub fn synonymy_benefit() -> Check {
    let start = Instant::now();
    let res = resources();
    let docs = corpus();
    for (id, text) in &docs {
        let lower = text.to_lowercase();
        if SYNONYM_RELEVANT.contains(&id.as_str()) {
            ensure!(
                !lower.contains("automobile") && !lower.contains("physician"),
                "{id} uses a query word"
            );
        }
    }
    let sem = Index::build_from_corpus(&res, &docs, Representation::Semantic, WeightingConfig::default())
        .map_err(|e| e.to_string())?;
    let classic_cfg = WeightingConfig {
        scheme: Scheme::TfIdf,
        ..Default::default()
    };
    let classic =
        Index::build_from_corpus(&res, &docs, Representation::Classic, classic_cfg).map_err(|e| e.to_string())?;
    let (r_sem, hits_sem) = recall_at_5(&sem, &res);
    let (r_classic, hits_classic) = recall_at_5(&classic, &res);
    for (d, score) in &hits_classic {
        ensure!(
            !SYNONYM_RELEVANT.contains(&d.as_str()) || *score == 0.0,
            "classic scores {d} at {score}"
        );
    }
    ensure!(r_sem > r_classic, "recall@5 semantic {r_sem} vs classic {r_classic}");
    // determinism
    let (again, hits_again) = recall_at_5(&sem, &res);
    ensure!(again == r_sem && hits_again == hits_sem, "second search differs");
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    Ok(format!(
        "recall@5 Sem-CC-IDC {r_sem:.3} > Classic-TF-IDF {r_classic:.3} in {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

// ---------------------------------------------------------------- TIME collection

pub const TIME_DOCS: usize = 423;
pub const REFERENCE_BEST_ALPHA: f64 = 0.2;

pub enum Gated {
    Ran(Check),
    Skipped(String),
}

pub struct TimeRun {
    pub documents: usize,
    pub build_secs: f64,
    pub matrix: SweepMatrix,
}

/// Ingests `TIME.ALL`, builds the cc-idc index, and sweeps alpha over
/// 0.1..0.9 with the `TIME.QUE` queries and `TIME.REL` judgments.
pub fn time_pipeline(dir: &Path, res: &Resources) -> Result<TimeRun, String> {
    let docs = ingest_corpus(&dir.join("TIME.ALL"), CorpusFormat::TimeMagazine).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let index = Index::build_from_corpus(res, &docs, Representation::Semantic, WeightingConfig::default())
        .map_err(|e| e.to_string())?;
    let build_secs = start.elapsed().as_secs_f64();
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"));
    let queries = parse_time_queries(&read("TIME.QUE")?, "TIME.QUE").map_err(|e| e.to_string())?;
    let qrels = Qrels::from_time_rel(&read("TIME.REL")?, "TIME.REL").map_err(|e| e.to_string())?;
    let qs = QuerySet::analyze(res, &queries, &index).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
    let matrix = sweep_alpha(&index, &qs, &qrels, &grid, &evalkit::DEFAULT_CUTOFFS, 1000).map_err(|e| e.to_string())?;
    Ok(TimeRun {
        documents: docs.len(),
        build_secs,
        matrix,
    })
}

/// Writes the matrix plus a note on whether its best alpha is the published one.
pub fn write_sweep_artifact(run: &TimeRun, path: &Path) -> String {
    let best = run.matrix.best_map_alpha();
    let note = match best {
        Some(a) if (a - REFERENCE_BEST_ALPHA).abs() < 1e-9 => {
            format!("best MAP alpha {a} matches the published {REFERENCE_BEST_ALPHA}")
        }
        Some(a) => format!("best MAP alpha {a} differs from the published {REFERENCE_BEST_ALPHA}"),
        None => "no MAP row".to_string(),
    };
    let body = format!(
        "# documents {}\n# build seconds {:.1}\n# {note}\n{}",
        run.documents,
        run.build_secs,
        run.matrix.to_tsv()
    );
    std::fs::write(path, body).unwrap();
    note
}

pub fn time_smoke() -> Gated {
    let (Some(time), Some(wn)) = (
        std::env::var_os("CONCEPTIR_TIME_DIR"),
        std::env::var_os("CONCEPTIR_WORDNET_DIR"),
    ) else {
        return Gated::Skipped("set CONCEPTIR_TIME_DIR and CONCEPTIR_WORDNET_DIR to run".into());
    };
    let time = std::path::PathBuf::from(time);
    if !time.join("TIME.ALL").is_file() {
        return Gated::Skipped(format!("{} has no TIME.ALL", time.display()));
    }
    let cfg = EngineConfig {
        wordnet_dir: Some(wn.into()),
        domains_map: std::env::var_os("CONCEPTIR_DOMAINS_MAP").map(Into::into),
        domains_translation: std::env::var_os("CONCEPTIR_DOMAINS_TRANSLATION").map(Into::into),
        ..Default::default()
    };
    let res = match Resources::from_config(&cfg) {
        Ok(r) => r,
        Err(e) => return Gated::Ran(Err(e.to_string())),
    };
    Gated::Ran((|| {
        let run = time_pipeline(&time, &res)?;
        ensure!(run.documents == TIME_DOCS, "ingested {} documents", run.documents);
        ensure!(run.build_secs < 600.0, "build took {:.0} s", run.build_secs);
        ensure!(
            run.matrix.alphas.len() == 9,
            "sweep has {} columns",
            run.matrix.alphas.len()
        );
        let artifact = Path::new(env!("CARGO_TARGET_TMPDIR")).join("time_alpha_sweep.tsv");
        let note = write_sweep_artifact(&run, &artifact);
        let mapped = if cfg.domains_map.is_some() {
            ""
        } else {
            " (no domain mapping given)"
        };
        Ok(format!(
            "{} documents, build {:.1} s, 9-column sweep in {}; {note}{mapped}",
            run.documents,
            run.build_secs,
            artifact.display()
        ))
    })())
}
