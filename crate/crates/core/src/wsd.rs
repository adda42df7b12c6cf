//! Domain-then-sense disambiguation of identified terms.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::conceptid::{Contexts, IdentifiedTerms, TermInstance, TermKey, TermKind};
use crate::lexdb::{DomainDb, LexicalDb, SynsetId, FACTOTUM};
use crate::similarity::{is_scorable_domain, wup_domain, InformationContent};

#[derive(Debug, thiserror::Error)]
pub enum WsdError {
    #[error("term `{0}` has no senses")]
    NoSenses(String),
}

/// Pairwise relatedness used by the two scoring levels.
pub trait Relatedness {
    fn domain(&self, a: &str, b: &str) -> f64;
    fn sense(&self, a: SynsetId, b: SynsetId) -> f64;
}

/// Wu-Palmer over domains, Resnik over synsets, with a per-instance cache.
pub struct StandardRelatedness<'a> {
    db: &'a LexicalDb,
    domains: &'a DomainDb,
    ic: &'a InformationContent,
    cache: RefCell<HashMap<(SynsetId, SynsetId), f64>>,
}

impl<'a> StandardRelatedness<'a> {
    pub fn new(db: &'a LexicalDb, domains: &'a DomainDb, ic: &'a InformationContent) -> Self {
        StandardRelatedness {
            db,
            domains,
            ic,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

impl Relatedness for StandardRelatedness<'_> {
    fn domain(&self, a: &str, b: &str) -> f64 {
        wup_domain(a, b, self.domains).unwrap_or(0.0)
    }

    fn sense(&self, a: SynsetId, b: SynsetId) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(v) = self.cache.borrow().get(&key) {
            return *v;
        }
        let v = self.ic.resnik(a, b, self.db).unwrap_or(0.0);
        self.cache.borrow_mut().insert(key, v);
        v
    }
}

/// Multiplies every value of an inner measure by a constant.
pub struct ScaledRelatedness<R> {
    pub inner: R,
    pub factor: f64,
}

impl<R: Relatedness> Relatedness for ScaledRelatedness<R> {
    fn domain(&self, a: &str, b: &str) -> f64 {
        self.factor * self.inner.domain(a, b)
    }

    fn sense(&self, a: SynsetId, b: SynsetId) -> f64 {
        self.factor * self.inner.sense(a, b)
    }
}

/// Strictly greater beyond a relative tolerance, so that summation-order
/// noise under rescaling cannot flip a tie.
pub fn beats(score: f64, best: f64) -> bool {
    score - best > 1e-12 * score.abs().max(best.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainChoice {
    pub domain: String,
    pub score: f64,
    /// Set when no sense had a comparable domain.
    pub fallback: bool,
}

impl DomainChoice {
    fn factotum() -> Self {
        DomainChoice {
            domain: FACTOTUM.to_string(),
            score: 0.0,
            fallback: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptAnnotation {
    pub term: TermInstance,
    pub domain: String,
    pub synset: SynsetId,
    pub domain_score: f64,
    pub sense_score: f64,
    pub fallback: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Disambiguation {
    pub annotations: Vec<ConceptAnnotation>,
    /// Orphan keywords plus terms demoted for lack of senses.
    pub orphans: Vec<TermInstance>,
}

/// Distinct comparable domains over `senses`, ranked by the first sense
/// carrying them, then by name.
pub fn candidate_domains(senses: &[SynsetId], domains: &DomainDb) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in senses {
        let mut labels: Vec<&String> = domains.domains_of(*s).iter().collect();
        labels.sort();
        for label in labels {
            if is_scorable_domain(label, domains) && !out.contains(label) {
                out.push(label.clone());
            }
        }
    }
    out
}

/// Level 2: the candidate domain most related to the context terms'
/// domains. `context` holds the candidate domains of each other term.
pub fn select_domain(
    lemma: &str,
    senses: &[SynsetId],
    context: &[Vec<String>],
    domains: &DomainDb,
    rel: &dyn Relatedness,
) -> Result<DomainChoice, WsdError> {
    if senses.is_empty() {
        return Err(WsdError::NoSenses(lemma.to_string()));
    }
    let candidates = candidate_domains(senses, domains);
    let mut best: Option<DomainChoice> = None;
    for d in candidates {
        let score: f64 = context
            .iter()
            .map(|labels| labels.iter().map(|l| rel.domain(&d, l)).sum::<f64>())
            .sum();
        if best.as_ref().is_none_or(|b| beats(score, b.score)) {
            best = Some(DomainChoice {
                domain: d,
                score,
                fallback: false,
            });
        }
    }
    Ok(best.unwrap_or_else(DomainChoice::factotum))
}

/// Senses kept after level 2: those carrying the chosen domain, or every
/// sense under the factotum fallback.
pub fn restrict_senses(senses: &[SynsetId], choice: &DomainChoice, domains: &DomainDb) -> Vec<SynsetId> {
    if choice.fallback {
        return senses.to_vec();
    }
    senses
        .iter()
        .copied()
        .filter(|s| domains.domains_of(*s).contains(&choice.domain))
        .collect()
}

/// Level 3: the candidate with the largest summed relatedness to the
/// restricted senses of the context terms; ties keep the lower sense number.
pub fn select_sense(
    candidates: &[SynsetId],
    context: &[Vec<SynsetId>],
    rel: &dyn Relatedness,
) -> Option<(SynsetId, f64)> {
    if candidates.len() == 1 {
        return Some((candidates[0], 0.0));
    }
    let mut best: Option<(SynsetId, f64)> = None;
    for &c in candidates {
        let score: f64 = context
            .iter()
            .map(|set| set.iter().map(|s| rel.sense(c, *s)).sum::<f64>())
            .sum();
        if best.is_none_or(|(_, b)| beats(score, b)) {
            best = Some((c, score));
        }
    }
    best
}

struct Resolved {
    choice: DomainChoice,
    restricted: Vec<SynsetId>,
}

/// Runs both levels for every collocation and simple word of a document.
/// Each (lemma, pos) receives one annotation.
pub fn disambiguate(
    terms: &IdentifiedTerms,
    ctx: &Contexts,
    db: &LexicalDb,
    domains: &DomainDb,
    rel: &dyn Relatedness,
) -> Disambiguation {
    let mut out = Disambiguation {
        orphans: terms.orphans.clone(),
        ..Default::default()
    };
    let mut concepts: Vec<&TermInstance> = Vec::new();
    let mut senses_of: BTreeMap<TermKey, &[SynsetId]> = BTreeMap::new();
    for term in terms.collocations.iter().chain(&terms.simple) {
        let senses = db.senses(&term.lemma, term.pos);
        if senses.is_empty() {
            let mut demoted = term.clone();
            demoted.kind = TermKind::Orphan;
            out.orphans.push(demoted);
        } else {
            senses_of.insert(term.key(), senses);
            concepts.push(term);
        }
    }
    out.orphans.sort_by_key(|a| a.key());

    let raw_domains: BTreeMap<&TermKey, Vec<String>> = senses_of
        .iter()
        .map(|(k, s)| (k, candidate_domains(s, domains)))
        .collect();
    let others = |key: &TermKey| -> Vec<&TermKey> {
        ctx.global
            .get(key)
            .map(|g| {
                g.terms
                    .iter()
                    .filter(|t| *t != key && senses_of.contains_key(*t))
                    .collect()
            })
            .unwrap_or_default()
    };

    let mut resolved: BTreeMap<TermKey, Resolved> = BTreeMap::new();
    for term in &concepts {
        let key = term.key();
        let senses = senses_of[&key];
        let choice = if term.kind == TermKind::Collocation && senses.len() == 1 {
            candidate_domains(senses, domains)
                .into_iter()
                .next()
                .map(|domain| DomainChoice {
                    domain,
                    score: 0.0,
                    fallback: false,
                })
                .unwrap_or_else(DomainChoice::factotum)
        } else {
            let context: Vec<Vec<String>> = others(&key).into_iter().map(|k| raw_domains[k].clone()).collect();
            select_domain(&term.lemma, senses, &context, domains, rel).expect("terms without senses were demoted")
        };
        let restricted = restrict_senses(senses, &choice, domains);
        resolved.insert(key, Resolved { choice, restricted });
    }

    for term in concepts {
        let key = term.key();
        let r = &resolved[&key];
        let context: Vec<Vec<SynsetId>> = others(&key)
            .into_iter()
            .map(|k| resolved[k].restricted.clone())
            .collect();
        let (synset, sense_score) = select_sense(&r.restricted, &context, rel).expect("restricted set is never empty");
        out.annotations.push(ConceptAnnotation {
            term: term.clone(),
            domain: r.choice.domain.clone(),
            synset,
            domain_score: r.choice.score,
            sense_score,
            fallback: r.choice.fallback,
        });
    }
    out
}

/// `lemma<TAB>pos<TAB>domain<TAB>synset_offset<TAB>domain_score<TAB>sense_score` lines.
pub fn dump_annotations(d: &Disambiguation) -> String {
    let mut out = String::new();
    for a in &d.annotations {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:08}\t{}\t{}\n",
            a.term.lemma, a.term.pos, a.domain, a.synset.offset, a.domain_score, a.sense_score
        ));
    }
    out
}
