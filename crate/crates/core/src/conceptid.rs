//! Index-term identification: collocations, WordNet simple words and
//! orphan keywords, plus the per-sentence and per-document term contexts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::lexdb::{LexicalDb, PartOfSpeech};
use crate::textprep::TaggedToken;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Collocation,
    Simple,
    Orphan,
}

impl TermKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TermKind::Collocation => "collocation",
            TermKind::Simple => "simple",
            TermKind::Orphan => "orphan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub sentence_idx: usize,
    pub position: usize,
    /// Number of tokens covered.
    pub span: usize,
}

/// A lemma together with its part of speech; the identity of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub lemma: String,
    pub pos: PartOfSpeech,
}

impl TermKey {
    pub fn new(lemma: impl Into<String>, pos: PartOfSpeech) -> Self {
        TermKey {
            lemma: lemma.into(),
            pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermInstance {
    pub lemma: String,
    pub pos: PartOfSpeech,
    pub kind: TermKind,
    /// In document order.
    pub occurrences: Vec<Occurrence>,
}

impl TermInstance {
    pub fn key(&self) -> TermKey {
        TermKey::new(self.lemma.clone(), self.pos)
    }

    pub fn count(&self) -> usize {
        self.occurrences.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collocation {
    /// Underscore-joined, as stored in WordNet.
    pub lemma: String,
    pub words: Vec<String>,
    pub pos: PartOfSpeech,
}

/// Every multiword WordNet lemma, filed under its first word.
#[derive(Debug, Clone, Default)]
pub struct CollocationLexicon {
    by_first_word: HashMap<String, Vec<Collocation>>,
}

impl CollocationLexicon {
    /// Merges all parts of speech; a lemma listed under several keeps the
    /// first of noun, verb, adjective, adverb.
    pub fn build(db: &LexicalDb) -> Self {
        let mut seen: HashMap<String, PartOfSpeech> = HashMap::new();
        for pos in PartOfSpeech::ALL {
            for lemma in db.lemmas(pos) {
                if lemma.contains('_') {
                    seen.entry(lemma.to_string()).or_insert(pos);
                }
            }
        }
        let mut by_first_word: HashMap<String, Vec<Collocation>> = HashMap::new();
        for (lemma, pos) in seen {
            let words: Vec<String> = lemma.split('_').map(str::to_string).collect();
            if words.len() < 2 || words.iter().any(String::is_empty) {
                continue;
            }
            by_first_word
                .entry(words[0].clone())
                .or_default()
                .push(Collocation { lemma, words, pos });
        }
        for entries in by_first_word.values_mut() {
            entries.sort_by(|a, b| b.words.len().cmp(&a.words.len()).then_with(|| a.lemma.cmp(&b.lemma)));
        }
        CollocationLexicon { by_first_word }
    }

    /// Candidates starting with `word`, longest first.
    pub fn candidates(&self, word: &str) -> &[Collocation] {
        self.by_first_word.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_first_word.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_first_word.is_empty()
    }

    pub fn first_words(&self) -> impl Iterator<Item = &str> {
        self.by_first_word.keys().map(String::as_str)
    }
}

/// The three disjoint term sets of a document, each sorted by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentifiedTerms {
    pub collocations: Vec<TermInstance>,
    pub simple: Vec<TermInstance>,
    pub orphans: Vec<TermInstance>,
}

impl IdentifiedTerms {
    pub fn all(&self) -> impl Iterator<Item = &TermInstance> {
        self.collocations.iter().chain(&self.simple).chain(&self.orphans)
    }
}

/// Forms under which a head token may start a collocation: its normalized
/// form and every base form morphy finds for it.
fn head_variants(norm: &str, db: &LexicalDb) -> Vec<String> {
    let mut out = vec![norm.to_string()];
    for pos in PartOfSpeech::ALL {
        for lemma in db.morphy(norm, pos) {
            if !out.contains(&lemma) {
                out.push(lemma);
            }
        }
    }
    out
}

/// The longest collocation starting at token `i`, if any. Following tokens
/// must match exactly and lie in the same sentence.
pub fn match_at<'a>(
    doc: &[TaggedToken],
    i: usize,
    lex: &'a CollocationLexicon,
    db: &LexicalDb,
) -> Option<&'a Collocation> {
    let head = &doc[i].token;
    let mut candidates: Vec<&Collocation> = head_variants(&head.norm, db)
        .iter()
        .flat_map(|v| lex.candidates(v))
        .collect();
    candidates.sort_by(|a, b| b.words.len().cmp(&a.words.len()).then_with(|| a.lemma.cmp(&b.lemma)));
    candidates.into_iter().find(|c| {
        let n = c.words.len();
        i + n <= doc.len()
            && doc[i + 1..i + n]
                .iter()
                .zip(&c.words[1..])
                .all(|(t, w)| t.token.sentence_idx == head.sentence_idx && t.token.norm == *w)
    })
}

/// Left-to-right scan: collocations (longest first), then simple words
/// with an entry for their tagged part of speech, then orphans.
pub fn identify_terms(doc: &[TaggedToken], lex: &CollocationLexicon, db: &LexicalDb) -> IdentifiedTerms {
    let mut found: BTreeMap<(TermKind, TermKey), Vec<Occurrence>> = BTreeMap::new();
    let mut i = 0;
    while i < doc.len() {
        let token = &doc[i].token;
        let occurrence = |span| Occurrence {
            sentence_idx: token.sentence_idx,
            position: token.position,
            span,
        };
        if let Some(c) = match_at(doc, i, lex, db) {
            found
                .entry((TermKind::Collocation, TermKey::new(c.lemma.clone(), c.pos)))
                .or_default()
                .push(occurrence(c.words.len()));
            i += c.words.len();
            continue;
        }
        if !token.is_stopword {
            let simple = doc[i]
                .pos
                .and_then(|pos| db.morphy(&token.norm, pos).into_iter().next().map(|l| (l, pos)));
            let entry = match simple {
                Some((lemma, pos)) => (TermKind::Simple, TermKey::new(lemma, pos)),
                None => (TermKind::Orphan, TermKey::new(token.norm.clone(), PartOfSpeech::Noun)),
            };
            found.entry(entry).or_default().push(occurrence(1));
        }
        i += 1;
    }
    let mut terms = IdentifiedTerms::default();
    for ((kind, key), occurrences) in found {
        let instance = TermInstance {
            lemma: key.lemma,
            pos: key.pos,
            kind,
            occurrences,
        };
        match kind {
            TermKind::Collocation => terms.collocations.push(instance),
            TermKind::Simple => terms.simple.push(instance),
            TermKind::Orphan => terms.orphans.push(instance),
        }
    }
    terms
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalContext {
    pub sentence_idx: usize,
    pub terms: BTreeSet<TermKey>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalContext {
    pub key: TermKey,
    pub terms: BTreeSet<TermKey>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Contexts {
    pub local: BTreeMap<usize, LocalContext>,
    pub global: BTreeMap<TermKey, GlobalContext>,
}

/// Local context per sentence and global context per (lemma, pos).
pub fn contexts(terms: &IdentifiedTerms) -> Contexts {
    let mut local: BTreeMap<usize, LocalContext> = BTreeMap::new();
    for term in terms.all() {
        for occ in &term.occurrences {
            local
                .entry(occ.sentence_idx)
                .or_insert_with(|| LocalContext {
                    sentence_idx: occ.sentence_idx,
                    terms: BTreeSet::new(),
                })
                .terms
                .insert(term.key());
        }
    }
    let mut global: BTreeMap<TermKey, GlobalContext> = BTreeMap::new();
    for term in terms.all() {
        let key = term.key();
        let ctx = global.entry(key.clone()).or_insert_with(|| GlobalContext {
            key,
            terms: BTreeSet::new(),
        });
        for occ in &term.occurrences {
            ctx.terms.extend(local[&occ.sentence_idx].terms.iter().cloned());
        }
    }
    Contexts { local, global }
}

/// `term<TAB>kind<TAB>count` lines in key order.
pub fn dump_terms(terms: &IdentifiedTerms) -> String {
    let mut out = String::new();
    for t in terms.all() {
        out.push_str(&format!("{}\t{}\t{}\n", t.lemma, t.kind.as_str(), t.count()));
    }
    out
}
