//! In-memory WordNet store: synsets, sense lists, exception lists and the
//! hypernym taxonomy, plus the WordNetDomains annotation in [`domains`].

mod domains;
mod morphy;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

pub use domains::{parse_translation, DomainDb, DomainError, DomainNode, FACTOTUM, TOP_LEVEL};

#[derive(Debug, thiserror::Error)]
pub enum LexError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed line {line} in {file}")]
    MalformedLine { file: String, line: usize },
    #[error("dangling pointer from {from} to {target}")]
    DanglingPointer { from: String, target: SynsetId },
    #[error("hypernym of {from} crosses part of speech ({target})")]
    CrossPosHypernym { from: SynsetId, target: SynsetId },
    #[error("hypernym cycle through {0}")]
    HypernymCycle(SynsetId),
    #[error("duplicate synset {0}")]
    DuplicateSynset(SynsetId),
    #[error("index entry {lemma} lists {synset} which does not contain it")]
    LemmaNotInSynset { lemma: String, synset: SynsetId },
    #[error("duplicate sense {synset} for {lemma}")]
    DuplicateSense { lemma: String, synset: SynsetId },
    #[error("synset {0} has no lemmas")]
    EmptySynset(SynsetId),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("no data files found under {0}")]
    MissingData(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl PartOfSpeech {
    pub const ALL: [PartOfSpeech; 4] = [
        PartOfSpeech::Noun,
        PartOfSpeech::Verb,
        PartOfSpeech::Adjective,
        PartOfSpeech::Adverb,
    ];

    pub fn letter(self) -> char {
        match self {
            PartOfSpeech::Noun => 'n',
            PartOfSpeech::Verb => 'v',
            PartOfSpeech::Adjective => 'a',
            PartOfSpeech::Adverb => 'r',
        }
    }

    /// Accepts the satellite marker `s` as an adjective.
    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'n' => Some(PartOfSpeech::Noun),
            'v' => Some(PartOfSpeech::Verb),
            'a' | 's' => Some(PartOfSpeech::Adjective),
            'r' => Some(PartOfSpeech::Adverb),
            _ => None,
        }
    }

    /// Suffix used by the WordNet file names (`index.noun`, `adj.exc`).
    pub fn file_suffix(self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "noun",
            PartOfSpeech::Verb => "verb",
            PartOfSpeech::Adjective => "adj",
            PartOfSpeech::Adverb => "adv",
        }
    }

    /// Only nouns and verbs carry an is-a hierarchy.
    pub fn has_hierarchy(self) -> bool {
        matches!(self, PartOfSpeech::Noun | PartOfSpeech::Verb)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for PartOfSpeech {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "n" | "noun" => Ok(PartOfSpeech::Noun),
            "v" | "verb" => Ok(PartOfSpeech::Verb),
            "a" | "s" | "adj" | "adjective" => Ok(PartOfSpeech::Adjective),
            "r" | "adv" | "adverb" => Ok(PartOfSpeech::Adverb),
            _ => Err(format!("unknown part of speech `{s}`")),
        }
    }
}

/// Database key of a synset: part of speech plus byte offset in `data.pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub pos: PartOfSpeech,
    pub offset: u32,
}

impl SynsetId {
    pub fn new(pos: PartOfSpeech, offset: u32) -> Self {
        SynsetId { pos, offset }
    }
}

/// Formats as `08420278-n`, the key used by the domain mapping files.
impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.letter())
    }
}

impl FromStr for SynsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (offset, pos) = s
            .split_once('-')
            .ok_or_else(|| format!("synset id `{s}` lacks a `-pos` suffix"))?;
        let offset = offset
            .parse::<u32>()
            .map_err(|_| format!("bad synset offset in `{s}`"))?;
        let mut chars = pos.chars();
        let pos = match (chars.next(), chars.next()) {
            (Some(c), None) => PartOfSpeech::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| format!("bad part of speech in `{s}`"))?;
        Ok(SynsetId { pos, offset })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    /// Lowercase, underscore-joined for multiword lemmas.
    pub lemmas: Vec<String>,
    pub gloss: String,
    /// Is-a parents (`@` and `@i` pointers).
    pub hypernyms: Vec<SynsetId>,
    /// Sum of the tagged-corpus counts of the synset's senses.
    pub tagged_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseList {
    pub lemma: String,
    pub pos: PartOfSpeech,
    /// WordNet sense-number order, most frequent first.
    pub senses: Vec<SynsetId>,
}

/// Paths of the WordNet flat files, each tagged with its part of speech.
#[derive(Debug, Clone, Default)]
pub struct WordNetFiles {
    pub index: Vec<(PartOfSpeech, PathBuf)>,
    pub data: Vec<(PartOfSpeech, PathBuf)>,
    pub exceptions: Vec<(PartOfSpeech, PathBuf)>,
    /// `index.sense`, the source of the per-sense tagged counts.
    pub sense_index: Option<PathBuf>,
}

impl WordNetFiles {
    /// Collects whichever of the standard file names exist under `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, LexError> {
        let mut files = WordNetFiles::default();
        for pos in PartOfSpeech::ALL {
            let suffix = pos.file_suffix();
            let index = dir.join(format!("index.{suffix}"));
            let data = dir.join(format!("data.{suffix}"));
            let exc = dir.join(format!("{suffix}.exc"));
            if index.is_file() {
                files.index.push((pos, index));
            }
            if data.is_file() {
                files.data.push((pos, data));
            }
            if exc.is_file() {
                files.exceptions.push((pos, exc));
            }
        }
        let sense = dir.join("index.sense");
        if sense.is_file() {
            files.sense_index = Some(sense);
        }
        if files.data.is_empty() {
            return Err(LexError::MissingData(dir.to_path_buf()));
        }
        Ok(files)
    }
}

/// Read-only lexical database. Shareable across threads once built.
#[derive(Debug, Clone)]
pub struct LexicalDb {
    synsets: HashMap<SynsetId, Synset>,
    index: [HashMap<String, Vec<SynsetId>>; 4],
    exceptions: [HashMap<String, Vec<String>>; 4],
    depth: HashMap<SynsetId, u32>,
    /// Sorted ancestor closure (self included) of every noun and verb synset.
    ancestors: HashMap<SynsetId, Vec<SynsetId>>,
    fingerprint: String,
}

impl LexicalDb {
    pub fn load(files: &WordNetFiles) -> Result<Self, LexError> {
        let mut synsets = Vec::new();
        for (pos, path) in &files.data {
            let text = read(path)?;
            synsets.extend(parse::parse_data_file(&text, *pos, &display(path))?);
        }
        let mut senses = Vec::new();
        for (pos, path) in &files.index {
            let text = read(path)?;
            senses.extend(parse::parse_index_file(&text, *pos, &display(path))?);
        }
        let mut exceptions = Vec::new();
        for (pos, path) in &files.exceptions {
            let text = read(path)?;
            for (inflected, bases) in parse::parse_exception_file(&text, &display(path))? {
                exceptions.push((*pos, inflected, bases));
            }
        }
        if let Some(path) = &files.sense_index {
            let text = read(path)?;
            let counts = parse::parse_sense_index(&text, &display(path))?;
            let mut by_id: HashMap<SynsetId, usize> = HashMap::with_capacity(synsets.len());
            for (i, s) in synsets.iter().enumerate() {
                by_id.insert(s.id, i);
            }
            for (key, id, count) in counts {
                let i = *by_id
                    .get(&id)
                    .ok_or(LexError::DanglingPointer { from: key, target: id })?;
                synsets[i].tagged_count += count;
            }
        }
        Self::from_parts(synsets, senses, exceptions)
    }

    pub fn load_dir(dir: &Path) -> Result<Self, LexError> {
        Self::load(&WordNetFiles::from_dir(dir)?)
    }

    /// Builds and validates a database from already-parsed records.
    pub fn from_parts(
        synset_list: Vec<Synset>,
        sense_lists: Vec<SenseList>,
        exception_list: Vec<(PartOfSpeech, String, Vec<String>)>,
    ) -> Result<Self, LexError> {
        let mut synsets = HashMap::with_capacity(synset_list.len());
        for s in synset_list {
            if s.lemmas.is_empty() {
                return Err(LexError::EmptySynset(s.id));
            }
            if let Some(prev) = synsets.insert(s.id, s) {
                return Err(LexError::DuplicateSynset(prev.id));
            }
        }
        for s in synsets.values() {
            for h in &s.hypernyms {
                if h.pos != s.id.pos {
                    return Err(LexError::CrossPosHypernym { from: s.id, target: *h });
                }
                if !synsets.contains_key(h) {
                    return Err(LexError::DanglingPointer {
                        from: s.id.to_string(),
                        target: *h,
                    });
                }
            }
        }

        let mut index: [HashMap<String, Vec<SynsetId>>; 4] = Default::default();
        for list in sense_lists {
            for (i, id) in list.senses.iter().enumerate() {
                let synset = synsets.get(id).ok_or_else(|| LexError::DanglingPointer {
                    from: list.lemma.clone(),
                    target: *id,
                })?;
                if id.pos != list.pos || !synset.lemmas.contains(&list.lemma) {
                    return Err(LexError::LemmaNotInSynset {
                        lemma: list.lemma.clone(),
                        synset: *id,
                    });
                }
                if list.senses[..i].contains(id) {
                    return Err(LexError::DuplicateSense {
                        lemma: list.lemma.clone(),
                        synset: *id,
                    });
                }
            }
            index[list.pos.index()]
                .entry(list.lemma)
                .or_default()
                .extend(list.senses);
        }

        let mut exceptions: [HashMap<String, Vec<String>>; 4] = Default::default();
        for (pos, inflected, bases) in exception_list {
            let entry = exceptions[pos.index()].entry(inflected).or_default();
            for b in bases {
                if !entry.contains(&b) {
                    entry.push(b);
                }
            }
        }

        let (depth, ancestors) = taxonomy_tables(&synsets)?;
        let mut db = LexicalDb {
            synsets,
            index,
            exceptions,
            depth,
            ancestors,
            fingerprint: String::new(),
        };
        db.fingerprint = db.compute_fingerprint();
        Ok(db)
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    /// Senses of `lemma` in sense-number order; empty when absent.
    pub fn senses(&self, lemma: &str, pos: PartOfSpeech) -> &[SynsetId] {
        self.index[pos.index()].get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn lookup_senses(&self, lemma: &str, pos: PartOfSpeech) -> SenseList {
        SenseList {
            lemma: lemma.to_string(),
            pos,
            senses: self.senses(lemma, pos).to_vec(),
        }
    }

    pub fn has_entry(&self, lemma: &str, pos: PartOfSpeech) -> bool {
        self.index[pos.index()].contains_key(lemma)
    }

    /// All index lemmas for one part of speech, in arbitrary order.
    pub fn lemmas(&self, pos: PartOfSpeech) -> impl Iterator<Item = &str> {
        self.index[pos.index()].keys().map(String::as_str)
    }

    pub fn exceptions(&self, inflected: &str, pos: PartOfSpeech) -> &[String] {
        self.exceptions[pos.index()]
            .get(inflected)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Sum of the tagged counts of every sense of `lemma` under `pos`.
    pub fn tagged_count_sum(&self, lemma: &str, pos: PartOfSpeech) -> u64 {
        self.senses(lemma, pos)
            .iter()
            .filter_map(|id| self.synsets.get(id))
            .map(|s| u64::from(s.tagged_count))
            .sum()
    }

    pub fn morphy(&self, surface: &str, pos: PartOfSpeech) -> Vec<String> {
        morphy::morphy(self, surface, pos)
    }

    /// 1 + length of the shortest hypernym path to a root.
    pub fn hypernym_depth(&self, id: SynsetId) -> Result<u32, LexError> {
        if !self.synsets.contains_key(&id) {
            return Err(LexError::UnknownSynset(id));
        }
        Ok(self.depth.get(&id).copied().unwrap_or(1))
    }

    /// Ancestor closure including `id` itself, sorted by id. Empty for
    /// adjectives and adverbs.
    pub fn ancestors(&self, id: SynsetId) -> Result<&[SynsetId], LexError> {
        if !self.synsets.contains_key(&id) {
            return Err(LexError::UnknownSynset(id));
        }
        Ok(self.ancestors.get(&id).map(Vec::as_slice).unwrap_or(&[]))
    }

    /// Deepest shared ancestor; ties on depth go to the smaller id.
    /// `None` across parts of speech, for hierarchy-less parts of speech and
    /// for synsets under distinct roots.
    pub fn least_common_subsumer(&self, a: SynsetId, b: SynsetId) -> Result<Option<SynsetId>, LexError> {
        let anc_a = self.ancestors(a)?;
        let anc_b = self.ancestors(b)?;
        if a.pos != b.pos || !a.pos.has_hierarchy() {
            return Ok(None);
        }
        let (small, large) = if anc_a.len() <= anc_b.len() {
            (anc_a, anc_b)
        } else {
            (anc_b, anc_a)
        };
        let mut best: Option<(u32, SynsetId)> = None;
        for c in small {
            if large.binary_search(c).is_ok() {
                let d = self.depth[c];
                best = match best {
                    Some((bd, bid)) if bd > d || (bd == d && bid < *c) => Some((bd, bid)),
                    _ => Some((d, *c)),
                };
            }
        }
        Ok(best.map(|(_, id)| id))
    }

    /// Content hash over the canonical form of every record.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn compute_fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        let ordered: BTreeMap<_, _> = self.synsets.iter().collect();
        for (id, s) in ordered {
            hasher.update(format!("{id}|{}|{}|", s.lemmas.join(","), s.tagged_count));
            for h in &s.hypernyms {
                hasher.update(h.to_string());
            }
            hasher.update(b"\n");
        }
        for pos in PartOfSpeech::ALL {
            let ordered: BTreeMap<_, _> = self.index[pos.index()].iter().collect();
            for (lemma, senses) in ordered {
                hasher.update(format!("{pos}|{lemma}|{senses:?}\n"));
            }
            let ordered: BTreeMap<_, _> = self.exceptions[pos.index()].iter().collect();
            for (form, bases) in ordered {
                hasher.update(format!("{pos}|{form}|{bases:?}\n"));
            }
        }
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn read(path: &Path) -> Result<String, LexError> {
    std::fs::read_to_string(path).map_err(|source| LexError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

type TaxonomyTables = (HashMap<SynsetId, u32>, HashMap<SynsetId, Vec<SynsetId>>);

/// Depth and ancestor closure for every hierarchical synset, computed in
/// parent-first order. Fails on a hypernym cycle.
fn taxonomy_tables(synsets: &HashMap<SynsetId, Synset>) -> Result<TaxonomyTables, LexError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<SynsetId, Mark> = HashMap::with_capacity(synsets.len());
    let mut depth: HashMap<SynsetId, u32> = HashMap::with_capacity(synsets.len());
    let mut ancestors: HashMap<SynsetId, Vec<SynsetId>> = HashMap::with_capacity(synsets.len());

    let mut roots: Vec<&SynsetId> = synsets.keys().filter(|id| id.pos.has_hierarchy()).collect();
    roots.sort();
    for &start in roots {
        if marks.contains_key(&start) {
            continue;
        }
        // (node, next parent index to visit)
        let mut stack: Vec<(SynsetId, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Open);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let parents = &synsets[&node].hypernyms;
            if *next < parents.len() {
                let p = parents[*next];
                *next += 1;
                match marks.get(&p) {
                    Some(Mark::Open) => return Err(LexError::HypernymCycle(p)),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(p, Mark::Open);
                        stack.push((p, 0));
                    }
                }
                continue;
            }
            stack.pop();
            let d = parents.iter().map(|p| depth[p] + 1).min().unwrap_or(1);
            let mut anc: Vec<SynsetId> = parents.iter().flat_map(|p| ancestors[p].iter().copied()).collect();
            anc.push(node);
            anc.sort_unstable();
            anc.dedup();
            depth.insert(node, d);
            ancestors.insert(node, anc);
            marks.insert(node, Mark::Done);
        }
    }
    Ok((depth, ancestors))
}
