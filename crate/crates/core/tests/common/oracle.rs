//! Brute-force reference implementations. They read the fixture files with
//! their own parsing and answer every question by exhaustive enumeration,
//! sharing no code with the library beyond plain data types.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use conceptir_core::lexdb::{PartOfSpeech, SynsetId};

pub struct OracleWordNet {
    pub hypernyms: BTreeMap<SynsetId, Vec<SynsetId>>,
    pub senses: HashMap<(String, PartOfSpeech), Vec<SynsetId>>,
    pub counts: HashMap<SynsetId, u64>,
    ic_memo: RefCell<HashMap<SynsetId, f64>>,
}

fn pos_of(letter: &str) -> Option<PartOfSpeech> {
    match letter {
        "n" => Some(PartOfSpeech::Noun),
        "v" => Some(PartOfSpeech::Verb),
        "a" | "s" => Some(PartOfSpeech::Adjective),
        "r" => Some(PartOfSpeech::Adverb),
        _ => None,
    }
}

impl OracleWordNet {
    pub fn load(dir: &Path) -> Self {
        let mut hypernyms = BTreeMap::new();
        let mut senses = HashMap::new();
        let mut counts = HashMap::new();
        for (suffix, letter) in [("noun", "n"), ("verb", "v")] {
            let pos = pos_of(letter).unwrap();
            let Ok(data) = std::fs::read_to_string(dir.join(format!("data.{suffix}"))) else {
                continue;
            };
            for line in data.lines().filter(|l| !l.starts_with(' ')) {
                let body = line.split(" | ").next().unwrap();
                let f: Vec<&str> = body.split_whitespace().collect();
                let id = SynsetId::new(pos, f[0].parse().unwrap());
                let words = usize::from_str_radix(f[3], 16).unwrap();
                let mut k = 4 + 2 * words;
                let ptrs: usize = f[k].parse().unwrap();
                k += 1;
                let mut parents = Vec::new();
                for _ in 0..ptrs {
                    if f[k] == "@" || f[k] == "@i" {
                        parents.push(SynsetId::new(pos_of(f[k + 2]).unwrap(), f[k + 1].parse().unwrap()));
                    }
                    k += 4;
                }
                hypernyms.insert(id, parents);
            }
            let index = std::fs::read_to_string(dir.join(format!("index.{suffix}"))).unwrap();
            for line in index.lines().filter(|l| !l.starts_with(' ')) {
                let f: Vec<&str> = line.split_whitespace().collect();
                let n: usize = f[2].parse().unwrap();
                let ids = f[f.len() - n..]
                    .iter()
                    .map(|o| SynsetId::new(pos, o.parse().unwrap()))
                    .collect();
                senses.insert((f[0].to_string(), pos), ids);
            }
        }
        if let Ok(text) = std::fs::read_to_string(dir.join("index.sense")) {
            for line in text.lines() {
                let f: Vec<&str> = line.split_whitespace().collect();
                let pos = match f[0].split('%').nth(1).unwrap().chars().next().unwrap() {
                    '1' => PartOfSpeech::Noun,
                    '2' => PartOfSpeech::Verb,
                    _ => continue,
                };
                *counts.entry(SynsetId::new(pos, f[1].parse().unwrap())).or_insert(0) += f[3].parse::<u64>().unwrap();
            }
        }
        OracleWordNet {
            hypernyms,
            senses,
            counts,
            ic_memo: RefCell::default(),
        }
    }

    pub fn ids(&self) -> Vec<SynsetId> {
        self.hypernyms.keys().copied().collect()
    }

    /// Every ancestor (self included) with its shortest upward distance.
    pub fn distances(&self, id: SynsetId) -> BTreeMap<SynsetId, u32> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::from([(id, 0)]);
        while let Some((cur, d)) = queue.pop_front() {
            if dist.contains_key(&cur) {
                continue;
            }
            dist.insert(cur, d);
            for p in &self.hypernyms[&cur] {
                queue.push_back((*p, d + 1));
            }
        }
        dist
    }

    /// Roots have depth 1.
    pub fn depth(&self, id: SynsetId) -> u32 {
        self.distances(id)
            .iter()
            .filter(|(a, _)| self.hypernyms[*a].is_empty())
            .map(|(_, d)| d + 1)
            .min()
            .unwrap()
    }

    pub fn ancestors(&self, id: SynsetId) -> BTreeSet<SynsetId> {
        self.distances(id).into_keys().collect()
    }

    pub fn lcs(&self, a: SynsetId, b: SynsetId) -> Option<SynsetId> {
        if a.pos != b.pos {
            return None;
        }
        let common: Vec<SynsetId> = self.ancestors(a).intersection(&self.ancestors(b)).copied().collect();
        let best = common.iter().map(|c| self.depth(*c)).max()?;
        common.into_iter().filter(|c| self.depth(*c) == best).min()
    }

    /// `-ln` of the smoothed share of all same-POS mass below `id`.
    pub fn ic(&self, id: SynsetId) -> f64 {
        if let Some(v) = self.ic_memo.borrow().get(&id) {
            return *v;
        }
        let mass = |s: &SynsetId| self.counts.get(s).copied().unwrap_or(0) as f64 + 1.0;
        let mut below = 0.0;
        let mut total = 0.0;
        for s in self.hypernyms.keys().filter(|s| s.pos == id.pos) {
            total += mass(s);
            if self.ancestors(*s).contains(&id) {
                below += mass(s);
            }
        }
        let v = (-(below / total).ln()).max(0.0);
        self.ic_memo.borrow_mut().insert(id, v);
        v
    }

    pub fn resnik(&self, a: SynsetId, b: SynsetId) -> f64 {
        self.lcs(a, b).map_or(0.0, |l| self.ic(l))
    }
}

pub struct OracleDomains {
    pub parent: BTreeMap<String, Option<String>>,
    pub mapping: HashMap<SynsetId, Vec<String>>,
}

impl OracleDomains {
    pub fn parse(hierarchy: &str, mapping: &str) -> Self {
        let mut parent = BTreeMap::new();
        for line in hierarchy.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').map(str::trim).collect();
            match f.as_slice() {
                [root] => {
                    parent.entry(root.to_string()).or_insert(None);
                }
                [child, p] => {
                    parent.entry(p.to_string()).or_insert(None);
                    parent.insert(child.to_string(), Some(p.to_string()));
                }
                _ => panic!("bad hierarchy line {line}"),
            }
        }
        let mut map = HashMap::new();
        for line in mapping.lines().filter(|l| !l.trim().is_empty()) {
            let (key, labels) = line.split_once('\t').unwrap();
            let (off, pos) = key.split_once('-').unwrap();
            let id = SynsetId::new(pos_of(pos).unwrap(), off.parse().unwrap());
            map.insert(id, labels.split_whitespace().map(str::to_string).collect());
        }
        OracleDomains { parent, mapping: map }
    }

    pub fn path_to_root(&self, name: &str) -> Vec<String> {
        let mut out = vec![name.to_string()];
        let mut cur = name.to_string();
        while let Some(Some(p)) = self.parent.get(&cur) {
            out.push(p.clone());
            cur = p.clone();
        }
        out
    }

    pub fn scorable(&self, name: &str) -> bool {
        self.parent.contains_key(name) && self.path_to_root(name).last().unwrap() == "top_level"
    }

    pub fn depth(&self, name: &str) -> u32 {
        self.path_to_root(name).len() as u32
    }

    pub fn wup(&self, a: &str, b: &str) -> f64 {
        if !self.scorable(a) || !self.scorable(b) {
            return 0.0;
        }
        let pa = self.path_to_root(a);
        let pb = self.path_to_root(b);
        let lcs = pa.iter().find(|x| pb.contains(x)).unwrap();
        2.0 * self.depth(lcs) as f64 / (self.depth(a) + self.depth(b)) as f64
    }

    pub fn domains_of(&self, id: SynsetId) -> Vec<String> {
        self.mapping
            .get(&id)
            .cloned()
            .unwrap_or_else(|| vec!["factotum".to_string()])
    }
}
