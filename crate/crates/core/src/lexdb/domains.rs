//! WordNetDomains: the label hierarchy rooted at `top_level`, the
//! hierarchy-external `factotum` label, and the synset annotation.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{hex, SynsetId};

pub const TOP_LEVEL: &str = "top_level";
pub const FACTOTUM: &str = "factotum";

#[derive(Debug, thiserror::Error)]
pub enum DomainError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed line {line} in {file}")]
    MalformedLine { file: String, line: usize },
    #[error("unknown domain label `{0}`")]
    UnknownDomainLabel(String),
    #[error("cycle in domain hierarchy through `{0}`")]
    CycleInHierarchy(String),
    #[error("domain `{0}` has two different parents")]
    ConflictingParent(String),
    #[error("domain `{0}` is not attached to top_level or factotum")]
    DetachedDomain(String),
    #[error("domain `{0}` may not have a parent")]
    RootWithParent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainNode {
    pub name: String,
    pub parent: Option<String>,
    /// Position in the `top_level` tree (root = 1); `None` for factotum and
    /// any label filed under it.
    pub depth: Option<u32>,
    pub is_factotum: bool,
}

#[derive(Debug, Clone)]
pub struct DomainDb {
    nodes: BTreeMap<String, DomainNode>,
    annotations: HashMap<SynsetId, Vec<String>>,
    fallback: Vec<String>,
    fingerprint: String,
}

impl DomainDb {
    pub fn load(mapping: &Path, hierarchy: &Path) -> Result<Self, DomainError> {
        Self::load_translated(mapping, hierarchy, None)
    }

    /// Like [`DomainDb::load`], re-keying mapping offsets through a
    /// `old_id<TAB>new_id` translation table first. Unlisted ids pass through.
    pub fn load_translated(mapping: &Path, hierarchy: &Path, translation: Option<&Path>) -> Result<Self, DomainError> {
        let hierarchy_text = read(hierarchy)?;
        let mapping_text = read(mapping)?;
        let table = match translation {
            Some(path) => parse_translation(&read(path)?, &path.display().to_string())?,
            None => HashMap::new(),
        };
        let mut db = Self::from_hierarchy_str(&hierarchy_text, &hierarchy.display().to_string())?;
        db.add_mapping_str(&mapping_text, &mapping.display().to_string(), &table)?;
        Ok(db)
    }

    /// Parses `child<TAB>parent` lines; a line with one label declares a root.
    pub fn from_hierarchy_str(text: &str, file: &str) -> Result<Self, DomainError> {
        let mut parents: BTreeMap<String, Option<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
            match fields.as_slice() {
                [root] => declare(&mut parents, canonical(root), None)?,
                [child, parent] => {
                    let child = canonical(child);
                    let parent = canonical(parent);
                    if child == TOP_LEVEL || child == FACTOTUM {
                        return Err(DomainError::RootWithParent(child));
                    }
                    declare(&mut parents, parent.clone(), None)?;
                    declare(&mut parents, child, Some(parent))?;
                }
                _ => {
                    return Err(DomainError::MalformedLine {
                        file: file.to_string(),
                        line: i + 1,
                    })
                }
            }
        }
        parents.entry(TOP_LEVEL.to_string()).or_insert(None);
        parents.entry(FACTOTUM.to_string()).or_insert(None);
        Self::from_parents(parents)
    }

    /// Builds the tree from a complete `name -> parent` map.
    pub fn from_parents(parents: BTreeMap<String, Option<String>>) -> Result<Self, DomainError> {
        let mut nodes = BTreeMap::new();
        for name in parents.keys() {
            // walk to the root, detecting cycles
            let mut chain = vec![name.as_str()];
            let mut cur = name.as_str();
            while let Some(Some(p)) = parents.get(cur) {
                if chain.contains(&p.as_str()) {
                    return Err(DomainError::CycleInHierarchy(p.clone()));
                }
                chain.push(p.as_str());
                cur = p.as_str();
            }
            let (depth, is_factotum) = match cur {
                TOP_LEVEL => (Some(chain.len() as u32), false),
                FACTOTUM => (None, true),
                other => return Err(DomainError::DetachedDomain(other.to_string())),
            };
            nodes.insert(
                name.clone(),
                DomainNode {
                    name: name.clone(),
                    parent: parents[name].clone(),
                    depth,
                    is_factotum,
                },
            );
        }
        let mut db = DomainDb {
            nodes,
            annotations: HashMap::new(),
            fallback: vec![FACTOTUM.to_string()],
            fingerprint: String::new(),
        };
        db.refresh_fingerprint();
        Ok(db)
    }

    /// Adds `<offset>-<pos><TAB><domain> [<domain>...]` lines.
    pub fn add_mapping_str(
        &mut self,
        text: &str,
        file: &str,
        translation: &HashMap<SynsetId, SynsetId>,
    ) -> Result<(), DomainError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || DomainError::MalformedLine {
                file: file.to_string(),
                line: i + 1,
            };
            let mut fields = line.split_whitespace();
            let id: SynsetId = fields.next().and_then(|f| f.parse().ok()).ok_or_else(malformed)?;
            let id = translation.get(&id).copied().unwrap_or(id);
            let labels: Vec<String> = fields.map(canonical).collect();
            if labels.is_empty() {
                return Err(malformed());
            }
            self.insert_annotation(id, labels)?;
        }
        self.refresh_fingerprint();
        Ok(())
    }

    pub fn annotate(&mut self, id: SynsetId, labels: Vec<String>) -> Result<(), DomainError> {
        self.insert_annotation(id, labels)?;
        self.refresh_fingerprint();
        Ok(())
    }

    fn insert_annotation(&mut self, id: SynsetId, labels: Vec<String>) -> Result<(), DomainError> {
        for label in &labels {
            if !self.nodes.contains_key(label) {
                return Err(DomainError::UnknownDomainLabel(label.clone()));
            }
        }
        let entry = self.annotations.entry(id).or_default();
        for label in labels {
            if !entry.contains(&label) {
                entry.push(label);
            }
        }
        Ok(())
    }

    /// Never empty: unannotated synsets answer `[factotum]`.
    pub fn domains_of(&self, id: SynsetId) -> &[String] {
        match self.annotations.get(&id) {
            Some(labels) if !labels.is_empty() => labels,
            _ => &self.fallback,
        }
    }

    pub fn node(&self, name: &str) -> Option<&DomainNode> {
        self.nodes.get(name)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &DomainNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self, name: &str) -> Option<u32> {
        self.nodes.get(name).and_then(|n| n.depth)
    }

    /// True for labels that sit in the `top_level` tree.
    pub fn is_comparable(&self, name: &str) -> bool {
        self.depth(name).is_some()
    }

    /// Path from `name` up to its root, `name` first.
    pub fn ancestors(&self, name: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self.nodes.get(name);
        while let Some(node) = cur {
            out.push(node.name.as_str());
            cur = node.parent.as_deref().and_then(|p| self.nodes.get(p));
        }
        out
    }

    /// Deepest common ancestor of two tree labels.
    pub fn least_common_subsumer(&self, a: &str, b: &str) -> Option<&str> {
        if !self.is_comparable(a) || !self.is_comparable(b) {
            return None;
        }
        let up_b = self.ancestors(b);
        self.ancestors(a).into_iter().find(|x| up_b.contains(x))
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn refresh_fingerprint(&mut self) {
        let mut hasher = Sha256::new();
        for node in self.nodes.values() {
            hasher.update(format!("{}|{:?}\n", node.name, node.parent));
        }
        let ordered: BTreeMap<_, _> = self.annotations.iter().collect();
        for (id, labels) in ordered {
            hasher.update(format!("{id}|{}\n", labels.join(" ")));
        }
        self.fingerprint = hex(&hasher.finalize());
    }
}

fn declare(
    parents: &mut BTreeMap<String, Option<String>>,
    name: String,
    parent: Option<String>,
) -> Result<(), DomainError> {
    match (parents.get(&name), &parent) {
        (Some(Some(p)), Some(q)) if p != q => Err(DomainError::ConflictingParent(name)),
        (Some(Some(_)), None) => Ok(()),
        _ => {
            parents.insert(name, parent);
            Ok(())
        }
    }
}

fn canonical(label: &str) -> String {
    label.trim().to_lowercase().replace(['-', ' '], "_")
}

pub fn parse_translation(text: &str, file: &str) -> Result<HashMap<SynsetId, SynsetId>, DomainError> {
    let mut table = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let pair = fields
            .next()
            .and_then(|a| a.parse::<SynsetId>().ok())
            .zip(fields.next().and_then(|b| b.parse::<SynsetId>().ok()));
        match pair {
            Some((old, new)) => {
                table.insert(old, new);
            }
            None => {
                return Err(DomainError::MalformedLine {
                    file: file.to_string(),
                    line: i + 1,
                })
            }
        }
    }
    Ok(table)
}

fn read(path: &Path) -> Result<String, DomainError> {
    std::fs::read_to_string(path).map_err(|source| DomainError::Io {
        path: path.to_path_buf(),
        source,
    })
}
