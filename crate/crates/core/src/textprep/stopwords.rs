use std::collections::HashSet;
use std::path::Path;

use super::TextError;

const BUILTIN: &str = include_str!("../../data/stopwords.txt");

/// A stopword set: one lowercase word per line, `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN)
    }

    pub fn empty() -> Self {
        Stopwords { words: HashSet::new() }
    }

    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.to_lowercase().replace('\u{2019}', "'"))
            .collect();
        Stopwords { words }
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let text = std::fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, norm: &str) -> bool {
        self.words.contains(norm)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sorted word list, the basis for cache keys.
    pub fn sorted(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.words.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::builtin()
    }
}
