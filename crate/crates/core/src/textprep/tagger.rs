use std::path::Path;

use crate::lexdb::{LexicalDb, PartOfSpeech};

use super::{TaggedToken, TextError, Token};

/// Determiners, prepositions, pronouns and conjunctions.
const CLOSED_CLASS: &[&str] = &[
    "a",
    "an",
    "the",
    "this",
    "that",
    "these",
    "those",
    "each",
    "every",
    "either",
    "neither",
    "some",
    "any",
    "no",
    "all",
    "both",
    "few",
    "many",
    "much",
    "several",
    "such",
    "what",
    "which",
    "whichever",
    "whatever",
    "another",
    "other",
    "my",
    "your",
    "his",
    "her",
    "its",
    "our",
    "their",
    "whose",
    "aboard",
    "about",
    "above",
    "across",
    "after",
    "against",
    "along",
    "amid",
    "among",
    "amongst",
    "around",
    "as",
    "at",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "besides",
    "between",
    "beyond",
    "but",
    "by",
    "despite",
    "down",
    "during",
    "except",
    "for",
    "from",
    "in",
    "inside",
    "into",
    "like",
    "near",
    "of",
    "off",
    "on",
    "onto",
    "out",
    "outside",
    "over",
    "past",
    "per",
    "since",
    "than",
    "through",
    "throughout",
    "till",
    "to",
    "toward",
    "towards",
    "under",
    "underneath",
    "unlike",
    "until",
    "unto",
    "up",
    "upon",
    "via",
    "with",
    "within",
    "without",
    "i",
    "me",
    "mine",
    "myself",
    "you",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "himself",
    "she",
    "hers",
    "herself",
    "it",
    "itself",
    "we",
    "us",
    "ours",
    "ourselves",
    "they",
    "them",
    "theirs",
    "themselves",
    "who",
    "whom",
    "whoever",
    "whomever",
    "someone",
    "somebody",
    "something",
    "anyone",
    "anybody",
    "anything",
    "everyone",
    "everybody",
    "everything",
    "nobody",
    "nothing",
    "none",
    "one",
    "oneself",
    "and",
    "or",
    "nor",
    "so",
    "yet",
    "although",
    "because",
    "if",
    "unless",
    "whereas",
    "whether",
    "while",
    "though",
    "lest",
    "once",
];

pub fn is_closed_class(norm: &str) -> bool {
    is_number(norm) || CLOSED_CLASS.contains(&norm)
}

fn is_number(norm: &str) -> bool {
    norm.chars().any(|c| c.is_numeric()) && norm.chars().all(|c| c.is_numeric() || matches!(c, '-' | '\''))
}

/// Assigns one of the four WordNet classes (or none) to each token of a sentence.
pub trait PosTagger: Send + Sync {
    fn tag(&self, sentence: &[Token], db: &LexicalDb) -> Result<Vec<TaggedToken>, TextError>;
}

/// Picks the part of speech whose WordNet entry has the largest tagged
/// frequency; unknown words default to nouns.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrequencyTagger;

impl FrequencyTagger {
    pub fn tag_word(&self, norm: &str, db: &LexicalDb) -> Option<PartOfSpeech> {
        if is_closed_class(norm) {
            return None;
        }
        let mut best: Option<u64> = None;
        let mut tied: Vec<PartOfSpeech> = Vec::new();
        for pos in PartOfSpeech::ALL {
            let lemmas = db.morphy(norm, pos);
            if lemmas.is_empty() {
                continue;
            }
            let score = lemmas.iter().map(|l| db.tagged_count_sum(l, pos)).max().unwrap_or(0);
            match best {
                Some(b) if b > score => {}
                Some(b) if b == score => tied.push(pos),
                _ => {
                    best = Some(score);
                    tied = vec![pos];
                }
            }
        }
        if tied.len() > 1 {
            if norm.ends_with("ly") && tied.contains(&PartOfSpeech::Adverb) {
                return Some(PartOfSpeech::Adverb);
            }
            if (norm.ends_with("ing") || norm.ends_with("ed")) && tied.contains(&PartOfSpeech::Verb) {
                return Some(PartOfSpeech::Verb);
            }
        }
        Some(tied.first().copied().unwrap_or(PartOfSpeech::Noun))
    }
}

impl PosTagger for FrequencyTagger {
    fn tag(&self, sentence: &[Token], db: &LexicalDb) -> Result<Vec<TaggedToken>, TextError> {
        Ok(sentence
            .iter()
            .map(|t| TaggedToken {
                token: t.clone(),
                pos: self.tag_word(&t.norm, db),
            })
            .collect())
    }
}

/// Tags read from another tagger's output, one `token<TAB>tag` line per
/// token in document order. Tags may be Penn-style or WordNet letters.
#[derive(Debug, Clone, Default)]
pub struct ExternalTagger {
    tags: Vec<(String, Option<PartOfSpeech>)>,
}

impl ExternalTagger {
    pub fn parse(text: &str, file: &str) -> Result<Self, TextError> {
        let mut tags = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (token, tag) = line.split_once('\t').ok_or_else(|| TextError::MalformedTagLine {
                file: file.to_string(),
                line: i + 1,
            })?;
            tags.push((super::normalize(token.trim()), map_tag(tag.trim())));
        }
        Ok(ExternalTagger { tags })
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let text = std::fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl PosTagger for ExternalTagger {
    fn tag(&self, sentence: &[Token], _db: &LexicalDb) -> Result<Vec<TaggedToken>, TextError> {
        sentence
            .iter()
            .map(|t| match self.tags.get(t.position) {
                Some((norm, pos)) if *norm == t.norm => Ok(TaggedToken {
                    token: t.clone(),
                    pos: *pos,
                }),
                _ => Err(TextError::TagMisaligned {
                    position: t.position,
                    token: t.surface.clone(),
                }),
            })
            .collect()
    }
}

/// Penn Treebank tags and bare WordNet letters to a content class.
pub fn map_tag(tag: &str) -> Option<PartOfSpeech> {
    let upper = tag.to_ascii_uppercase();
    if upper.len() == 1 {
        return PartOfSpeech::from_letter(upper.to_ascii_lowercase().chars().next()?);
    }
    match upper.as_str() {
        t if t.starts_with("NN") => Some(PartOfSpeech::Noun),
        t if t.starts_with("VB") => Some(PartOfSpeech::Verb),
        t if t.starts_with("JJ") => Some(PartOfSpeech::Adjective),
        "RB" | "RBR" | "RBS" => Some(PartOfSpeech::Adverb),
        _ => upper.parse().ok(),
    }
}
