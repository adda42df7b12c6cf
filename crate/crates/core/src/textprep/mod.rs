//! Tokenization, sentence splitting, stopwords and part-of-speech tagging.

mod stopwords;
mod tagger;
mod tokenize;

use std::path::PathBuf;

use crate::lexdb::{LexicalDb, PartOfSpeech};

pub use stopwords::Stopwords;
pub use tagger::{is_closed_class, map_tag, ExternalTagger, FrequencyTagger, PosTagger};
pub use tokenize::{normalize, split_sentences, tokenize};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed tag line {line} in {file}")]
    MalformedTagLine { file: String, line: usize },
    #[error("external tags do not match token {position} (`{token}`)")]
    TagMisaligned { position: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub norm: String,
    pub sentence_idx: usize,
    /// Index within the whole document.
    pub position: usize,
    pub is_stopword: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaggedToken {
    pub token: Token,
    /// `None` for closed-class words and numbers.
    pub pos: Option<PartOfSpeech>,
}

/// Tags a whole document one sentence at a time.
pub fn tag_document(tokens: &[Token], tagger: &dyn PosTagger, db: &LexicalDb) -> Result<Vec<TaggedToken>, TextError> {
    let mut out = Vec::with_capacity(tokens.len());
    for sentence in tokens.chunk_by(|a, b| a.sentence_idx == b.sentence_idx) {
        out.extend(tagger.tag(sentence, db)?);
    }
    Ok(out)
}
