use super::{Stopwords, Token};

/// Lowercased abbreviations (with their final period) that do not end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "ft.", "gen.", "gov.", "sen.", "rep.", "rev.",
    "col.", "lt.", "sgt.", "capt.", "cmdr.", "adm.", "maj.", "pres.", "u.s.", "u.k.", "u.n.", "u.s.s.r.", "e.g.",
    "i.e.", "etc.", "vs.", "inc.", "ltd.", "co.", "corp.", "no.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.",
    "aug.", "sep.", "sept.", "oct.", "nov.", "dec.", "a.m.", "p.m.", "approx.", "dept.", "est.", "fig.",
];

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

fn is_opening(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}')
}

/// Byte spans of alphanumeric runs, keeping single hyphens and apostrophes
/// that sit between two alphanumerics.
pub(crate) fn word_spans(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        while j < chars.len() {
            let c = chars[j].1;
            if c.is_alphanumeric() {
                j += 1;
            } else if is_joiner(c) && j + 1 < chars.len() && chars[j + 1].1.is_alphanumeric() {
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
        spans.push((start, end));
        i = j;
    }
    spans
}

/// Lowercase form restricted to the token alphabet; curly apostrophes
/// become straight ones.
pub fn normalize(surface: &str) -> String {
    surface
        .to_lowercase()
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .filter(|c| c.is_alphanumeric() || *c == '-' || *c == '\'')
        .collect()
}

/// Byte ranges of the sentences of `text`, trimmed of surrounding whitespace.
pub fn split_sentences(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() && (matches!(chars[j].1, '.' | '!' | '?') || is_closing(chars[j].1)) {
            j += 1;
        }
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let mut m = k;
        while m < chars.len() && is_opening(chars[m].1) {
            m += 1;
        }
        let boundary = k > j && m < chars.len() && chars[m].1.is_uppercase();
        if boundary && !(c == '.' && is_abbreviation(&text[..pos + 1])) {
            let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
            push_trimmed(text, start, end, &mut out);
            start = chars[k].0;
            i = k;
        } else {
            i = j;
        }
    }
    push_trimmed(text, start, text.len(), &mut out);
    out
}

fn push_trimmed(text: &str, start: usize, end: usize, out: &mut Vec<(usize, usize)>) {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trimmed = slice.trim();
    if !trimmed.is_empty() {
        out.push((start + lead, start + lead + trimmed.len()));
    }
}

/// Whether the whitespace-delimited chunk ending `prefix` is a known
/// abbreviation or a single-letter initial.
fn is_abbreviation(prefix: &str) -> bool {
    let chunk_start = prefix
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(0, |(b, c)| b + c.len_utf8());
    let chunk = prefix[chunk_start..].trim_start_matches(is_opening).to_lowercase();
    if ABBREVIATIONS.contains(&chunk.as_str()) {
        return true;
    }
    let mut letters = chunk.chars();
    matches!((letters.next(), letters.next(), letters.next()), (Some(a), Some('.'), None) if a.is_alphabetic())
}

/// Splits `text` into tokens numbered in document order, each tagged with
/// its sentence index.
pub fn tokenize(text: &str, stopwords: &Stopwords) -> Vec<Token> {
    let sentences = split_sentences(text);
    let mut tokens = Vec::new();
    for (sentence_idx, (s, e)) in sentences.iter().enumerate() {
        for (a, b) in word_spans(&text[*s..*e]) {
            let surface = &text[s + a..s + b];
            let norm = normalize(surface);
            if norm.is_empty() {
                continue;
            }
            let is_stopword = stopwords.contains(&norm);
            tokens.push(Token {
                surface: surface.to_string(),
                norm,
                sentence_idx,
                position: tokens.len(),
                is_stopword,
            });
        }
    }
    tokens
}
