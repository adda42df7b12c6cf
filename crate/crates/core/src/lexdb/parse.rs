//! Line grammars of the WordNet 3.0 flat files.

use super::{LexError, PartOfSpeech, SenseList, Synset, SynsetId};

fn malformed(file: &str, line: usize) -> LexError {
    LexError::MalformedLine {
        file: file.to_string(),
        line,
    }
}

/// Lines of a WordNet file with their 1-based numbers, minus the license
/// header (lines opening with two spaces) and blank lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with("  ") && !l.trim().is_empty())
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt synset_offset...`
pub(super) fn parse_index_file(text: &str, pos: PartOfSpeech, file: &str) -> Result<Vec<SenseList>, LexError> {
    content_lines(text)
        .map(|(n, line)| parse_index_line(line, pos).ok_or_else(|| malformed(file, n)))
        .collect()
}

fn parse_index_line(line: &str, pos: PartOfSpeech) -> Option<SenseList> {
    let mut fields = line.split_whitespace();
    let lemma = fields.next()?.to_lowercase();
    let line_pos = PartOfSpeech::from_letter(single_char(fields.next()?)?)?;
    if line_pos != pos {
        return None;
    }
    let synset_cnt: usize = fields.next()?.parse().ok()?;
    let p_cnt: usize = fields.next()?.parse().ok()?;
    for _ in 0..p_cnt {
        fields.next()?;
    }
    let _sense_cnt: usize = fields.next()?.parse().ok()?;
    let _tagsense_cnt: usize = fields.next()?.parse().ok()?;
    let senses = fields
        .map(|f| f.parse::<u32>().ok().map(|o| SynsetId::new(pos, o)))
        .collect::<Option<Vec<_>>>()?;
    if senses.len() != synset_cnt {
        return None;
    }
    Some(SenseList { lemma, pos, senses })
}

/// `offset lex_filenum ss_type w_cnt word lex_id ... p_cnt pointers ... [frames] | gloss`
pub(super) fn parse_data_file(text: &str, pos: PartOfSpeech, file: &str) -> Result<Vec<Synset>, LexError> {
    content_lines(text)
        .map(|(n, line)| parse_data_line(line, pos).ok_or_else(|| malformed(file, n)))
        .collect()
}

fn parse_data_line(line: &str, pos: PartOfSpeech) -> Option<Synset> {
    let (head, gloss) = match line.split_once('|') {
        Some((h, g)) => (h, g.trim()),
        None => (line, ""),
    };
    let mut fields = head.split_whitespace();
    let offset: u32 = fields.next()?.parse().ok()?;
    let _lex_filenum = fields.next()?;
    let ss_type = PartOfSpeech::from_letter(single_char(fields.next()?)?)?;
    if ss_type != pos {
        return None;
    }
    let w_cnt = usize::from_str_radix(fields.next()?, 16).ok()?;
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = strip_adjective_marker(fields.next()?);
        let _lex_id = fields.next()?;
        let lemma = word.to_lowercase();
        if !lemmas.contains(&lemma) {
            lemmas.push(lemma);
        }
    }
    let p_cnt: usize = fields.next()?.parse().ok()?;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = fields.next()?;
        let target: u32 = fields.next()?.parse().ok()?;
        let target_pos = PartOfSpeech::from_letter(single_char(fields.next()?)?)?;
        let _source_target = fields.next()?;
        if symbol == "@" || symbol == "@i" {
            let id = SynsetId::new(target_pos, target);
            if !hypernyms.contains(&id) {
                hypernyms.push(id);
            }
        }
    }
    // Verb frames (`f_cnt + f_num w_num ...`) follow for verbs and are not used.
    Some(Synset {
        id: SynsetId::new(pos, offset),
        lemmas,
        gloss: gloss.to_string(),
        hypernyms,
        tagged_count: 0,
    })
}

/// Adjective syntactic markers: `(a)`, `(p)`, `(ip)`.
fn strip_adjective_marker(word: &str) -> &str {
    match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    }
}

/// `inflected base [base...]`
pub(super) fn parse_exception_file(text: &str, file: &str) -> Result<Vec<(String, Vec<String>)>, LexError> {
    content_lines(text)
        .map(|(n, line)| {
            let mut fields = line.split_whitespace();
            let inflected = fields.next().ok_or_else(|| malformed(file, n))?;
            let bases: Vec<String> = fields.map(str::to_lowercase).collect();
            if bases.is_empty() {
                return Err(malformed(file, n));
            }
            Ok((inflected.to_lowercase(), bases))
        })
        .collect()
}

/// `sense_key synset_offset sense_number tag_cnt`, returning
/// `(sense_key, synset, tag_cnt)` per line.
pub(super) fn parse_sense_index(text: &str, file: &str) -> Result<Vec<(String, SynsetId, u32)>, LexError> {
    content_lines(text)
        .map(|(n, line)| parse_sense_line(line).ok_or_else(|| malformed(file, n)))
        .collect()
}

fn parse_sense_line(line: &str) -> Option<(String, SynsetId, u32)> {
    let mut fields = line.split_whitespace();
    let key = fields.next()?;
    let offset: u32 = fields.next()?.parse().ok()?;
    let _sense_number: u32 = fields.next()?.parse().ok()?;
    let count: u32 = fields.next()?.parse().ok()?;
    let (_, rest) = key.split_once('%')?;
    let pos = match rest.split(':').next()? {
        "1" => PartOfSpeech::Noun,
        "2" => PartOfSpeech::Verb,
        "3" | "5" => PartOfSpeech::Adjective,
        "4" => PartOfSpeech::Adverb,
        _ => return None,
    };
    Some((key.to_string(), SynsetId::new(pos, offset), count))
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}
