use super::{LexicalDb, PartOfSpeech};

const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];

const ADJ_RULES: &[(&str, &str)] = &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")];

fn rules(pos: PartOfSpeech) -> &'static [(&'static str, &'static str)] {
    match pos {
        PartOfSpeech::Noun => NOUN_RULES,
        PartOfSpeech::Verb => VERB_RULES,
        PartOfSpeech::Adjective => ADJ_RULES,
        PartOfSpeech::Adverb => &[],
    }
}

/// Base forms of `surface` known to the database for `pos`: the surface
/// itself, exception-list bases, then single detachment-rule results.
pub(super) fn morphy(db: &LexicalDb, surface: &str, pos: PartOfSpeech) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |cand: &str| {
        if db.has_entry(cand, pos) && !out.iter().any(|o| o == cand) {
            out.push(cand.to_string());
        }
    };
    push(surface);
    for base in db.exceptions(surface, pos) {
        push(base);
    }
    for (suffix, ending) in rules(pos) {
        if let Some(stem) = surface.strip_suffix(suffix) {
            if stem.is_empty() {
                continue;
            }
            push(&format!("{stem}{ending}"));
        }
    }
    out
}
