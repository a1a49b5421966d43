//! Raw recipes to normalized, tokenized sentences ready for annotation.

use recipe_iot_core::corpus::{normalize_text, AcronymTable, RawRecipe, Sentence};
use recipe_iot_core::lexicon::DeviceLexicon;

/// Splits a step into sentences after `.`, `!` or `?` followed by
/// whitespace. Decimal points such as `2.5` stay inside their sentence.
pub fn split_sentences(step: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = step.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_some_and(|(_, n)| n.is_whitespace()) {
            let end = i + c.len_utf8();
            let s = step[start..end].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = end;
        }
    }
    let rest = step[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

/// Normalizes and tokenizes every instruction of `recipe`. Sentence ids are
/// `<recipe>-<n>`, counted from 1. The device hint is the top-level class of
/// the first dictionary term found in the title or the sentences.
pub fn recipe_sentences(recipe: &RawRecipe, acronyms: &AcronymTable, lex: &DeviceLexicon) -> Vec<Sentence> {
    let mut sentences: Vec<Sentence> = Vec::new();
    for step in &recipe.instructions {
        for s in split_sentences(step) {
            let text = normalize_text(s, acronyms);
            if text.is_empty() {
                continue;
            }
            let id = format!("{}-{}", recipe.id, sentences.len() + 1);
            sentences.push(Sentence::new(id, recipe.id.clone(), text));
        }
    }
    let title = Sentence::new("title", recipe.id.clone(), normalize_text(&recipe.title, acronyms));
    let device = std::iter::once(&title)
        .chain(&sentences)
        .flat_map(|s| lex.match_devices(s))
        .next()
        .and_then(|m| lex.root_of(&m.class).map(str::to_string));
    if let Some(d) = device {
        for s in &mut sentences {
            s.device_hint = Some(d.clone());
        }
    }
    sentences
}
