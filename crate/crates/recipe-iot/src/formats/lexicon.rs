//! Device dictionary files: `class<TAB>parent-or-_<TAB>term1,term2,...`.
//! Blank lines and `#` comments are skipped.

use recipe_iot_core::lexicon::DeviceLexicon;

use crate::error::{Error, Result};

/// The dictionary shipped with the tool.
pub const BUILTIN_LEXICON: &str = include_str!("../../data/lexicon.tsv");

pub fn parse_lexicon(text: &str) -> Result<DeviceLexicon> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(i + 1, format!("expected 3 columns, found {}", cols.len())));
        }
        let class = cols[0].trim();
        if class.is_empty() {
            return Err(Error::parse(i + 1, "empty class name"));
        }
        let parent = match cols[1].trim() {
            "_" | "" => None,
            p => Some(p.to_string()),
        };
        let terms: Vec<String> = cols[2]
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        entries.push((class.to_string(), parent, terms));
    }
    Ok(DeviceLexicon::from_entries(entries)?)
}

pub fn builtin_lexicon() -> DeviceLexicon {
    parse_lexicon(BUILTIN_LEXICON).expect("bundled lexicon is valid")
}

/// One line per class in name order, terms sorted.
pub fn emit_lexicon(lex: &DeviceLexicon) -> String {
    let mut out = String::new();
    for (name, class) in lex.classes() {
        let terms: Vec<&str> = class.terms.iter().map(String::as_str).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            name,
            class.parent.as_deref().unwrap_or("_"),
            terms.join(",")
        ));
    }
    out
}
