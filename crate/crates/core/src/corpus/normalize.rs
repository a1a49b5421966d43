use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

const DEFAULT_ACRONYMS: &str = include_str!("../../data/acronyms.tsv");

/// Case-insensitive whole-token abbreviation expansions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AcronymTable {
    entries: BTreeMap<String, String>,
}

impl AcronymTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `short<TAB>full` lines. Blank lines and `#` comments are
    /// skipped; lines without a tab are ignored.
    pub fn parse(text: &str) -> Self {
        let mut table = Self::new();
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if let Some((short, full)) = line.split_once('\t') {
                table.insert(short.trim(), full.trim());
            }
        }
        table
    }

    /// The cooking abbreviations shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_ACRONYMS)
    }

    pub fn insert(&mut self, short: &str, full: &str) {
        if !short.is_empty() {
            self.entries.insert(short.to_lowercase(), full.to_string());
        }
    }

    pub fn get(&self, short: &str) -> Option<&str> {
        self.entries.get(&short.to_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Normalizes a raw instruction: ASCII transliteration, emoticon removal,
/// acronym expansion, punctuation cleanup and whitespace collapsing.
///
/// The result is pure ASCII and `normalize_text(normalize_text(s)) ==
/// normalize_text(s)`.
pub fn normalize_text(s: &str, acronyms: &AcronymTable) -> String {
    let mut current = normalize_once(s, acronyms);
    // Removing an emoticon or punctuation can expose a new one; iterate to a
    // fixed point. Expansions that feed themselves are cut off by the bound.
    for _ in 0..8 {
        let next = normalize_once(&current, acronyms);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn normalize_once(s: &str, acronyms: &AcronymTable) -> String {
    let ascii = to_ascii(s);
    let no_emoticons = strip_emoticons(&ascii);
    let expanded = expand_acronyms(&no_emoticons, acronyms);
    let cleaned = clean_punctuation(&expanded);
    collapse_whitespace(&cleaned)
}

fn substitute(c: char) -> Option<&'static str> {
    Some(match c {
        '\u{2044}' | '\u{2215}' => "/",
        '\u{2018}' | '\u{2019}' | '\u{201a}' | '\u{201b}' | '\u{2032}' | '\u{00b4}' => "'",
        '\u{201c}' | '\u{201d}' | '\u{201e}' | '\u{201f}' | '\u{2033}' | '\u{00ab}'
        | '\u{00bb}' => "\"",
        '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2013}' | '\u{2014}' | '\u{2015}'
        | '\u{2212}' => "-",
        '\u{00d7}' => "x",
        '\u{00df}' => "ss",
        '\u{00e6}' => "ae",
        '\u{00c6}' => "AE",
        '\u{0153}' => "oe",
        '\u{0152}' => "OE",
        '\u{00f8}' => "o",
        '\u{00d8}' => "O",
        '\u{0142}' => "l",
        '\u{0141}' => "L",
        '\u{0111}' => "d",
        '\u{0110}' => "D",
        '\u{00f0}' => "d",
        '\u{00fe}' => "th",
        '\u{2022}' | '\u{00b7}' => " ",
        _ => return None,
    })
}

fn to_ascii(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c.is_ascii() {
            if c.is_ascii_control() && !c.is_ascii_whitespace() {
                continue;
            }
            out.push(c);
        } else if let Some(rep) = substitute(c) {
            out.push_str(rep);
        } else {
            for d in core::iter::once(c).nfkd() {
                if d.is_ascii() {
                    if !(d.is_ascii_control() && !d.is_ascii_whitespace()) {
                        out.push(d);
                    }
                } else if let Some(rep) = substitute(d) {
                    out.push_str(rep);
                } else if is_combining_mark(d) {
                    // accents fall away
                } else if d.is_whitespace() {
                    out.push(' ');
                }
            }
        }
    }
    out
}

fn is_eyes(b: u8) -> bool {
    matches!(b, b':' | b';' | b'=')
}

fn is_nose(b: u8) -> bool {
    matches!(b, b'-' | b'\'' | b'^' | b'o')
}

fn is_mouth(b: u8) -> bool {
    matches!(
        b,
        b')' | b'(' | b'D' | b'P' | b'p' | b'O' | b'o' | b'/' | b'\\' | b'|' | b']' | b'['
            | b'*' | b'3' | b'$' | b'@' | b'S' | b'x' | b'X'
    )
}

/// Length of an emoticon starting at `i`, if any.
fn emoticon_at(bytes: &[u8], i: usize) -> Option<usize> {
    let prev = if i > 0 { Some(bytes[i - 1]) } else { None };
    // "<3"
    if bytes[i] == b'<' && bytes.get(i + 1) == Some(&b'3') {
        let next = bytes.get(i + 2);
        if next.is_none_or(|b| !b.is_ascii_alphanumeric()) {
            return Some(2);
        }
    }
    if !is_eyes(bytes[i]) {
        return None;
    }
    // "1:3" or "10:30" are ratios and times.
    if prev.is_some_and(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut j = i + 1;
    if bytes.get(j).is_some_and(|&b| is_nose(b))
        && bytes.get(j + 1).is_some_and(|&b| is_mouth(b))
    {
        j += 1;
    }
    let mouth = *bytes.get(j)?;
    if !is_mouth(mouth) {
        return None;
    }
    // repeated mouths, as in ":)))"
    let mut end = j + 1;
    while bytes.get(end) == Some(&mouth) && !mouth.is_ascii_alphanumeric() {
        end += 1;
    }
    let next = bytes.get(end).copied();
    if next.is_some_and(|b| b.is_ascii_alphanumeric()) {
        return None;
    }
    // "http://"
    if matches!(mouth, b'/' | b'\\') && next == Some(mouth) {
        return None;
    }
    Some(end - i)
}

fn strip_emoticons(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < bytes.len() {
        if let Some(n) = emoticon_at(bytes, i) {
            out.push(' ');
            i += n;
        } else {
            out.push(bytes[i] as char);
            i += 1;
        }
    }
    out
}

const LEADING_AFFIX: &[char] = &['(', '[', '"', '\''];
const TRAILING_AFFIX: &[char] = &['.', ',', ';', ':', '!', '?', ')', ']', '"', '\''];

fn expand_chunk<'a>(chunk: &'a str, acronyms: &'a AcronymTable) -> Option<String> {
    let lead_max = chunk.len() - chunk.trim_start_matches(LEADING_AFFIX).len();
    let trail_max = chunk.len() - chunk.trim_end_matches(TRAILING_AFFIX).len();
    for lead in 0..=lead_max {
        for trail in 0..=trail_max {
            if lead + trail >= chunk.len() {
                continue;
            }
            let core = &chunk[lead..chunk.len() - trail];
            if let Some(full) = acronyms.get(core) {
                let mut out = String::with_capacity(full.len() + lead + trail);
                out.push_str(&chunk[..lead]);
                out.push_str(full);
                out.push_str(&chunk[chunk.len() - trail..]);
                return Some(out);
            }
        }
    }
    None
}

fn expand_acronyms(s: &str, acronyms: &AcronymTable) -> String {
    if acronyms.is_empty() {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut chunk_start = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() {
            if let Some(st) = chunk_start.take() {
                push_chunk(&mut out, &s[st..i], acronyms);
            }
            out.push(c);
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(st) = chunk_start {
        push_chunk(&mut out, &s[st..], acronyms);
    }
    out
}

fn push_chunk(out: &mut String, chunk: &str, acronyms: &AcronymTable) {
    match expand_chunk(chunk, acronyms) {
        Some(e) => out.push_str(&e),
        None => out.push_str(chunk),
    }
}

/// Decorative characters that never carry instruction content.
fn is_decorative(c: char) -> bool {
    matches!(c, '*' | '~' | '^' | '_' | '|' | '`' | '#' | '<' | '>' | '{' | '}' | '=' | '\\')
}

fn is_collapsible(c: char) -> bool {
    matches!(c, '!' | '?' | '.' | ',' | ';' | ':' | '-' | '\'' | '"' | '/' | '(' | ')' | '[' | ']')
}

fn clean_punctuation(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev: Option<char> = None;
    for c in s.chars() {
        if is_decorative(c) {
            out.push(' ');
            prev = Some(' ');
            continue;
        }
        if is_collapsible(c) && prev == Some(c) {
            continue;
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

fn collapse_whitespace(s: &str) -> String {
    let parts: Vec<&str> = s.split_ascii_whitespace().collect();
    parts.join(" ")
}
