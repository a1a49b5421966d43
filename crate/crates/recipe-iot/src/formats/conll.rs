//! Five-column token files: `token<TAB>lemma<TAB>pos<TAB>head<TAB>tag`, `_`
//! for an absent lemma, POS or head, and a blank line after each sentence.
//!
//! Heads are 1-based with `0` for the root (stored in memory as the token
//! pointing at itself). A sentence may be preceded by `# key = value`
//! comments; `sent_id`, `recipe_id`, `device` and `text` are understood.
//! Without a `text` comment the tokens are joined by single spaces.

use recipe_iot_core::corpus::{Sentence, Tag, TagSequence, Token};

use super::{escape, unescape};
use crate::error::{Error, Result};

#[derive(Default)]
struct Pending {
    comments: Vec<(String, String)>,
    rows: Vec<(usize, Vec<String>)>,
}

fn comment(line: &str) -> Option<(String, String)> {
    let (k, v) = line.strip_prefix('#')?.split_once('=')?;
    Some((k.trim().to_string(), v.strip_prefix(' ').unwrap_or(v).to_string()))
}

fn optional(s: &str) -> Option<String> {
    (s != "_").then(|| s.to_string())
}

/// Places `words` in `text` left to right, as character offsets.
fn align(text: &str, words: &[String], line: usize) -> Result<Vec<(usize, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let wc: Vec<char> = w.chars().collect();
        let found = (pos..=chars.len().saturating_sub(wc.len()))
            .find(|&i| chars[i..i + wc.len()] == wc[..])
            .ok_or_else(|| Error::parse(line, format!("token `{w}` not found in sentence text")))?;
        out.push((found, found + wc.len()));
        pos = found + wc.len();
    }
    Ok(out)
}

fn finish(p: Pending, index: usize) -> Result<(Sentence, TagSequence)> {
    let first_line = p.rows.first().map(|r| r.0).unwrap_or(0);
    let get = |key: &str| {
        p.comments
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| unescape(v))
    };
    let id = get("sent_id").unwrap_or_else(|| format!("s{index}"));
    let recipe_id = get("recipe_id").unwrap_or_else(|| id.clone());
    let words: Vec<String> = p.rows.iter().map(|(_, c)| c[0].clone()).collect();
    let mut sentence = match get("text") {
        Some(text) => {
            let offsets = align(&text, &words, first_line)?;
            Sentence {
                id,
                recipe_id,
                tokens: words
                    .iter()
                    .zip(offsets)
                    .map(|(w, (s, e))| Token::new(w.as_str(), s, e))
                    .collect(),
                text,
                device_hint: None,
            }
        }
        None => Sentence::from_words(id, recipe_id, &words),
    };
    sentence.device_hint = get("device");

    let n = p.rows.len();
    let mut tags = Vec::with_capacity(n);
    for (t, (line, cols)) in p.rows.iter().enumerate() {
        let token = &mut sentence.tokens[t];
        token.lemma = optional(&cols[1]);
        token.pos = optional(&cols[2]);
        token.head = match cols[3].as_str() {
            "_" => None,
            h => {
                let h: usize = h
                    .parse()
                    .map_err(|_| Error::parse(*line, format!("invalid head `{h}`")))?;
                if h > n {
                    return Err(Error::parse(*line, format!("head {h} beyond sentence of {n} tokens")));
                }
                Some(if h == 0 { t } else { h - 1 })
            }
        };
        let tag: Tag = cols[4]
            .parse()
            .map_err(|_| Error::parse(*line, format!("invalid tag `{}`", cols[4])))?;
        tags.push(tag);
    }
    Ok((sentence, TagSequence(tags)))
}

pub fn parse_conll(text: &str) -> Result<Vec<(Sentence, TagSequence)>> {
    let mut out = Vec::new();
    let mut pending = Pending::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            if !pending.rows.is_empty() {
                out.push(finish(std::mem::take(&mut pending), out.len() + 1)?);
            }
            pending.comments.clear();
            continue;
        }
        if raw.starts_with('#') && !raw.contains('\t') {
            if !pending.rows.is_empty() {
                return Err(Error::parse(line, "comment inside a sentence"));
            }
            if let Some(kv) = comment(raw) {
                pending.comments.push(kv);
            }
            continue;
        }
        let cols: Vec<String> = raw.split('\t').map(str::to_string).collect();
        if cols.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 columns, found {}", cols.len())));
        }
        if cols[0].is_empty() {
            return Err(Error::parse(line, "empty token"));
        }
        pending.rows.push((line, cols));
    }
    if !pending.rows.is_empty() {
        out.push(finish(pending, out.len() + 1)?);
    }
    Ok(out)
}

pub fn emit_conll(data: &[(Sentence, TagSequence)]) -> String {
    let mut out = String::new();
    for (s, tags) in data {
        out.push_str(&format!("# sent_id = {}\n", escape(&s.id)));
        out.push_str(&format!("# recipe_id = {}\n", escape(&s.recipe_id)));
        if let Some(d) = &s.device_hint {
            out.push_str(&format!("# device = {}\n", escape(d)));
        }
        out.push_str(&format!("# text = {}\n", escape(&s.text)));
        for (t, (tok, tag)) in s.tokens.iter().zip(&tags.0).enumerate() {
            let head = match tok.head {
                None => "_".to_string(),
                Some(h) if h == t => "0".to_string(),
                Some(h) => (h + 1).to_string(),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                tok.text,
                tok.lemma.as_deref().unwrap_or("_"),
                tok.pos.as_deref().unwrap_or("_"),
                head,
                tag
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use recipe_iot_core::corpus::SlotLabel;

    #[test]
    fn bare_columns() {
        let d = parse_conll("oven\t_\t_\t_\tB-Where\nnow\t_\t_\t_\tO\n\n").unwrap();
        assert_eq!(d.len(), 1);
        let (s, t) = &d[0];
        assert_eq!(s.text, "oven now");
        assert_eq!(s.tokens[0].text, "oven");
        assert_eq!(s.tokens[0].lemma, None);
        assert_eq!(t.0, vec![Tag::B(SlotLabel::Where), Tag::O]);
    }

    #[test]
    fn full_round_trip() {
        let text = "# sent_id = s1\n# recipe_id = r1\n# device = oven\n# text = Heat  the oven.\n\
                    Heat\theat\tVERB\t0\tB-Why\nthe\tthe\tDET\t3\tO\noven\toven\tNOUN\t1\tB-Where\n.\t_\tPUNCT\t1\tO\n\n";
        let d = parse_conll(text).unwrap();
        let (s, _) = &d[0];
        assert_eq!(s.tokens[2].start, 10);
        assert_eq!(s.tokens[0].head, Some(0));
        assert_eq!(s.tokens[1].head, Some(2));
        assert_eq!(s.device_hint.as_deref(), Some("oven"));
        s.validate().unwrap();
        assert_eq!(emit_conll(&d), text);
        assert_eq!(parse_conll(&emit_conll(&d)).unwrap(), d);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_conll("a\t_\t_\t_\tO\nb\t_\tO\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_conll("a\t_\t_\t_\tB-When\n").unwrap_err();
        assert_eq!(e.to_string(), "line 1: invalid tag `B-When`");
        let e = parse_conll("a\t_\t_\t5\tO\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_conll("# text = x y\nz\t_\t_\t_\tO\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
    }

    #[test]
    fn escaped_text() {
        let s = Sentence::new("id\t1", "r", " tab\there\\n ");
        let data = vec![(s.clone(), TagSequence::all_outside(s.tokens.len()))];
        assert_eq!(parse_conll(&emit_conll(&data)).unwrap(), data);
    }
}
