//! doccano sequence-labeling exports: one JSON object per line with `text`
//! and `labels` (or `label`) as `[start, end, "Where"]` character spans.
//! Optional `id`, `recipe_id` and `device` fields carry sentence identity.

use recipe_iot_core::corpus::{Sentence, SlotLabel, SpanAnnotation};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

fn id_field(obj: &Map<String, Value>, key: &str) -> Option<String> {
    match obj.get(key)? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn span(v: &Value, line: usize, char_len: usize) -> Result<SpanAnnotation> {
    let bad = || Error::parse(line, format!("malformed span {v}"));
    let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
    let start = arr[0].as_u64().ok_or_else(bad)? as usize;
    let end = arr[1].as_u64().ok_or_else(bad)? as usize;
    let name = arr[2].as_str().ok_or_else(bad)?;
    let label: SlotLabel = name
        .parse()
        .map_err(|_| Error::parse(line, format!("unknown slot label `{name}`")))?;
    if start >= end || end > char_len {
        return Err(Error::parse(
            line,
            format!("span {start}..{end} outside text of length {char_len}"),
        ));
    }
    Ok(SpanAnnotation::new(start, end, label))
}

/// Parses an export. Unknown labels, malformed JSON and out-of-range spans
/// are errors naming the (1-based) line.
pub fn load_doccano(text: &str) -> Result<Vec<(Sentence, Vec<SpanAnnotation>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(raw).map_err(|e| Error::parse(line, format!("invalid JSON: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(line, "expected a JSON object"))?;
        let text = obj
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse(line, "missing `text`"))?;
        let id = id_field(obj, "id").unwrap_or_else(|| format!("s{line}"));
        let recipe_id = id_field(obj, "recipe_id").unwrap_or_else(|| id.clone());
        let mut sentence = Sentence::new(id, recipe_id, text);
        if let Some(d) = obj.get("device").and_then(Value::as_str) {
            sentence = sentence.with_device_hint(d);
        }
        let labels = match obj.get("labels").or_else(|| obj.get("label")) {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(items)) => {
                let n = sentence.char_len();
                items.iter().map(|s| span(s, line, n)).collect::<Result<_>>()?
            }
            Some(_) => return Err(Error::parse(line, "`labels` must be a list")),
        };
        out.push((sentence, labels));
    }
    Ok(out)
}

#[derive(serde::Serialize)]
struct Line<'a> {
    id: &'a str,
    recipe_id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    device: Option<&'a str>,
    text: &'a str,
    labels: Vec<(usize, usize, &'a str)>,
}

/// Writes one JSON line per sentence.
pub fn emit_doccano(data: &[(Sentence, Vec<SpanAnnotation>)]) -> String {
    let mut out = String::new();
    for (s, spans) in data {
        let line = Line {
            id: &s.id,
            recipe_id: &s.recipe_id,
            device: s.device_hint.as_deref(),
            text: &s.text,
            labels: spans.iter().map(|sp| (sp.start, sp.end, sp.label.as_str())).collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_where_span() {
        let d = load_doccano(r#"{"text":"Preheat the oven","labels":[[12,16,"Where"]]}"#).unwrap();
        assert_eq!(d[0].1, vec![SpanAnnotation::new(12, 16, SlotLabel::Where)]);
        assert_eq!(d[0].0.tokens.len(), 3);
    }

    #[test]
    fn empty_labels_and_doccano_label_key() {
        let d = load_doccano("{\"text\":\"stir well\",\"labels\":[]}\n\n{\"text\":\"oven\",\"label\":[[0,4,\"Where\"]]}").unwrap();
        assert!(d[0].1.is_empty());
        assert_eq!(d[1].1.len(), 1);
        assert_eq!(d[1].0.id, "s3");
    }

    #[test]
    fn errors_name_the_line() {
        let err = load_doccano("{\"text\":\"a\",\"labels\":[]}\n{\"text\":\"oven\",\"labels\":[[0,4,\"WHEN\"]]}").unwrap_err();
        assert_eq!(err.to_string(), "line 2: unknown slot label `WHEN`");
        let err = load_doccano("{oops").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(load_doccano(r#"{"text":"oven","labels":[[0,9,"Where"]]}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let text = "{\"id\":\"a\",\"recipe_id\":\"r\",\"device\":\"oven\",\"text\":\"heat the oven\",\"labels\":[[9,13,\"Where\"]]}\n";
        let d = load_doccano(text).unwrap();
        assert_eq!(emit_doccano(&d), text);
    }
}
