//! Command output: one JSON object per line.
//!
//! Schema version 1 fields: `schema_version`, `sentence_id`, `where`,
//! `where_source` (`text`, `device_hint` or `missing`), `what`, `why`, `how`
//! (`raw`, `quantity`, `unit`, `kind`, or null), `complete`, `inferred`
//! (sorted slot names), `additional` (`[label, text]` pairs), `spans`
//! (`[start, end, label]` character offsets) and `attachment`, the rule used
//! to group spans (`nearest-where-left-tie`).

use recipe_iot_core::command::{CueKind, IoTCommand};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const ATTACHMENT: &str = "nearest-where-left-tie";

#[derive(Serialize)]
struct HowJson<'a> {
    raw: &'a str,
    quantity: Option<f64>,
    unit: Option<&'a str>,
    kind: &'a str,
}

#[derive(Serialize)]
struct CueJson<'a> {
    keyword: &'a str,
    kind: &'a str,
    token: usize,
}

#[derive(Serialize)]
struct CommandJson<'a> {
    schema_version: u32,
    sentence_id: &'a str,
    #[serde(rename = "where")]
    where_: Option<&'a str>,
    where_source: &'a str,
    what: Option<&'a str>,
    why: Option<&'a str>,
    how: Option<HowJson<'a>>,
    complete: bool,
    inferred: Vec<&'a str>,
    additional: Vec<(&'a str, &'a str)>,
    spans: Vec<(usize, usize, &'a str)>,
    cues: Vec<CueJson<'a>>,
    attachment: &'a str,
}

/// Control cues found in the command's sentence, as `(keyword, kind, token)`.
pub type Cue = (String, CueKind, usize);

pub fn command_json(cmd: &IoTCommand, cues: &[Cue]) -> String {
    let j = CommandJson {
        schema_version: SCHEMA_VERSION,
        sentence_id: &cmd.provenance.sentence_id,
        where_: cmd.where_.as_deref(),
        where_source: cmd.provenance.where_source.as_str(),
        what: cmd.what.as_deref(),
        why: cmd.why.as_deref(),
        how: cmd.how.as_ref().map(|h| HowJson {
            raw: &h.raw,
            quantity: h.quantity,
            unit: h.unit.as_deref(),
            kind: h.kind.as_str(),
        }),
        complete: cmd.complete,
        inferred: cmd.inferred.iter().map(String::as_str).collect(),
        additional: cmd.additional.iter().map(|(l, t)| (l.as_str(), t.as_str())).collect(),
        spans: cmd
            .provenance
            .spans
            .iter()
            .map(|s| (s.start, s.end, s.label.as_str()))
            .collect(),
        cues: cues
            .iter()
            .map(|(k, kind, token)| CueJson {
                keyword: k,
                kind: kind.as_str(),
                token: *token,
            })
            .collect(),
        attachment: ATTACHMENT,
    };
    serde_json::to_string(&j).expect("command serializes")
}
