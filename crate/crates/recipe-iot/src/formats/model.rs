//! Line-oriented CRF model files.
//!
//! ```text
//! recipe-iot-crf<TAB>1
//! metadata<TAB>M           then M lines  key<TAB>value
//! labels<TAB>L             then L lines  tag
//! features<TAB>F           then F lines  feature key
//! state<TAB>S              then S lines  feature-id<TAB>label-id<TAB>weight
//! transitions<TAB>T        then T lines  from-id<TAB>to-id<TAB>weight
//! end<TAB>SHA256
//! ```
//!
//! Only nonzero weights are listed. Keys and values are backslash-escaped,
//! weights use the shortest decimal form that parses back to the same `f64`,
//! and the checksum covers every byte before the `end` line.

use recipe_iot_core::corpus::Tag;
use recipe_iot_core::crf::{CrfModel, ModelMetadata};
use recipe_iot_core::features::FeatureIndex;
use sha2::{Digest, Sha256};

use super::{escape, unescape};
use crate::error::{Error, Result};

pub const MAGIC: &str = "recipe-iot-crf";
pub const FORMAT_VERSION: u32 = 1;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_model(model: &CrfModel) -> String {
    let mut out = format!("{MAGIC}\t{FORMAT_VERSION}\n");
    out.push_str(&format!("metadata\t{}\n", model.metadata.len()));
    for (k, v) in &model.metadata {
        out.push_str(&format!("{}\t{}\n", escape(k), escape(v)));
    }
    out.push_str(&format!("labels\t{}\n", model.num_labels()));
    for tag in model.labels() {
        out.push_str(&format!("{tag}\n"));
    }
    out.push_str(&format!("features\t{}\n", model.num_features()));
    for key in model.feature_index().keys() {
        out.push_str(&escape(key));
        out.push('\n');
    }
    let l = model.num_labels();
    let state: Vec<(usize, f64)> = model
        .state_weights()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, w)| *w != 0.0)
        .collect();
    out.push_str(&format!("state\t{}\n", state.len()));
    for (i, w) in state {
        out.push_str(&format!("{}\t{}\t{w:?}\n", i / l, i % l));
    }
    let trans: Vec<(usize, f64)> = model
        .transition_weights()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, w)| *w != 0.0)
        .collect();
    out.push_str(&format!("transitions\t{}\n", trans.len()));
    for (i, w) in trans {
        out.push_str(&format!("{}\t{}\t{w:?}\n", i / l, i % l));
    }
    let digest = hex(&Sha256::digest(out.as_bytes()));
    out.push_str(&format!("end\t{digest}\n"));
    out
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l)
            }
            None => Err(Error::Model(format!("truncated after line {}", self.last))),
        }
    }

    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::Model(format!("line {}: {msg}", self.last))
    }

    fn section(&mut self, name: &str) -> Result<usize> {
        let line = self.next()?;
        let count = line
            .strip_prefix(name)
            .and_then(|r| r.strip_prefix('\t'))
            .ok_or_else(|| self.err(format!("expected `{name}` section")))?;
        count.parse().map_err(|_| self.err(format!("bad count `{count}`")))
    }

    fn triple(&mut self, rows: usize, cols: usize) -> Result<(usize, usize, f64)> {
        let line = self.next()?;
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(self.err("expected 3 fields"));
        }
        let a: usize = parts[0].parse().map_err(|_| self.err("bad index"))?;
        let b: usize = parts[1].parse().map_err(|_| self.err("bad index"))?;
        let w: f64 = parts[2].parse().map_err(|_| self.err("bad weight"))?;
        if a >= rows || b >= cols {
            return Err(self.err("index out of range"));
        }
        if !w.is_finite() {
            return Err(self.err("non-finite weight"));
        }
        Ok((a, b, w))
    }
}

pub fn load_model(text: &str) -> Result<CrfModel> {
    let body_end = text
        .rfind("end\t")
        .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
        .ok_or_else(|| Error::Model("missing end line (truncated file?)".into()))?;
    let (body, tail) = text.split_at(body_end);
    let expected = tail
        .strip_prefix("end\t")
        .map(|s| s.trim_end_matches('\n'))
        .ok_or_else(|| Error::Model("missing end line".into()))?;
    if hex(&Sha256::digest(body.as_bytes())) != expected {
        return Err(Error::Model("checksum mismatch (corrupted file)".into()));
    }

    let mut r = Reader {
        lines: body.lines().enumerate(),
        last: 0,
    };
    let header = r.next()?;
    match header.split_once('\t') {
        Some((MAGIC, v)) if v == FORMAT_VERSION.to_string() => {}
        Some((MAGIC, v)) => return Err(Error::Model(format!("unsupported format version {v}"))),
        _ => return Err(Error::Model("not a recipe-iot model file".into())),
    }

    let mut metadata = ModelMetadata::new();
    for _ in 0..r.section("metadata")? {
        let line = r.next()?;
        let (k, v) = line.split_once('\t').ok_or_else(|| r.err("expected key and value"))?;
        metadata.insert(unescape(k), unescape(v));
    }
    let n_labels = r.section("labels")?;
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let line = r.next()?;
        labels.push(line.parse::<Tag>().map_err(|_| r.err(format!("bad label `{line}`")))?);
    }
    let n_features = r.section("features")?;
    let mut keys = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        keys.push(unescape(r.next()?));
    }
    let index = FeatureIndex::from_keys(keys.iter().cloned());
    if index.keys() != keys.as_slice() {
        return Err(Error::Model("feature keys are not sorted and unique".into()));
    }
    let l = labels.len();
    let mut state = vec![0.0; n_features * l];
    for _ in 0..r.section("state")? {
        let (f, y, w) = r.triple(n_features, l)?;
        state[f * l + y] = w;
    }
    let mut trans = vec![0.0; l * l];
    for _ in 0..r.section("transitions")? {
        let (a, b, w) = r.triple(l, l)?;
        trans[a * l + b] = w;
    }
    if r.lines.next().is_some() {
        return Err(r.err("unexpected content before end line"));
    }
    Ok(CrfModel::from_parts(labels, index, state, trans, metadata)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> CrfModel {
        let idx = FeatureIndex::from_keys(["w=oven".to_string(), "w=tab\there".to_string(), "+1:w=x".to_string()]);
        let mut m = CrfModel::zeros(Tag::ALL.to_vec(), idx).unwrap();
        m.set_state_weight(0, 1, 0.1 + 0.2);
        m.set_state_weight(2, 8, -1e-300);
        m.set_transition_weight(1, 2, 2.5);
        m.metadata.insert("c1".into(), "0.5".into());
        m.metadata.insert("note".into(), "multi\nline".into());
        m
    }

    #[test]
    fn exact_round_trip() {
        let m = toy();
        let text = save_model(&m);
        let back = load_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(save_model(&back), text);
    }

    #[test]
    fn truncation_and_corruption() {
        let text = save_model(&toy());
        for cut in [0, 10, text.len() / 2, text.len() - 3] {
            assert!(load_model(&text[..cut]).is_err(), "cut at {cut}");
        }
        let corrupted = text.replacen("2.5", "2.6", 1);
        assert!(load_model(&corrupted).unwrap_err().to_string().contains("checksum"));
    }

    #[test]
    fn version_check() {
        let text = save_model(&toy()).replacen("crf\t1", "crf\t2", 1);
        // recompute checksum so only the version is wrong
        let body = &text[..text.rfind("end\t").unwrap()];
        let fixed = format!("{body}end\t{}\n", hex(&Sha256::digest(body.as_bytes())));
        assert!(load_model(&fixed).unwrap_err().to_string().contains("version 2"));
    }
}
