//! Synthetic annotated corpus shared by the integration tests.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use recipe_iot::formats::conll::emit_conll;
use recipe_iot_core::corpus::{spans_to_iob, Sentence, SlotLabel, SpanAnnotation, TagSequence};

/// Builds a sentence whose spans are given as `(substring, label)`; each
/// substring is located left to right.
pub fn tagged(id: &str, recipe: &str, device: Option<&str>, text: &str, spans: &[(&str, SlotLabel)]) -> (Sentence, TagSequence) {
    let mut s = Sentence::new(id, recipe, text);
    if let Some(d) = device {
        s = s.with_device_hint(d);
    }
    let mut from = 0;
    let anns: Vec<SpanAnnotation> = spans
        .iter()
        .map(|(sub, label)| {
            let byte = from + text[from..].find(sub).unwrap_or_else(|| panic!("`{sub}` not in `{text}`"));
            from = byte + sub.len();
            let start = text[..byte].chars().count();
            SpanAnnotation::new(start, start + sub.chars().count(), *label)
        })
        .collect();
    let (tags, diags) = spans_to_iob(&s, &anns);
    assert!(diags.is_empty(), "{diags:?}");
    (s, tags)
}

/// `n_oven` oven recipes, `n_fridge` fridge recipes and a few unannotated
/// recipes that mention a device, all drawn from fixed templates.
pub fn synthetic_corpus(n_oven: usize, n_fridge: usize) -> Vec<(Sentence, TagSequence)> {
    use SlotLabel::*;
    let temps = ["350", "375", "400", "425", "180", "200"];
    let units = ["degrees F", "degrees Fahrenheit", "F", "degrees C"];
    let times = ["10", "15", "20", "30", "45"];
    let mut out = Vec::new();
    for r in 0..n_oven {
        let rid = format!("oven-{r}");
        let t = temps[r % temps.len()];
        let u = units[r % units.len()];
        let m = times[r % times.len()];
        let how = format!("{t} {u}");
        let dev = Some("oven");
        out.push(tagged(&format!("{rid}-1"), &rid, dev, &format!("Preheat the oven to {how}."), &[("Preheat", Why), ("oven", Where), (&how, How)]));
        out.push(tagged(&format!("{rid}-2"), &rid, dev, "Mix the flour and sugar in a bowl.", &[]));
        let mins = format!("{m} minutes");
        if r % 3 == 0 {
            out.push(tagged(&format!("{rid}-3"), &rid, dev, &format!("Bake for {mins} until golden."), &[(&mins, How)]));
        } else {
            out.push(tagged(&format!("{rid}-3"), &rid, dev, &format!("Bake in the oven for {mins}."), &[("oven", Where), (&mins, How)]));
        }
        if r % 4 == 1 {
            out.push(tagged(
                &format!("{rid}-4"),
                &rid,
                dev,
                &format!("Increase the temperature of the oven to {how}."),
                &[("Increase", Why), ("temperature", What), ("oven", Where), (&how, How)],
            ));
        }
    }
    for r in 0..n_fridge {
        let rid = format!("fridge-{r}");
        let h = times[(r + 2) % times.len()];
        let dev = Some("fridge");
        let hours = format!("{h} hours");
        out.push(tagged(&format!("{rid}-1"), &rid, dev, "Whisk the cream until stiff.", &[]));
        out.push(tagged(&format!("{rid}-2"), &rid, dev, &format!("Chill in the fridge for {hours}."), &[("Chill", Why), ("fridge", Where), (&hours, How)]));
        if r % 2 == 0 {
            out.push(tagged(&format!("{rid}-3"), &rid, dev, "Keep in the refrigerator until serving.", &[("refrigerator", Where)]));
        }
    }
    for r in 0..(n_oven + n_fridge) / 8 {
        let rid = format!("fp-{r}");
        out.push(tagged(&format!("{rid}-1"), &rid, None, "Use oven mitts when serving.", &[]));
    }
    out
}

pub fn write_corpus(path: &Path, data: &[(Sentence, TagSequence)]) {
    std::fs::write(path, emit_conll(data)).unwrap();
}

/// Runs the built binary with logging silenced.
pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recipe-iot"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

pub fn cli_ok(args: &[&str]) -> Output {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}
