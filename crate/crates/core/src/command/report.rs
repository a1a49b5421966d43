use alloc::collections::BTreeMap;
use alloc::string::String;

use super::{assemble_commands, infer_missing_slots, InferenceRule};
use crate::corpus::{iob_to_spans, AnnotatedRecipe, SlotLabel};
use crate::errors::{Error, Result};
use crate::lexicon::DeviceLexicon;

/// Command counts of one device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DeviceCompleteness {
    pub commands: usize,
    pub text_complete: usize,
    pub inferred_complete: usize,
    /// Commands lacking each slot before inference, in `SlotLabel::ALL` order.
    pub missing: [usize; 4],
}

impl DeviceCompleteness {
    fn frac(&self, n: usize) -> f64 {
        if self.commands == 0 {
            0.0
        } else {
            n as f64 / self.commands as f64
        }
    }

    pub fn text_complete_rate(&self) -> f64 {
        self.frac(self.text_complete)
    }

    pub fn inferred_complete_rate(&self) -> f64 {
        self.frac(self.inferred_complete)
    }

    pub fn missing_rate(&self, label: SlotLabel) -> f64 {
        let k = SlotLabel::ALL.iter().position(|&l| l == label).unwrap();
        self.frac(self.missing[k])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompletenessReport {
    /// Keyed by recipe device (`"unknown"` when absent).
    pub per_device: BTreeMap<String, DeviceCompleteness>,
}

/// Assembles commands from the gold tags of every sentence and counts how many
/// are complete from the text alone and after rule inference. The recipe
/// device serves as the hint for sentences lacking their own.
pub fn completeness_report(
    recipes: &[AnnotatedRecipe],
    lex: &DeviceLexicon,
    rules: &[InferenceRule],
) -> Result<CompletenessReport> {
    if recipes.is_empty() {
        return Err(Error::EmptyInput("no recipes"));
    }
    let mut per_device: BTreeMap<String, DeviceCompleteness> = BTreeMap::new();
    for r in recipes {
        let key = r.device.clone().unwrap_or_else(|| "unknown".into());
        let entry = per_device.entry(key).or_default();
        for (sentence, tags) in &r.sentences {
            let (spans, _) = iob_to_spans(sentence, tags)?;
            let hinted;
            let sentence = match (&sentence.device_hint, &r.device) {
                (None, Some(d)) => {
                    hinted = sentence.clone().with_device_hint(d.clone());
                    &hinted
                }
                _ => sentence,
            };
            for cmd in assemble_commands(sentence, &spans, lex) {
                entry.commands += 1;
                for (k, l) in SlotLabel::ALL.iter().enumerate() {
                    if cmd.missing().contains(l) {
                        entry.missing[k] += 1;
                    }
                }
                if cmd.complete {
                    entry.text_complete += 1;
                }
                if infer_missing_slots(cmd, rules).complete {
                    entry.inferred_complete += 1;
                }
            }
        }
    }
    Ok(CompletenessReport { per_device })
}
