use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::corpus::{tag_spans, AnnotatedRecipe, SlotLabel};
use crate::errors::{Error, Result};

/// Labeled-span counts of one device.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Distribution {
    pub counts: BTreeMap<SlotLabel, usize>,
}

impl Distribution {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, label: SlotLabel) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    /// Share of spans with `label`, in percent.
    pub fn percent(&self, label: SlotLabel) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            100.0 * self.count(label) as f64 / total as f64
        }
    }
}

/// Span counts per slot label, keyed by the recipe device (`"all"` when
/// `per_device` is false, `"unknown"` for recipes without a device).
pub fn label_distribution(
    recipes: &[AnnotatedRecipe],
    per_device: bool,
) -> Result<BTreeMap<String, Distribution>> {
    if recipes.is_empty() {
        return Err(Error::EmptyInput("no recipes"));
    }
    let mut out: BTreeMap<String, Distribution> = BTreeMap::new();
    for r in recipes {
        let key = if per_device {
            r.device.clone().unwrap_or_else(|| "unknown".into())
        } else {
            "all".into()
        };
        let dist = out.entry(key).or_default();
        for l in SlotLabel::ALL {
            dist.counts.entry(l).or_insert(0);
        }
        for (_, tags) in &r.sentences {
            for span in tag_spans(tags.as_slice()).0 {
                *dist.counts.entry(span.label).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}
