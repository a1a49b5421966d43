use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Sentence;
use crate::errors::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CueKind {
    WhileCondition,
    IntervalLoop,
    Conditional,
}

impl CueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CueKind::WhileCondition => "while_condition",
            CueKind::IntervalLoop => "interval_loop",
            CueKind::Conditional => "conditional",
        }
    }
}

impl fmt::Display for CueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [CueKind::WhileCondition, CueKind::IntervalLoop, CueKind::Conditional]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown cue kind `{s}`")))
    }
}

/// A control-flow keyword found in a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlCue {
    pub keyword: String,
    pub kind: CueKind,
    pub token: usize,
}

/// Lowercased keyword to cue kind.
pub fn default_cues() -> BTreeMap<String, CueKind> {
    [
        ("until", CueKind::WhileCondition),
        ("intervals", CueKind::IntervalLoop),
        ("if", CueKind::Conditional),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn detect_control_cues(sentence: &Sentence) -> Vec<ControlCue> {
    detect_control_cues_with(sentence, &default_cues())
}

/// One cue per token matching a keyword, case-insensitively, in token order.
pub fn detect_control_cues_with(sentence: &Sentence, cues: &BTreeMap<String, CueKind>) -> Vec<ControlCue> {
    sentence
        .tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let word = t.text.to_lowercase();
            cues.get(&word).map(|&kind| ControlCue {
                keyword: word,
                kind,
                token: i,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(String, CueKind)> {
        detect_control_cues(&Sentence::new("s", "r", text))
            .into_iter()
            .map(|c| (c.keyword, c.kind))
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(kinds("cook until golden brown"), [("until".into(), CueKind::WhileCondition)]);
        assert_eq!(
            kinds("heat with 10 second intervals until melted"),
            [
                ("intervals".into(), CueKind::IntervalLoop),
                ("until".into(), CueKind::WhileCondition)
            ]
        );
        assert_eq!(kinds("if you have a 1000W, cook for 30 seconds"), [("if".into(), CueKind::Conditional)]);
        assert!(kinds("bake for 40 minutes").is_empty());
    }

    #[test]
    fn token_index_and_case() {
        let cues = detect_control_cues(&Sentence::new("s", "r", "Stir. Until thick"));
        assert_eq!(cues[0].token, 2);
        assert_eq!(cues[0].keyword, "until");
    }

    #[test]
    fn extensible() {
        let mut table = default_cues();
        table.insert("while".into(), CueKind::WhileCondition);
        let s = Sentence::new("s", "r", "whisk while pouring");
        assert_eq!(detect_control_cues_with(&s, &table).len(), 1);
        assert_eq!("interval_loop".parse::<CueKind>().unwrap(), CueKind::IntervalLoop);
        assert!("loop".parse::<CueKind>().is_err());
    }
}
