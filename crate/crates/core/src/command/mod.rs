//! IoT command tuples built from labeled spans.
//!
//! A sentence's spans are grouped around its Where spans: each Where span
//! opens one command and every other span joins the command whose Where span
//! is closest in tokens (the left one on ties). Missing What/Why slots can
//! then be filled from `(device, How kind)` rules.

mod cues;
mod how;
mod report;
mod rules;

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{spans_to_iob, tag_spans, Sentence, SlotLabel, SpanAnnotation, TokenSpan};
use crate::lexicon::DeviceLexicon;

pub use cues::{default_cues, detect_control_cues, detect_control_cues_with, ControlCue, CueKind};
pub use how::{parse_how, HowKind, HowValue};
pub use report::{completeness_report, CompletenessReport, DeviceCompleteness};
pub use rules::{default_rules, infer_missing_slots, select_rule, InferenceRule};

/// Where the command's device came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WhereSource {
    /// A Where span in the sentence.
    Text,
    /// The sentence had no Where span; the recipe's device was used.
    DeviceHint,
    /// No Where span and no hint: the command records an incomplete
    /// instruction.
    Missing,
}

impl WhereSource {
    pub fn as_str(self) -> &'static str {
        match self {
            WhereSource::Text => "text",
            WhereSource::DeviceHint => "device_hint",
            WhereSource::Missing => "missing",
        }
    }
}

/// Origin of a command: the sentence and the character spans that fed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub sentence_id: String,
    pub spans: Vec<SpanAnnotation>,
    pub where_source: WhereSource,
}

/// One (Where, What, Why, How) device instruction.
#[derive(Debug, Clone, PartialEq)]
pub struct IoTCommand {
    /// Device class; `None` only for [`WhereSource::Missing`].
    pub where_: Option<String>,
    pub what: Option<String>,
    pub why: Option<String>,
    pub how: Option<HowValue>,
    pub complete: bool,
    /// Slot names filled by inference rules.
    pub inferred: BTreeSet<String>,
    /// Further spans attached to this command after a slot was already
    /// taken, as `(label, text)` in sentence order.
    pub additional: Vec<(SlotLabel, String)>,
    pub provenance: Provenance,
}

impl IoTCommand {
    pub fn new(where_: Option<String>, provenance: Provenance) -> Self {
        Self {
            where_,
            what: None,
            why: None,
            how: None,
            complete: false,
            inferred: BTreeSet::new(),
            additional: Vec::new(),
            provenance,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.where_.is_some() && self.what.is_some() && self.why.is_some() && self.how.is_some()
    }

    pub(crate) fn refresh(&mut self) {
        self.complete = self.is_complete();
    }

    /// Slot labels with no value.
    pub fn missing(&self) -> Vec<SlotLabel> {
        let mut out = Vec::new();
        if self.where_.is_none() {
            out.push(SlotLabel::Where);
        }
        if self.what.is_none() {
            out.push(SlotLabel::What);
        }
        if self.why.is_none() {
            out.push(SlotLabel::Why);
        }
        if self.how.is_none() {
            out.push(SlotLabel::How);
        }
        out
    }
}

/// Device class of a Where span: the lexicon class of the first device term
/// inside it, else the lowercased text.
pub fn resolve_device(text: &str, lex: &DeviceLexicon) -> String {
    let words: Vec<String> = crate::corpus::tokenize(text)
        .into_iter()
        .map(|t| t.text.to_lowercase())
        .collect();
    match lex.match_words(&words).into_iter().next() {
        Some(m) => m.class,
        None => words.join(" "),
    }
}

fn token_distance(a: (usize, usize), b: (usize, usize)) -> usize {
    if a.1 <= b.0 {
        b.0 - a.1
    } else {
        // zero when the spans overlap
        a.0.saturating_sub(b.1)
    }
}

/// Groups a sentence's spans into commands, one per Where span.
///
/// Without Where spans, any labeled span yields a single command on the
/// sentence's device hint, or a [`WhereSource::Missing`] record when there is
/// none. Sentences without spans yield nothing.
pub fn assemble_commands(
    sentence: &Sentence,
    spans: &[SpanAnnotation],
    lex: &DeviceLexicon,
) -> Vec<IoTCommand> {
    let (tags, _) = spans_to_iob(sentence, spans);
    let (runs, _) = tag_spans(tags.as_slice());
    if runs.is_empty() {
        return Vec::new();
    }
    let text_of = |run: &TokenSpan| {
        let (s, e) = (sentence.tokens[run.start].start, sentence.tokens[run.end - 1].end);
        (SpanAnnotation::new(s, e, run.label), sentence.slice(s, e).to_string())
    };
    let provenance = |where_source| Provenance {
        sentence_id: sentence.id.clone(),
        spans: Vec::new(),
        where_source,
    };

    let wheres: Vec<_> = runs.iter().filter(|r| r.label == SlotLabel::Where).collect();
    let mut commands: Vec<IoTCommand> = if wheres.is_empty() {
        let (where_, source) = match &sentence.device_hint {
            Some(d) => (Some(d.clone()), WhereSource::DeviceHint),
            None => (None, WhereSource::Missing),
        };
        vec![IoTCommand::new(where_, provenance(source))]
    } else {
        wheres
            .iter()
            .map(|r| {
                let (span, text) = text_of(r);
                let mut cmd = IoTCommand::new(Some(resolve_device(&text, lex)), provenance(WhereSource::Text));
                cmd.provenance.spans.push(span);
                cmd
            })
            .collect()
    };

    for run in runs.iter().filter(|r| r.label != SlotLabel::Where) {
        let target = if wheres.is_empty() {
            0
        } else {
            // min_by_key keeps the first minimum, i.e. the leftmost Where
            wheres
                .iter()
                .enumerate()
                .min_by_key(|(_, w)| token_distance((w.start, w.end), (run.start, run.end)))
                .map(|(k, _)| k)
                .unwrap_or(0)
        };
        let (span, text) = text_of(run);
        let cmd = &mut commands[target];
        cmd.provenance.spans.push(span);
        let slot_taken = match run.label {
            SlotLabel::What => cmd.what.is_some(),
            SlotLabel::Why => cmd.why.is_some(),
            SlotLabel::How => cmd.how.is_some(),
            SlotLabel::Where => unreachable!(),
        };
        if slot_taken {
            cmd.additional.push((run.label, text));
            continue;
        }
        match run.label {
            SlotLabel::What => cmd.what = Some(text),
            SlotLabel::Why => cmd.why = Some(text),
            SlotLabel::How => cmd.how = Some(parse_how(&text)),
            SlotLabel::Where => unreachable!(),
        }
    }
    for cmd in &mut commands {
        cmd.provenance.spans.sort_by_key(|s| (s.start, s.end));
        cmd.refresh();
    }
    commands
}
