use alloc::vec::Vec;

use super::{Diagnostic, Sentence, SlotLabel, SpanAnnotation, Tag, TagSequence};
use crate::errors::{Error, Result};

/// A labeled run of tokens, `start..end` in token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenSpan {
    pub label: SlotLabel,
    pub start: usize,
    pub end: usize,
}

/// Extracts maximal `B-X (I-X)*` runs. A bare `I-X` opens a new run and its
/// position is reported in the second list.
pub fn tag_spans(tags: &[Tag]) -> (Vec<TokenSpan>, Vec<usize>) {
    let mut spans = Vec::new();
    let mut bare = Vec::new();
    let mut open: Option<TokenSpan> = None;
    for (i, &t) in tags.iter().enumerate() {
        match t {
            Tag::O => {
                spans.extend(open.take());
            }
            Tag::B(l) => {
                spans.extend(open.take());
                open = Some(TokenSpan {
                    label: l,
                    start: i,
                    end: i + 1,
                });
            }
            Tag::I(l) => match open.as_mut() {
                Some(span) if span.label == l => span.end = i + 1,
                _ => {
                    spans.extend(open.take());
                    bare.push(i);
                    open = Some(TokenSpan {
                        label: l,
                        start: i,
                        end: i + 1,
                    });
                }
            },
        }
    }
    spans.extend(open);
    (spans, bare)
}

/// Projects character spans onto the sentence tokens as IOB2 tags.
///
/// Boundaries that cut through a token are widened to the token edges, spans
/// touching no token are dropped, and spans that collide with an earlier one
/// (in start order) are dropped. Every repair is reported.
pub fn spans_to_iob(sentence: &Sentence, spans: &[SpanAnnotation]) -> (TagSequence, Vec<Diagnostic>) {
    let mut tags = TagSequence::all_outside(sentence.tokens.len());
    let mut diagnostics = Vec::new();
    let mut claimed = vec![false; sentence.tokens.len()];

    let mut ordered: Vec<SpanAnnotation> = spans.to_vec();
    ordered.sort();

    for span in ordered {
        let mut covered = sentence
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.start < span.end && t.end > span.start)
            .map(|(i, _)| i);
        let Some(first) = covered.next() else {
            diagnostics.push(Diagnostic::SpanWithoutTokens {
                label: span.label,
                start: span.start,
                end: span.end,
            });
            continue;
        };
        let last = covered.next_back().unwrap_or(first);

        if claimed[first..=last].iter().any(|&c| c) {
            diagnostics.push(Diagnostic::SpanOverlap {
                label: span.label,
                start: span.start,
                end: span.end,
            });
            continue;
        }

        let first_tok = &sentence.tokens[first];
        let last_tok = &sentence.tokens[last];
        if span.start > first_tok.start || span.end < last_tok.end {
            diagnostics.push(Diagnostic::SpanSnapped {
                label: span.label,
                original: (span.start, span.end),
                snapped: (first_tok.start, last_tok.end),
            });
        }

        for (k, slot) in (first..=last).enumerate() {
            tags.0[slot] = if k == 0 {
                Tag::B(span.label)
            } else {
                Tag::I(span.label)
            };
            claimed[slot] = true;
        }
    }
    (tags, diagnostics)
}

/// Reads tagged runs back as character spans covering first-token start to
/// last-token end.
pub fn iob_to_spans(
    sentence: &Sentence,
    tags: &TagSequence,
) -> Result<(Vec<SpanAnnotation>, Vec<Diagnostic>)> {
    if tags.len() != sentence.tokens.len() {
        return Err(Error::LengthMismatch {
            expected: sentence.tokens.len(),
            found: tags.len(),
        });
    }
    let (runs, bare) = tag_spans(tags.as_slice());
    let spans = runs
        .into_iter()
        .map(|r| SpanAnnotation {
            start: sentence.tokens[r.start].start,
            end: sentence.tokens[r.end - 1].end,
            label: r.label,
        })
        .collect();
    let diagnostics = bare
        .into_iter()
        .map(|index| Diagnostic::BareInside { index })
        .collect();
    Ok((spans, diagnostics))
}
