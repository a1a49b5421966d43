//! Recipes, sentences, slot annotations and their IOB projection.
//!
//! Character offsets everywhere in this module count Unicode scalar values,
//! not bytes. After [`normalize_text`] the text is ASCII and both coincide.

mod iob;
mod normalize;
mod split;
mod tokenize;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::errors::{Error, Result};

pub use iob::{iob_to_spans, spans_to_iob, tag_spans, TokenSpan};
pub use normalize::{normalize_text, AcronymTable};
pub use split::{part_sizes, stratified_partition, stratified_split, SplitSpec};
pub use tokenize::tokenize;

/// A recipe as extracted from the source dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecipe {
    pub id: String,
    pub title: String,
    pub instructions: Vec<String>,
}

/// One token of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Inclusive start offset in characters.
    pub start: usize,
    /// Exclusive end offset in characters.
    pub end: usize,
    pub lemma: Option<String>,
    pub pos: Option<String>,
    /// Index of the syntactic head within the sentence; the root points to
    /// itself.
    pub head: Option<usize>,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            text: text.into(),
            start,
            end,
            lemma: None,
            pos: None,
            head: None,
        }
    }
}

/// A tokenized instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub recipe_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    /// Device class the surrounding recipe is about, when known.
    pub device_hint: Option<String>,
}

impl Sentence {
    /// Tokenizes `text` with [`tokenize`].
    pub fn new(id: impl Into<String>, recipe_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Self {
            id: id.into(),
            recipe_id: recipe_id.into(),
            text,
            tokens,
            device_hint: None,
        }
    }

    /// Builds a sentence from bare token strings joined by single spaces.
    pub fn from_words<S: AsRef<str>>(
        id: impl Into<String>,
        recipe_id: impl Into<String>,
        words: &[S],
    ) -> Self {
        let mut text = String::new();
        let mut tokens = Vec::with_capacity(words.len());
        let mut offset = 0;
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
                offset += 1;
            }
            let w = w.as_ref();
            let len = w.chars().count();
            text.push_str(w);
            tokens.push(Token::new(w, offset, offset + len));
            offset += len;
        }
        Self {
            id: id.into(),
            recipe_id: recipe_id.into(),
            text,
            tokens,
            device_hint: None,
        }
    }

    pub fn with_device_hint(mut self, device: impl Into<String>) -> Self {
        self.device_hint = Some(device.into());
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Length of the text in characters.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// The text between two character offsets.
    pub fn slice(&self, start: usize, end: usize) -> &str {
        let mut begin_byte = self.text.len();
        let mut end_byte = self.text.len();
        for (ci, (bi, _)) in self.text.char_indices().enumerate() {
            if ci == start {
                begin_byte = bi;
            }
            if ci == end {
                end_byte = bi;
                break;
            }
        }
        if begin_byte > end_byte {
            return "";
        }
        &self.text[begin_byte..end_byte]
    }

    /// Checks the token invariants: offsets in bounds, sorted and
    /// non-overlapping, token text equal to its slice, heads in range.
    pub fn validate(&self) -> Result<()> {
        let len = self.char_len();
        let mut prev_end = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.start >= t.end || t.end > len || t.start < prev_end {
                return Err(Error::InvalidConfig(format!(
                    "token {i} has bad offsets {}..{} in sentence {:?}",
                    t.start, t.end, self.id
                )));
            }
            if self.slice(t.start, t.end) != t.text {
                return Err(Error::InvalidConfig(format!(
                    "token {i} text {:?} does not match sentence slice",
                    t.text
                )));
            }
            if let Some(h) = t.head {
                if h >= self.tokens.len() {
                    return Err(Error::IndexOutOfRange {
                        index: h,
                        len: self.tokens.len(),
                    });
                }
            }
            prev_end = t.end;
        }
        Ok(())
    }
}

/// The four semantic slots of a device command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotLabel {
    Where,
    What,
    Why,
    How,
}

impl SlotLabel {
    pub const ALL: [SlotLabel; 4] = [Self::Where, Self::What, Self::Why, Self::How];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Where => "Where",
            Self::What => "What",
            Self::Why => "Why",
            Self::How => "How",
        }
    }
}

impl fmt::Display for SlotLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Where" => Ok(Self::Where),
            "What" => Ok(Self::What),
            "Why" => Ok(Self::Why),
            "How" => Ok(Self::How),
            _ => Err(Error::UnknownSlotLabel(s.to_string())),
        }
    }
}

/// One of the nine IOB2 tags.
///
/// Dense indices put `O` first, then `B-X`, `I-X` for each slot in
/// [`SlotLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    O,
    B(SlotLabel),
    I(SlotLabel),
}

impl Tag {
    pub const ALL: [Tag; 9] = [
        Tag::O,
        Tag::B(SlotLabel::Where),
        Tag::I(SlotLabel::Where),
        Tag::B(SlotLabel::What),
        Tag::I(SlotLabel::What),
        Tag::B(SlotLabel::Why),
        Tag::I(SlotLabel::Why),
        Tag::B(SlotLabel::How),
        Tag::I(SlotLabel::How),
    ];

    pub fn index(self) -> usize {
        let slot = |l: SlotLabel| l as usize;
        match self {
            Tag::O => 0,
            Tag::B(l) => 1 + 2 * slot(l),
            Tag::I(l) => 2 + 2 * slot(l),
        }
    }

    pub fn from_index(i: usize) -> Option<Tag> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> Option<SlotLabel> {
        match self {
            Tag::O => None,
            Tag::B(l) | Tag::I(l) => Some(l),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::O => f.write_str("O"),
            Tag::B(l) => write!(f, "B-{l}"),
            Tag::I(l) => write!(f, "I-{l}"),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(Tag::O);
        }
        let bad = || Error::InvalidTag(s.to_string());
        let (prefix, label) = s.split_once('-').ok_or_else(bad)?;
        let label: SlotLabel = label.parse().map_err(|_| bad())?;
        match prefix {
            "B" => Ok(Tag::B(label)),
            "I" => Ok(Tag::I(label)),
            _ => Err(bad()),
        }
    }
}

/// Per-token tags of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagSequence(pub Vec<Tag>);

impl TagSequence {
    pub fn all_outside(len: usize) -> Self {
        Self(vec![Tag::O; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Tag] {
        &self.0
    }

    /// Every `I-X` directly follows `B-X` or `I-X`.
    pub fn is_valid(&self) -> bool {
        let mut prev = Tag::O;
        for &t in &self.0 {
            if let Tag::I(l) = t {
                if prev.label() != Some(l) {
                    return false;
                }
            }
            prev = t;
        }
        true
    }

    /// Rewrites each stray `I-X` to `B-X`, returning the repaired positions.
    pub fn repair(&mut self) -> Vec<usize> {
        let mut fixed = Vec::new();
        let mut prev = Tag::O;
        for (i, t) in self.0.iter_mut().enumerate() {
            if let Tag::I(l) = *t {
                if prev.label() != Some(l) {
                    *t = Tag::B(l);
                    fixed.push(i);
                }
            }
            prev = *t;
        }
        fixed
    }

    /// Counts of each tag by dense index.
    pub fn counts(&self) -> [usize; 9] {
        let mut c = [0; 9];
        for t in &self.0 {
            c[t.index()] += 1;
        }
        c
    }
}

impl From<Vec<Tag>> for TagSequence {
    fn from(v: Vec<Tag>) -> Self {
        Self(v)
    }
}

/// A labeled character span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanAnnotation {
    pub start: usize,
    pub end: usize,
    pub label: SlotLabel,
}

impl SpanAnnotation {
    pub fn new(start: usize, end: usize, label: SlotLabel) -> Self {
        Self { start, end, label }
    }
}

/// Non-fatal repairs made while converting annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// A span boundary fell inside a token and was widened to the token edge.
    SpanSnapped {
        label: SlotLabel,
        original: (usize, usize),
        snapped: (usize, usize),
    },
    /// A span touched no token at all and was dropped.
    SpanWithoutTokens {
        label: SlotLabel,
        start: usize,
        end: usize,
    },
    /// A span overlapped tokens already claimed by an earlier span and was
    /// dropped.
    SpanOverlap {
        label: SlotLabel,
        start: usize,
        end: usize,
    },
    /// An `I-X` tag without a preceding `B-X`/`I-X` was read as `B-X`.
    BareInside { index: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SpanSnapped {
                label,
                original,
                snapped,
            } => write!(
                f,
                "{label} span {}..{} snapped to token boundaries {}..{}",
                original.0, original.1, snapped.0, snapped.1
            ),
            Self::SpanWithoutTokens { label, start, end } => {
                write!(f, "{label} span {start}..{end} covers no token; dropped")
            }
            Self::SpanOverlap { label, start, end } => {
                write!(f, "{label} span {start}..{end} overlaps an earlier span; dropped")
            }
            Self::BareInside { index } => {
                write!(f, "tag at token {index} is I- without a preceding B-; read as B-")
            }
        }
    }
}

/// A recipe with tagged sentences, the unit of splitting and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedRecipe {
    pub id: String,
    /// Device class the recipe was collected for.
    pub device: Option<String>,
    pub sentences: Vec<(Sentence, TagSequence)>,
    /// Mentions a dictionary device term but carries no annotation.
    pub false_positive: bool,
}

impl AnnotatedRecipe {
    /// Sum of tag counts over all sentences, by dense tag index.
    pub fn tag_counts(&self) -> [usize; 9] {
        let mut c = [0; 9];
        for (_, tags) in &self.sentences {
            for (acc, n) in c.iter_mut().zip(tags.counts()) {
                *acc += n;
            }
        }
        c
    }

    pub fn has_annotations(&self) -> bool {
        self.sentences
            .iter()
            .any(|(_, t)| t.0.iter().any(|&x| x != Tag::O))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_index_roundtrip() {
        for (i, t) in Tag::ALL.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(Tag::from_index(i), Some(*t));
            let s = t.to_string();
            assert_eq!(s.parse::<Tag>().unwrap(), *t);
        }
        assert_eq!(Tag::from_index(9), None);
    }

    #[test]
    fn rejects_unknown_labels() {
        assert!(matches!(
            "WHEN".parse::<SlotLabel>(),
            Err(Error::UnknownSlotLabel(_))
        ));
        assert!("B-When".parse::<Tag>().is_err());
        assert!("X-How".parse::<Tag>().is_err());
        assert!("How".parse::<Tag>().is_err());
    }

    #[test]
    fn validity_and_repair() {
        let mut t = TagSequence(vec![
            Tag::I(SlotLabel::How),
            Tag::I(SlotLabel::How),
            Tag::O,
            Tag::B(SlotLabel::Why),
            Tag::I(SlotLabel::How),
        ]);
        assert!(!t.is_valid());
        assert_eq!(t.repair(), vec![0, 4]);
        assert!(t.is_valid());
        assert_eq!(t.0[0], Tag::B(SlotLabel::How));
        assert_eq!(t.0[1], Tag::I(SlotLabel::How));
    }

    #[test]
    fn slice_uses_char_offsets() {
        let s = Sentence::new("s", "r", "crème brûlée oven");
        assert_eq!(s.slice(13, 17), "oven");
        assert_eq!(s.tokens.last().unwrap().text, "oven");
        s.validate().unwrap();
    }

    #[test]
    fn from_words_is_valid() {
        let s = Sentence::from_words("s", "r", &["Preheat", "the", "oven"]);
        assert_eq!(s.text, "Preheat the oven");
        s.validate().unwrap();
    }
}
