//! Definition of errors.

use alloc::string::String;
use core::fmt;

/// Errors produced by the core pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A slot label string other than Where, What, Why or How.
    UnknownSlotLabel(String),
    /// A tag string outside the nine IOB2 tags.
    InvalidTag(String),
    /// Two parallel sequences differ in length.
    LengthMismatch { expected: usize, found: usize },
    /// A token index out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// An operation that needs data received none.
    EmptyInput(&'static str),
    /// A configuration value outside its domain.
    InvalidConfig(String),
    /// Fewer recipes than requested parts.
    TooFewRecipes { recipes: usize, parts: usize },
    /// A cycle among device class parents.
    LexiconCycle(String),
    /// A parent class that is never declared.
    UnknownParentClass { class: String, parent: String },
    /// A term listed under two different top-level device classes.
    TermConflict {
        term: String,
        first: String,
        second: String,
    },
    /// A word missing from an embedding table.
    UnknownWord(String),
    /// A vector whose norm is zero where a direction is needed.
    ZeroNorm(String),
    /// Vectors of inconsistent dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A tag that is not part of a model's label set.
    LabelNotInModel(String),
    /// Training hit a NaN or infinite objective.
    NonFiniteObjective { iteration: usize },
    /// Two annotation sets that do not cover the same sentences.
    SentenceMismatch { index: usize },
    /// Every search candidate failed to train.
    NoViableCandidate,
}

/// Result type with [`Error`].
pub type Result<T, E = Error> = core::result::Result<T, E>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownSlotLabel(s) => write!(f, "unknown slot label: {s:?}"),
            Self::InvalidTag(s) => write!(f, "invalid tag: {s:?}"),
            Self::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Self::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Self::EmptyInput(what) => write!(f, "empty input: {what}"),
            Self::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Self::TooFewRecipes { recipes, parts } => {
                write!(f, "cannot split {recipes} recipes into {parts} parts")
            }
            Self::LexiconCycle(class) => write!(f, "cycle in device classes involving {class:?}"),
            Self::UnknownParentClass { class, parent } => {
                write!(f, "class {class:?} names undeclared parent {parent:?}")
            }
            Self::TermConflict {
                term,
                first,
                second,
            } => write!(
                f,
                "term {term:?} belongs to two top-level classes: {first:?} and {second:?}"
            ),
            Self::UnknownWord(w) => write!(f, "word not in embedding table: {w:?}"),
            Self::ZeroNorm(w) => write!(f, "vector for {w:?} has zero norm"),
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::LabelNotInModel(t) => write!(f, "tag {t} is not in the model label set"),
            Self::NonFiniteObjective { iteration } => {
                write!(f, "non-finite objective at iteration {iteration}")
            }
            Self::SentenceMismatch { index } => {
                write!(f, "annotation sets disagree on sentence {index}")
            }
            Self::NoViableCandidate => write!(f, "every search candidate failed"),
        }
    }
}

impl core::error::Error for Error {}
