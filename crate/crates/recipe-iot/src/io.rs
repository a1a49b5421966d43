//! Reading and writing files with the path attached to errors.

use std::io::Write;
use std::path::Path;

use recipe_iot_core::corpus::{AnnotatedRecipe, Sentence, TagSequence};
use recipe_iot_core::lexicon::DeviceLexicon;

use crate::error::{Error, Result};
use crate::formats::{conll, doccano};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or to standard output when it is `None` or `-`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => write_text(p, text),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Corpus file kinds, chosen by extension unless forced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CorpusFormat {
    Conll,
    Doccano,
}

impl CorpusFormat {
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => CorpusFormat::Doccano,
            _ => CorpusFormat::Conll,
        }
    }
}

/// Loads a tagged corpus. doccano spans are projected onto tokens, with
/// every boundary repair logged as a warning.
pub fn load_tagged(path: &Path, format: Option<CorpusFormat>) -> Result<Vec<(Sentence, TagSequence)>> {
    let text = read_text(path)?;
    let parsed = match format.unwrap_or_else(|| CorpusFormat::detect(path)) {
        CorpusFormat::Conll => conll::parse_conll(&text),
        CorpusFormat::Doccano => doccano::load_doccano(&text).map(|rows| {
            rows.into_iter()
                .map(|(s, spans)| {
                    let (tags, diags) = recipe_iot_core::corpus::spans_to_iob(&s, &spans);
                    for d in diags {
                        log::warn!("{}: sentence {}: {d:?}", path.display(), s.id);
                    }
                    (s, tags)
                })
                .collect()
        }),
    };
    let mut data = parsed.map_err(|e| e.in_file(path))?;
    for (s, tags) in &mut data {
        let fixed = tags.repair();
        if !fixed.is_empty() {
            log::warn!("{}: sentence {}: bare I- tags at {fixed:?} turned into B-", path.display(), s.id);
        }
    }
    Ok(data)
}

pub fn save_tagged(path: Option<&Path>, data: &[(Sentence, TagSequence)], format: Option<CorpusFormat>) -> Result<()> {
    let format = format.unwrap_or_else(|| path.map(CorpusFormat::detect).unwrap_or(CorpusFormat::Conll));
    let text = match format {
        CorpusFormat::Conll => conll::emit_conll(data),
        CorpusFormat::Doccano => {
            let rows: Vec<_> = data
                .iter()
                .map(|(s, t)| {
                    let (spans, _) = recipe_iot_core::corpus::iob_to_spans(s, t).expect("tags match tokens");
                    (s.clone(), spans)
                })
                .collect();
            doccano::emit_doccano(&rows)
        }
    };
    write_output(path, &text)
}

/// Groups sentences into recipes by `recipe_id`, in first-seen order. A
/// recipe's device is the first device hint among its sentences; it is a
/// false positive when it has no annotations yet mentions a dictionary term.
pub fn group_recipes(data: Vec<(Sentence, TagSequence)>, lex: &DeviceLexicon) -> Vec<AnnotatedRecipe> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<(Sentence, TagSequence)>> = Default::default();
    for (s, t) in data {
        if !groups.contains_key(&s.recipe_id) {
            order.push(s.recipe_id.clone());
        }
        groups.entry(s.recipe_id.clone()).or_default().push((s, t));
    }
    order
        .into_iter()
        .map(|id| {
            let sentences = groups.remove(&id).unwrap_or_default();
            let device = sentences.iter().find_map(|(s, _)| s.device_hint.clone());
            let mut r = AnnotatedRecipe {
                id,
                device,
                sentences,
                false_positive: false,
            };
            r.false_positive = !r.has_annotations()
                && r.sentences.iter().any(|(s, _)| !lex.match_devices(s).is_empty());
            r
        })
        .collect()
}

pub fn flatten(recipes: &[AnnotatedRecipe]) -> Vec<(Sentence, TagSequence)> {
    recipes.iter().flat_map(|r| r.sentences.iter().cloned()).collect()
}
