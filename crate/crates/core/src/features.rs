//! Sparse token features for the CRF.
//!
//! Keys follow `[<offset>|head]:<group>=<value>`. The focus token carries no
//! prefix (`w=oven`), neighbors a signed offset (`-1:w=the`), and the
//! syntactic head `head:`. Positions beyond the sentence edge produce a single
//! `-k:BOS` / `+k:EOS` marker instead of a group.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Sentence, Tag, TagSequence, Token};
use crate::errors::{Error, Result};
use crate::lexicon::DeviceLexicon;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Largest neighbor radius.
pub const MAX_WINDOW: usize = 3;

/// Parses one word per line; blank lines and `#` comments are skipped.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn builtin_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    /// Neighbor radius, at most [`MAX_WINDOW`].
    pub window: usize,
    pub use_head: bool,
    /// Features seen fewer times than this in training are dropped.
    pub min_freq: usize,
    pub stopwords: BTreeSet<String>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window: MAX_WINDOW,
            use_head: true,
            min_freq: 0,
            stopwords: builtin_stopwords(),
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window > MAX_WINDOW {
            return Err(Error::InvalidConfig(format!(
                "window {} exceeds {MAX_WINDOW}",
                self.window
            )));
        }
        Ok(())
    }
}

/// Set of presence features of one token.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector(pub BTreeSet<String>);

impl FeatureVector {
    pub fn contains(&self, key: &str) -> bool {
        self.0.contains(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &FeatureVector) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Per-sentence data shared by all of its tokens.
struct SentenceView<'a> {
    tokens: &'a [Token],
    lower: Vec<String>,
    in_dict: Vec<bool>,
}

impl<'a> SentenceView<'a> {
    fn new(sentence: &'a Sentence, lex: &DeviceLexicon) -> Self {
        let lower: Vec<String> = sentence.tokens.iter().map(|t| t.text.to_lowercase()).collect();
        let mut in_dict = vec![false; lower.len()];
        for m in lex.match_words(&lower) {
            in_dict[m.start..m.end].iter_mut().for_each(|d| *d = true);
        }
        Self {
            tokens: &sentence.tokens,
            lower,
            in_dict,
        }
    }

    fn group(&self, i: usize, prefix: &str, cfg: &FeatureConfig, out: &mut BTreeSet<String>) {
        let tok = &self.tokens[i];
        let lower = &self.lower[i];
        let mut push = |k: &str, v: &str| {
            let mut key = String::with_capacity(prefix.len() + k.len() + v.len() + 1);
            key.push_str(prefix);
            key.push_str(k);
            key.push('=');
            key.push_str(v);
            out.insert(key);
        };
        let bool_str = |b: bool| if b { "true" } else { "false" };

        push("w", lower);
        let lemma = tok
            .lemma
            .as_deref()
            .map(str::to_lowercase)
            .unwrap_or_else(|| lower.clone());
        push("lemma", &lemma);
        let first: String = lower.chars().take(1).collect();
        push("first", &first);
        let prefix3: String = lower.chars().take(3).collect();
        push("prefix3", &prefix3);
        if let Some(pos) = &tok.pos {
            push("pos", pos);
        }
        let cap = tok.text.chars().next().is_some_and(char::is_uppercase);
        push("cap", bool_str(cap));
        push("indict", bool_str(self.in_dict[i]));
        let alpha = !lower.is_empty() && lower.chars().all(char::is_alphabetic);
        push("alpha", bool_str(alpha));
        push("stop", bool_str(cfg.stopwords.contains(lower)));
    }

    fn features(&self, i: usize, cfg: &FeatureConfig) -> FeatureVector {
        let mut out = BTreeSet::new();
        self.group(i, "", cfg, &mut out);
        let n = self.tokens.len() as isize;
        for d in 1..=cfg.window as isize {
            for offset in [-d, d] {
                let j = i as isize + offset;
                let prefix = if offset < 0 {
                    format!("{offset}:")
                } else {
                    format!("+{offset}:")
                };
                if j < 0 {
                    out.insert(format!("{prefix}BOS"));
                } else if j >= n {
                    out.insert(format!("{prefix}EOS"));
                } else {
                    self.group(j as usize, &prefix, cfg, &mut out);
                }
            }
        }
        if cfg.use_head {
            if let Some(h) = self.tokens[i].head {
                if h == i {
                    out.insert("head:ROOT".to_string());
                } else if h < self.tokens.len() {
                    self.group(h, "head:", cfg, &mut out);
                }
            }
        }
        FeatureVector(out)
    }
}

/// Features of token `i` of `sentence`.
pub fn token_features(
    sentence: &Sentence,
    i: usize,
    cfg: &FeatureConfig,
    lex: &DeviceLexicon,
) -> Result<FeatureVector> {
    if i >= sentence.tokens.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: sentence.tokens.len(),
        });
    }
    Ok(SentenceView::new(sentence, lex).features(i, cfg))
}

/// Features of every token of `sentence`.
pub fn sentence_features(
    sentence: &Sentence,
    cfg: &FeatureConfig,
    lex: &DeviceLexicon,
) -> Vec<FeatureVector> {
    let view = SentenceView::new(sentence, lex);
    (0..sentence.tokens.len()).map(|i| view.features(i, cfg)).collect()
}

/// Dense ids for feature keys, assigned in sorted key order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureIndex {
    keys: Vec<String>,
    ids: BTreeMap<String, u32>,
}

impl FeatureIndex {
    /// Builds an index from keys; duplicates are ignored, ids follow sorted
    /// order.
    pub fn from_keys<I: IntoIterator<Item = String>>(keys: I) -> Self {
        let set: BTreeSet<String> = keys.into_iter().collect();
        let keys: Vec<String> = set.into_iter().collect();
        let ids = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i as u32))
            .collect();
        Self { keys, ids }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn id(&self, key: &str) -> Option<u32> {
        self.ids.get(key).copied()
    }

    pub fn key(&self, id: u32) -> Option<&str> {
        self.keys.get(id as usize).map(String::as_str)
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    /// Ids of the indexed keys of `fv`, ascending. Unknown keys are skipped.
    pub fn encode(&self, fv: &FeatureVector) -> Vec<u32> {
        fv.iter().filter_map(|k| self.id(k)).collect()
    }
}

/// A sentence as feature ids per token plus gold label ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSequence {
    pub features: Vec<Vec<u32>>,
    pub labels: Vec<usize>,
}

/// Encoded training sequences with their feature and label indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    pub sequences: Vec<EncodedSequence>,
    pub feature_index: FeatureIndex,
    /// Label id `k` is `labels[k]`; all nine tags are always present.
    pub labels: Vec<Tag>,
}

impl FeatureDataset {
    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// Extracts features, prunes those seen fewer than `cfg.min_freq` times and
/// encodes the sequences.
pub fn build_dataset(
    sentences: &[(Sentence, TagSequence)],
    cfg: &FeatureConfig,
    lex: &DeviceLexicon,
) -> Result<FeatureDataset> {
    cfg.validate()?;
    if sentences.is_empty() {
        return Err(Error::EmptyInput("no training sentences"));
    }
    let mut raw = Vec::with_capacity(sentences.len());
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (s, tags) in sentences {
        if tags.len() != s.tokens.len() {
            return Err(Error::LengthMismatch {
                expected: s.tokens.len(),
                found: tags.len(),
            });
        }
        raw.push(sentence_features(s, cfg, lex));
    }
    for fvs in &raw {
        for fv in fvs {
            for k in fv.iter() {
                *counts.entry(k).or_insert(0) += 1;
            }
        }
    }
    let feature_index = FeatureIndex::from_keys(
        counts
            .into_iter()
            .filter(|(_, c)| *c >= cfg.min_freq)
            .map(|(k, _)| k.to_string()),
    );
    let sequences = raw
        .iter()
        .zip(sentences)
        .map(|(fvs, (_, tags))| EncodedSequence {
            features: fvs.iter().map(|fv| feature_index.encode(fv)).collect(),
            labels: tags.0.iter().map(|t| t.index()).collect(),
        })
        .collect();
    Ok(FeatureDataset {
        sequences,
        feature_index,
        labels: Tag::ALL.to_vec(),
    })
}

/// Encodes a sentence against an existing index, for decoding.
pub fn encode_sentence(
    sentence: &Sentence,
    cfg: &FeatureConfig,
    lex: &DeviceLexicon,
    index: &FeatureIndex,
) -> Vec<Vec<u32>> {
    sentence_features(sentence, cfg, lex)
        .iter()
        .map(|fv| index.encode(fv))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SlotLabel;

    fn lex() -> DeviceLexicon {
        DeviceLexicon::from_entries(vec![(
            "oven".to_string(),
            None,
            vec!["oven".to_string()],
        )])
        .unwrap()
    }

    fn cfg(window: usize) -> FeatureConfig {
        FeatureConfig {
            window,
            use_head: true,
            ..FeatureConfig::default()
        }
    }

    #[test]
    fn focus_group() {
        let s = Sentence::new("s", "r", "Preheat the oven");
        let fv = token_features(&s, 2, &cfg(0), &lex()).unwrap();
        for k in [
            "w=oven",
            "lemma=oven",
            "prefix3=ove",
            "first=o",
            "cap=false",
            "indict=true",
            "alpha=true",
            "stop=false",
        ] {
            assert!(fv.contains(k), "missing {k}");
        }
        assert!(!fv.iter().any(|k| k.starts_with("-1:")));
    }

    #[test]
    fn window_one() {
        let s = Sentence::new("s", "r", "Preheat the oven");
        let fv = token_features(&s, 2, &cfg(1), &lex()).unwrap();
        assert!(fv.contains("-1:w=the"));
        assert!(fv.contains("-1:stop=true"));
        assert!(fv.contains("+1:EOS"));
        let first = token_features(&s, 0, &cfg(1), &lex()).unwrap();
        assert!(first.contains("cap=true"));
        assert!(first.contains("-1:BOS"));
    }

    #[test]
    fn numbers() {
        let s = Sentence::new("s", "r", "bake at 400");
        let fv = token_features(&s, 2, &cfg(0), &lex()).unwrap();
        assert!(fv.contains("alpha=false"));
        assert!(fv.contains("indict=false"));
    }

    #[test]
    fn head_and_pos_columns() {
        let mut s = Sentence::new("s", "r", "Preheat the oven");
        s.tokens[2].head = Some(0);
        s.tokens[2].pos = Some("NOUN".into());
        s.tokens[0].head = Some(0);
        s.tokens[0].lemma = Some("preheat".into());
        let fv = token_features(&s, 2, &cfg(0), &lex()).unwrap();
        assert!(fv.contains("pos=NOUN"));
        assert!(fv.contains("head:w=preheat"));
        assert!(fv.contains("head:cap=true"));
        let root = token_features(&s, 0, &cfg(0), &lex()).unwrap();
        assert!(root.contains("head:ROOT"));
        let no_head = token_features(&s, 2, &FeatureConfig { use_head: false, ..cfg(0) }, &lex()).unwrap();
        assert!(!no_head.iter().any(|k| k.starts_with("head:")));
    }

    #[test]
    fn multiword_terms_mark_all_tokens() {
        let lex = DeviceLexicon::from_entries(vec![(
            "oven".to_string(),
            None,
            vec!["toaster oven".to_string()],
        )])
        .unwrap();
        let s = Sentence::new("s", "r", "the toaster oven");
        let fvs = sentence_features(&s, &cfg(0), &lex);
        assert!(fvs[1].contains("indict=true"));
        assert!(fvs[2].contains("indict=true"));
        assert!(fvs[0].contains("indict=false"));
    }

    #[test]
    fn out_of_range() {
        let s = Sentence::new("s", "r", "oven");
        assert!(token_features(&s, 1, &cfg(0), &lex()).is_err());
    }

    #[test]
    fn window_is_capped() {
        assert!(cfg(4).validate().is_err());
    }

    fn corpus() -> Vec<(Sentence, TagSequence)> {
        vec![
            (
                Sentence::new("a", "r", "preheat oven"),
                TagSequence(vec![Tag::O, Tag::B(SlotLabel::Where)]),
            ),
            (
                Sentence::new("b", "r", "oven hot"),
                TagSequence(vec![Tag::B(SlotLabel::Where), Tag::B(SlotLabel::How)]),
            ),
        ]
    }

    #[test]
    fn pruning() {
        let all = build_dataset(&corpus(), &FeatureConfig { min_freq: 1, ..cfg(0) }, &lex()).unwrap();
        assert!(all.feature_index.id("w=preheat").is_some());
        assert_eq!(all.num_labels(), 9);
        let pruned = build_dataset(&corpus(), &FeatureConfig { min_freq: 2, ..cfg(0) }, &lex()).unwrap();
        assert!(pruned.feature_index.id("w=preheat").is_none());
        assert!(pruned.feature_index.id("w=oven").is_some());
        assert!(pruned.feature_index.len() < all.feature_index.len());
        let zero = build_dataset(&corpus(), &FeatureConfig { min_freq: 0, ..cfg(0) }, &lex()).unwrap();
        assert_eq!(zero.feature_index, all.feature_index);
    }

    #[test]
    fn empty_dataset() {
        assert!(matches!(
            build_dataset(&[], &cfg(0), &lex()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn encode_sorted_ids() {
        let ds = build_dataset(&corpus(), &cfg(1), &lex()).unwrap();
        for seq in &ds.sequences {
            for ids in &seq.features {
                assert!(ids.windows(2).all(|w| w[0] < w[1]));
                assert!(ids.iter().all(|&i| (i as usize) < ds.feature_index.len()));
            }
        }
        assert_eq!(ds.sequences[1].labels, vec![1, 7]);
    }
}
