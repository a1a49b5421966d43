//! Kitchen-device dictionary and embedding-based candidate expansion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{tokenize, Sentence};
use crate::errors::{Error, Result};
use crate::math::sqrt;

/// One device class of the dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeviceClass {
    pub parent: Option<String>,
    pub terms: BTreeSet<String>,
}

/// Hierarchical device dictionary: class name → parent and surface terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeviceLexicon {
    classes: BTreeMap<String, DeviceClass>,
    /// term tokens → owning class, for matching
    term_index: BTreeMap<Vec<String>, String>,
    longest_term: usize,
}

/// A dictionary hit over tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceMatch {
    pub start: usize,
    pub end: usize,
    pub class: String,
}

fn term_tokens(term: &str) -> Vec<String> {
    tokenize(term).into_iter().map(|t| t.text.to_lowercase()).collect()
}

impl DeviceLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a lexicon from `(class, parent, terms)` entries.
    ///
    /// Terms are lowercased and deduplicated. Entries naming the same class
    /// are merged. Fails on parent cycles, undeclared parents, and terms shared
    /// by two top-level classes. A term listed under two classes of the same
    /// tree resolves to the deeper class.
    pub fn from_entries<I, T>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Option<String>, T)>,
        T: IntoIterator<Item = String>,
    {
        let mut classes: BTreeMap<String, DeviceClass> = BTreeMap::new();
        for (name, parent, terms) in entries {
            let class = classes.entry(name.clone()).or_default();
            if parent.is_some() {
                if class.parent.is_some() && class.parent != parent {
                    return Err(Error::InvalidConfig(format!(
                        "class {name:?} declared with two parents"
                    )));
                }
                class.parent = parent;
            }
            for t in terms {
                let t = t.trim().to_lowercase();
                if !t.is_empty() {
                    class.terms.insert(t);
                }
            }
        }

        for (name, class) in &classes {
            if let Some(p) = &class.parent {
                if !classes.contains_key(p) {
                    return Err(Error::UnknownParentClass {
                        class: name.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }

        let mut lex = Self {
            classes,
            term_index: BTreeMap::new(),
            longest_term: 0,
        };
        for name in lex.classes.keys() {
            lex.ancestry(name)?;
        }

        let mut owner: BTreeMap<String, String> = BTreeMap::new();
        for (name, class) in &lex.classes {
            for term in &class.terms {
                match owner.get(term) {
                    None => {
                        owner.insert(term.clone(), name.clone());
                    }
                    Some(prev) => {
                        let prev_root = lex.root_of(prev);
                        let root = lex.root_of(name);
                        if prev_root != root {
                            return Err(Error::TermConflict {
                                term: term.clone(),
                                first: prev.clone(),
                                second: name.clone(),
                            });
                        }
                        if lex.depth(name) > lex.depth(prev) {
                            owner.insert(term.clone(), name.clone());
                        }
                    }
                }
            }
        }
        for (term, class) in owner {
            let toks = term_tokens(&term);
            if toks.is_empty() {
                continue;
            }
            lex.longest_term = lex.longest_term.max(toks.len());
            lex.term_index.insert(toks, class);
        }
        Ok(lex)
    }

    /// Class chain from `name` up to its root; errors on a cycle.
    fn ancestry(&self, name: &str) -> Result<Vec<&str>> {
        let mut chain: Vec<&str> = Vec::new();
        let mut current = self.classes.get_key_value(name).map(|(k, _)| k.as_str());
        while let Some(c) = current {
            if chain.contains(&c) {
                return Err(Error::LexiconCycle(name.to_string()));
            }
            chain.push(c);
            current = self.classes[c]
                .parent
                .as_deref()
                .and_then(|p| self.classes.get_key_value(p))
                .map(|(k, _)| k.as_str());
        }
        Ok(chain)
    }

    fn depth(&self, name: &str) -> usize {
        self.ancestry(name).map(|a| a.len()).unwrap_or(0)
    }

    /// Top-level class above `name` (itself when it has no parent).
    pub fn root_of(&self, name: &str) -> Option<&str> {
        self.ancestry(name)
            .ok()
            .and_then(|a| a.last().copied())
            .filter(|r| self.classes.contains_key(*r))
    }

    pub fn class(&self, name: &str) -> Option<&DeviceClass> {
        self.classes.get(name)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, &DeviceClass)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Direct children of a class.
    pub fn children(&self, name: &str) -> Vec<&str> {
        self.classes
            .iter()
            .filter(|(_, c)| c.parent.as_deref() == Some(name))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn top_level(&self) -> Vec<&str> {
        self.classes
            .iter()
            .filter(|(_, c)| c.parent.is_none())
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class owning a (possibly multi-word) term, case-insensitively.
    pub fn class_of_term(&self, term: &str) -> Option<&str> {
        self.term_index.get(&term_tokens(term)).map(String::as_str)
    }

    /// Longest-match-first scan of the sentence tokens against the terms.
    /// Matches never overlap.
    pub fn match_devices(&self, sentence: &Sentence) -> Vec<DeviceMatch> {
        let words: Vec<String> = sentence.tokens.iter().map(|t| t.text.to_lowercase()).collect();
        self.match_words(&words)
    }

    /// As [`match_devices`](Self::match_devices) over lowercased words.
    pub fn match_words(&self, words: &[String]) -> Vec<DeviceMatch> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let max = self.longest_term.min(words.len() - i);
            let hit = (1..=max).rev().find_map(|n| {
                self.term_index
                    .get(&words[i..i + n])
                    .map(|class| (n, class))
            });
            match hit {
                Some((n, class)) => {
                    out.push(DeviceMatch {
                        start: i,
                        end: i + n,
                        class: class.clone(),
                    });
                    i += n;
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Word vectors of a fixed dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    words: Vec<String>,
    index: BTreeMap<String, usize>,
    vectors: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
        }
        Ok(Self {
            dimension,
            ..Self::default()
        })
    }

    /// Adds or replaces the vector of `word`.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: vector.len(),
            });
        }
        let word = word.into();
        match self.index.get(&word) {
            Some(&i) => {
                self.vectors[i * self.dimension..(i + 1) * self.dimension].copy_from_slice(vector)
            }
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.vectors.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dimension..(i + 1) * self.dimension])
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dimension..(i + 1) * self.dimension]
    }

    /// The `k` words closest to `seed` by cosine similarity, most similar
    /// first, ties broken lexicographically. The seed itself and zero vectors
    /// are never returned.
    pub fn expand(&self, seed: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        let q = self.get(seed).ok_or_else(|| Error::UnknownWord(seed.to_string()))?;
        let qn = norm(q);
        if qn == 0.0 {
            return Err(Error::ZeroNorm(seed.to_string()));
        }
        let mut scored: Vec<(String, f64)> = Vec::new();
        for (i, w) in self.words.iter().enumerate() {
            if w == seed {
                continue;
            }
            let v = self.row(i);
            let vn = norm(v);
            if vn == 0.0 {
                continue;
            }
            let dot: f64 = q.iter().zip(v).map(|(a, b)| *a as f64 * *b as f64).sum();
            let cos = (dot / (qn * vn)).clamp(-1.0, 1.0);
            scored.push((w.clone(), cos));
        }
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }
}

fn norm(v: &[f32]) -> f64 {
    sqrt(v.iter().map(|x| *x as f64 * *x as f64).sum())
}

/// Convenience wrapper over [`EmbeddingTable::expand`].
pub fn expand_with_embeddings(
    table: &EmbeddingTable,
    seed_term: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    table.expand(seed_term, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(c: &str, p: Option<&str>, terms: &[&str]) -> (String, Option<String>, Vec<String>) {
        (
            c.to_string(),
            p.map(ToString::to_string),
            terms.iter().map(|t| t.to_string()).collect(),
        )
    }

    fn kitchen() -> DeviceLexicon {
        DeviceLexicon::from_entries(vec![
            entry("oven", None, &["oven", "wall oven", "Oven"]),
            entry("toaster oven", Some("oven"), &["toaster oven"]),
            entry("fridge", None, &["fridge", "refrigerator"]),
        ])
        .unwrap()
    }

    #[test]
    fn hierarchy() {
        let lex = kitchen();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.children("oven"), vec!["toaster oven"]);
        assert_eq!(lex.root_of("toaster oven"), Some("oven"));
        assert_eq!(lex.class("oven").unwrap().terms.len(), 2);
        assert_eq!(lex.top_level(), vec!["fridge", "oven"]);
    }

    #[test]
    fn longest_match_wins() {
        let lex = kitchen();
        let s = Sentence::new("s", "r", "put in the toaster oven");
        let m = lex.match_devices(&s);
        assert_eq!(
            m,
            vec![DeviceMatch {
                start: 3,
                end: 5,
                class: "toaster oven".into()
            }]
        );
    }

    #[test]
    fn no_match_and_case() {
        let lex = kitchen();
        assert!(lex.match_devices(&Sentence::new("s", "r", "stir the batter")).is_empty());
        let m = lex.match_devices(&Sentence::new("s", "r", "Oven"));
        assert_eq!(m[0].class, "oven");
    }

    #[test]
    fn term_conflict_across_roots() {
        let err = DeviceLexicon::from_entries(vec![
            entry("oven", None, &["oven"]),
            entry("fridge", None, &["oven"]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::TermConflict { .. }));
    }

    #[test]
    fn cycle_detected() {
        let err = DeviceLexicon::from_entries(vec![
            entry("a", Some("b"), &["a"]),
            entry("b", Some("a"), &["b"]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::LexiconCycle(_)));
    }

    #[test]
    fn undeclared_parent() {
        let err = DeviceLexicon::from_entries(vec![entry("a", Some("zzz"), &["a"])]).unwrap_err();
        assert!(matches!(err, Error::UnknownParentClass { .. }));
    }

    #[test]
    fn empty_lexicon_matches_nothing() {
        let lex = DeviceLexicon::from_entries(Vec::<(String, Option<String>, Vec<String>)>::new()).unwrap();
        assert!(lex.is_empty());
        assert!(lex.match_devices(&Sentence::new("s", "r", "oven")).is_empty());
    }

    fn table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("oven", &[1.0, 0.0]).unwrap();
        t.insert("stove", &[0.9, 0.1]).unwrap();
        t.insert("spoon", &[0.0, 1.0]).unwrap();
        t
    }

    #[test]
    fn expand_top1() {
        // cos = 0.9 / sqrt(0.81 + 0.01)
        let oracle = 0.9 / libm::sqrt(0.82);
        let r = expand_with_embeddings(&table(), "oven", 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, "stove");
        assert!((r[0].1 - oracle).abs() < 1e-6);
        assert!((r[0].1 - 0.99388).abs() < 1e-5);
    }

    #[test]
    fn expand_all_and_alone() {
        let r = expand_with_embeddings(&table(), "oven", 10).unwrap();
        assert_eq!(r.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["stove", "spoon"]);
        assert!(r[1].1.abs() < 1e-12);

        let mut lone = EmbeddingTable::new(2).unwrap();
        lone.insert("oven", &[1.0, 0.0]).unwrap();
        assert!(expand_with_embeddings(&lone, "oven", 1).unwrap().is_empty());
    }

    #[test]
    fn expand_errors() {
        assert!(matches!(table().expand("fork", 1), Err(Error::UnknownWord(_))));
        let mut t = table();
        t.insert("zero", &[0.0, 0.0]).unwrap();
        assert!(matches!(t.expand("zero", 1), Err(Error::ZeroNorm(_))));
        assert!(t.insert("bad", &[1.0]).is_err());
    }

    #[test]
    fn ties_lexicographic() {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("q", &[1.0, 0.0]).unwrap();
        t.insert("b", &[2.0, 0.0]).unwrap();
        t.insert("a", &[3.0, 0.0]).unwrap();
        let r = t.expand("q", 2).unwrap();
        assert_eq!(r[0].0, "a");
        assert_eq!(r[1].0, "b");
    }
}
