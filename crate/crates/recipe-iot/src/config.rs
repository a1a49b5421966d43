//! TOML pipeline configuration. Every section and key is optional; unknown
//! keys are rejected. Relative paths resolve against the config file's
//! directory.

use std::path::{Path, PathBuf};

use recipe_iot_core::corpus::SplitSpec;
use recipe_iot_core::crf::TrainConfig;
use recipe_iot_core::eval::SearchSpace;
use recipe_iot_core::features::FeatureConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ReportFormat;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub lexicon: Option<PathBuf>,
    pub acronyms: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureSection {
    pub window: usize,
    pub use_head: bool,
    pub min_freq: usize,
}

impl Default for FeatureSection {
    fn default() -> Self {
        let d = FeatureConfig::default();
        Self {
            window: d.window,
            use_head: d.use_head,
            min_freq: d.min_freq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub c1: f64,
    pub c2: f64,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            c1: d.c1,
            c2: d.c2,
            max_iterations: d.max_iterations,
            convergence_tol: d.convergence_tol,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub ratios: [f64; 3],
    pub seed: u64,
    pub stratify_labels: bool,
    pub balance_false_positives: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitSpec::default();
        Self {
            ratios: d.ratios,
            seed: d.seed,
            stratify_labels: d.stratify_labels,
            balance_false_positives: d.balance_false_positives,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSection {
    pub c1_range: [f64; 2],
    pub c2_range: [f64; 2],
    pub min_freq_choices: Vec<usize>,
    pub candidates: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SearchSection {
    fn default() -> Self {
        let d = SearchSpace::default();
        Self {
            c1_range: [d.c1_range.0, d.c1_range.1],
            c2_range: [d.c2_range.0, d.c2_range.1],
            min_freq_choices: d.min_freq_choices,
            candidates: d.n_candidates,
            folds: d.folds,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub report_format: ReportFormat,
    pub paths: Paths,
    pub features: FeatureSection,
    pub train: TrainSection,
    pub split: SplitSection,
    pub search: SearchSection,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_text(path)?;
        let mut cfg = Self::parse(&text).map_err(|e| e.in_file(path))?;
        if let Some(dir) = path.parent() {
            cfg.paths.resolve(dir);
        }
        Ok(cfg)
    }

    /// Applies `--seed` to every seeded stage.
    pub fn set_seed(&mut self, seed: u64) {
        self.train.seed = seed;
        self.split.seed = seed;
        self.search.seed = seed;
    }

    /// One-line TOML-ish summary for the log.
    pub fn snapshot(&self) -> String {
        toml::to_string(self)
            .unwrap_or_default()
            .lines()
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            c1: self.train.c1,
            c2: self.train.c2,
            max_iterations: self.train.max_iterations,
            convergence_tol: self.train.convergence_tol,
            seed: self.train.seed,
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            ratios: self.split.ratios,
            seed: self.split.seed,
            stratify_labels: self.split.stratify_labels,
            balance_false_positives: self.split.balance_false_positives,
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            c1_range: (self.search.c1_range[0], self.search.c1_range[1]),
            c2_range: (self.search.c2_range[0], self.search.c2_range[1]),
            min_freq_choices: self.search.min_freq_choices.clone(),
            n_candidates: self.search.candidates,
            folds: self.search.folds,
            seed: self.search.seed,
        }
    }
}

impl Paths {
    fn resolve(&mut self, dir: &Path) {
        for p in [
            &mut self.lexicon,
            &mut self.acronyms,
            &mut self.stopwords,
            &mut self.rules,
            &mut self.model,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_core() {
        let c = PipelineConfig::parse("").unwrap();
        assert_eq!(c.train_config(), TrainConfig::default());
        assert_eq!(c.split_spec(), SplitSpec::default());
        assert_eq!(c.search_space(), SearchSpace::default());
    }

    #[test]
    fn partial_sections() {
        let c = PipelineConfig::parse("report_format = \"tsv\"\n[train]\nc1 = 0.5\n[search]\ncandidates = 4\n").unwrap();
        assert_eq!(c.train.c1, 0.5);
        assert_eq!(c.train.c2, 0.01);
        assert_eq!(c.search.candidates, 4);
        assert_eq!(c.report_format, ReportFormat::Tsv);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(PipelineConfig::parse("[train]\nc3 = 1\n"), Err(Error::Config(_))));
        assert!(PipelineConfig::parse("colour = 1\n").is_err());
    }

    #[test]
    fn relative_paths_follow_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "[paths]\nlexicon = \"lex.tsv\"\nrules = \"/abs/rules.tsv\"\n").unwrap();
        let c = PipelineConfig::load(&path).unwrap();
        assert_eq!(c.paths.lexicon.unwrap(), dir.path().join("lex.tsv"));
        assert_eq!(c.paths.rules.unwrap(), PathBuf::from("/abs/rules.tsv"));
    }

    #[test]
    fn snapshot_round_trips() {
        let c = PipelineConfig::default();
        assert!(c.snapshot().contains("c2 = 0.01"));
    }
}
