use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fit_and_evaluate;
use crate::corpus::{stratified_partition, AnnotatedRecipe, Sentence, TagSequence};
use crate::crf::TrainConfig;
use crate::errors::{Error, Result};
use crate::features::FeatureConfig;
use crate::lexicon::DeviceLexicon;
use crate::math::{exp, ln};

/// Random-search distributions: `c1`, `c2` log-uniform, `min_freq` uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub c1_range: (f64, f64),
    pub c2_range: (f64, f64),
    pub min_freq_choices: Vec<usize>,
    pub n_candidates: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            c1_range: (1e-4, 10.0),
            c2_range: (1e-4, 10.0),
            min_freq_choices: (0..=10).collect(),
            n_candidates: 80,
            folds: 3,
            seed: 13,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("c1", self.c1_range), ("c2", self.c2_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} range must be positive and ordered, got ({lo}, {hi})"
                )));
            }
        }
        if self.min_freq_choices.is_empty() {
            return Err(Error::InvalidConfig("min_freq_choices is empty".into()));
        }
        if self.n_candidates == 0 {
            return Err(Error::InvalidConfig("n_candidates must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidConfig("folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// One sampled hyperparameter setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub c1: f64,
    pub c2: f64,
    pub min_freq: usize,
}

impl Candidate {
    /// `base` with this candidate's regularization.
    pub fn train_config(&self, base: &TrainConfig) -> TrainConfig {
        TrainConfig {
            c1: self.c1,
            c2: self.c2,
            ..base.clone()
        }
    }

    pub fn feature_config(&self, base: &FeatureConfig) -> FeatureConfig {
        FeatureConfig {
            min_freq: self.min_freq,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    pub candidate: Candidate,
    /// Micro entity F1 per fold; empty when training failed.
    pub fold_scores: Vec<f64>,
    /// Mean of `fold_scores`, or `-inf` for a failed candidate.
    pub mean_f1: f64,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: CandidateResult,
    /// In candidate-index order.
    pub results: Vec<CandidateResult>,
}

fn log_uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    let u: f64 = rng.random();
    exp(ln(lo) + u * (ln(hi) - ln(lo)))
}

/// Draws `space.n_candidates` settings from a generator seeded with
/// `space.seed`.
pub fn sample_candidates(space: &SearchSpace) -> Result<Vec<Candidate>> {
    space.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    Ok((0..space.n_candidates)
        .map(|index| {
            let c1 = log_uniform(&mut rng, space.c1_range);
            let c2 = log_uniform(&mut rng, space.c2_range);
            let k = rng.random_range(0..space.min_freq_choices.len());
            Candidate {
                index,
                c1,
                c2,
                min_freq: space.min_freq_choices[k],
            }
        })
        .collect())
}

/// Stratified k-fold assignment of recipe indices.
pub fn cv_folds(recipes: &[AnnotatedRecipe], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let ratios = vec![1.0 / folds as f64; folds];
    // equal shares may not sum to exactly 1 in floating point
    let sum: f64 = ratios.iter().sum();
    let ratios: Vec<f64> = ratios.iter().map(|r| r / sum).collect();
    stratified_partition(recipes, &ratios, seed, true, true)
}

fn flatten<'a, I: IntoIterator<Item = &'a AnnotatedRecipe>>(recipes: I) -> Vec<(Sentence, TagSequence)> {
    recipes
        .into_iter()
        .flat_map(|r| r.sentences.iter().cloned())
        .collect()
}

/// Mean held-out micro F1 of one candidate over the given folds.
pub fn evaluate_candidate(
    recipes: &[AnnotatedRecipe],
    folds: &[Vec<usize>],
    candidate: &Candidate,
    feature_base: &FeatureConfig,
    train_base: &TrainConfig,
    lex: &DeviceLexicon,
) -> CandidateResult {
    let fcfg = candidate.feature_config(feature_base);
    let tcfg = candidate.train_config(train_base);
    let mut scores = Vec::with_capacity(folds.len());
    for (k, held_out) in folds.iter().enumerate() {
        let train_set = flatten(
            folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .flat_map(|(_, f)| f.iter().map(|&i| &recipes[i])),
        );
        let eval_set = flatten(held_out.iter().map(|&i| &recipes[i]));
        match fit_and_evaluate(&train_set, &eval_set, &fcfg, &tcfg, lex) {
            Ok((_, report)) => scores.push(report.micro.f1()),
            Err(e) => {
                return CandidateResult {
                    candidate: *candidate,
                    fold_scores: Vec::new(),
                    mean_f1: f64::NEG_INFINITY,
                    error: Some(e),
                }
            }
        }
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    CandidateResult {
        candidate: *candidate,
        fold_scores: scores,
        mean_f1: mean,
        error: None,
    }
}

/// Highest mean F1; ties go to the lower candidate index.
pub fn select_best(results: &[CandidateResult]) -> Result<&CandidateResult> {
    let mut best: Option<&CandidateResult> = None;
    for r in results {
        if r.mean_f1 == f64::NEG_INFINITY {
            continue;
        }
        if best.is_none_or(|b| r.mean_f1 > b.mean_f1) {
            best = Some(r);
        }
    }
    best.ok_or(Error::NoViableCandidate)
}

/// Random search with stratified k-fold cross-validation over the combined
/// training and validation recipes.
pub fn random_search(
    recipes: &[AnnotatedRecipe],
    space: &SearchSpace,
    feature_base: &FeatureConfig,
    train_base: &TrainConfig,
    lex: &DeviceLexicon,
) -> Result<SearchOutcome> {
    if recipes.is_empty() {
        return Err(Error::EmptyInput("no recipes to search over"));
    }
    let candidates = sample_candidates(space)?;
    let folds = cv_folds(recipes, space.folds, space.seed)?;
    let results: Vec<CandidateResult> = candidates
        .iter()
        .map(|c| evaluate_candidate(recipes, &folds, c, feature_base, train_base, lex))
        .collect();
    let best = select_best(&results)?.clone();
    Ok(SearchOutcome { best, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_in_range_and_reproducible() {
        let space = SearchSpace::default();
        let a = sample_candidates(&space).unwrap();
        assert_eq!(a.len(), 80);
        for c in &a {
            assert!((1e-4..=10.0).contains(&c.c1));
            assert!((1e-4..=10.0).contains(&c.c2));
            assert!(c.min_freq <= 10);
        }
        assert_eq!(a, sample_candidates(&space).unwrap());
        let other = sample_candidates(&SearchSpace { seed: 14, ..space }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn degenerate_range() {
        let space = SearchSpace {
            c1_range: (0.5, 0.5),
            c2_range: (0.25, 0.25),
            min_freq_choices: vec![2],
            n_candidates: 1,
            ..SearchSpace::default()
        };
        let c = sample_candidates(&space).unwrap();
        assert_eq!((c[0].c1, c[0].c2, c[0].min_freq), (0.5, 0.25, 2));
    }

    #[test]
    fn invalid_spaces() {
        let bad = SearchSpace { c1_range: (0.0, 1.0), ..SearchSpace::default() };
        assert!(bad.validate().is_err());
        let bad = SearchSpace { folds: 1, ..SearchSpace::default() };
        assert!(bad.validate().is_err());
        let bad = SearchSpace { min_freq_choices: vec![], ..SearchSpace::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn best_skips_failures() {
        let mk = |index, mean_f1| CandidateResult {
            candidate: Candidate { index, c1: 1.0, c2: 1.0, min_freq: 0 },
            fold_scores: Vec::new(),
            mean_f1,
            error: None,
        };
        let rs = vec![mk(0, f64::NEG_INFINITY), mk(1, 0.4), mk(2, 0.4), mk(3, 0.1)];
        assert_eq!(select_best(&rs).unwrap().candidate.index, 1);
        assert!(select_best(&rs[..1]).is_err());
    }
}
