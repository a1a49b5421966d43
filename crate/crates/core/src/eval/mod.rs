//! Entity-level scoring and the experiment protocols built on it.

mod ablation;
mod agreement;
mod distribution;
mod search;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::corpus::{tag_spans, Sentence, SlotLabel, Tag, TagSequence, TokenSpan};
use crate::crf::{train, CrfModel, TrainConfig};
use crate::errors::{Error, Result};
use crate::features::{build_dataset, encode_sentence, FeatureConfig};
use crate::lexicon::DeviceLexicon;

pub use ablation::{ablation, ablation_configs, AblationRow};
pub use agreement::{agreement_f1, pairwise_agreement, PairwiseAgreement};
pub use distribution::{label_distribution, Distribution};
pub use search::{
    cv_folds, evaluate_candidate, random_search, sample_candidates, select_best, Candidate,
    CandidateResult, SearchOutcome, SearchSpace,
};

/// Precision, recall and F1 from raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl Prf {
    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }

    pub fn f1(&self) -> f64 {
        ratio(
            2 * self.true_positives,
            2 * self.true_positives + self.false_positives + self.false_negatives,
        )
    }

    fn add(&mut self, other: &Prf) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores of one slot label (or of the micro average).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabelScore {
    pub entities: Prf,
    /// Gold tokens carrying this label.
    pub support_tokens: usize,
    /// Gold entities of this label.
    pub support_entities: usize,
}

impl LabelScore {
    pub fn precision(&self) -> f64 {
        self.entities.precision()
    }

    pub fn recall(&self) -> f64 {
        self.entities.recall()
    }

    pub fn f1(&self) -> f64 {
        self.entities.f1()
    }
}

/// Per-label and micro-averaged entity scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreReport {
    pub per_label: BTreeMap<SlotLabel, LabelScore>,
    pub micro: LabelScore,
    /// Token-level counts over non-`O` gold/predicted tags; a token is a
    /// true positive when both tags are equal and not `O`.
    pub token_micro: Prf,
}

/// Exact-match entity scores: a predicted entity is correct only when its
/// label, first token and last token all equal a gold entity's.
pub fn entity_scores(gold: &[TagSequence], pred: &[TagSequence]) -> Result<ScoreReport> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            expected: gold.len(),
            found: pred.len(),
        });
    }
    let mut per_label: BTreeMap<SlotLabel, LabelScore> =
        SlotLabel::ALL.iter().map(|&l| (l, LabelScore::default())).collect();
    let mut token_micro = Prf::default();

    for (g, p) in gold.iter().zip(pred) {
        if g.len() != p.len() {
            return Err(Error::LengthMismatch {
                expected: g.len(),
                found: p.len(),
            });
        }
        for (&gt, &pt) in g.0.iter().zip(&p.0) {
            if let Some(l) = gt.label() {
                per_label.get_mut(&l).unwrap().support_tokens += 1;
            }
            match (gt, pt) {
                (Tag::O, Tag::O) => {}
                (a, b) if a == b => token_micro.true_positives += 1,
                (Tag::O, _) => token_micro.false_positives += 1,
                (_, Tag::O) => token_micro.false_negatives += 1,
                _ => {
                    token_micro.false_positives += 1;
                    token_micro.false_negatives += 1;
                }
            }
        }
        let (mut gs, _) = tag_spans(g.as_slice());
        let (ps, _) = tag_spans(p.as_slice());
        for s in &gs {
            per_label.get_mut(&s.label).unwrap().support_entities += 1;
        }
        let mut matched: Vec<bool> = vec![false; gs.len()];
        gs.sort();
        for s in &ps {
            let score = &mut per_label.get_mut(&s.label).unwrap().entities;
            match find_unmatched(&gs, &matched, s) {
                Some(k) => {
                    matched[k] = true;
                    score.true_positives += 1;
                }
                None => score.false_positives += 1,
            }
        }
        for (s, m) in gs.iter().zip(&matched) {
            if !m {
                per_label.get_mut(&s.label).unwrap().entities.false_negatives += 1;
            }
        }
    }

    let mut micro = LabelScore::default();
    for s in per_label.values() {
        micro.entities.add(&s.entities);
        micro.support_tokens += s.support_tokens;
        micro.support_entities += s.support_entities;
    }
    Ok(ScoreReport {
        per_label,
        micro,
        token_micro,
    })
}

fn find_unmatched(gold: &[TokenSpan], matched: &[bool], s: &TokenSpan) -> Option<usize> {
    gold.iter()
        .enumerate()
        .find(|(k, g)| !matched[*k] && *g == s)
        .map(|(k, _)| k)
}

/// Decodes every sentence with `model`.
pub fn predict(
    model: &CrfModel,
    sentences: &[Sentence],
    cfg: &FeatureConfig,
    lex: &DeviceLexicon,
) -> Result<Vec<TagSequence>> {
    sentences
        .iter()
        .map(|s| model.decode(&encode_sentence(s, cfg, lex, model.feature_index())))
        .collect()
}

/// Builds features on `train_set`, trains, decodes `eval_set` and scores it.
pub fn fit_and_evaluate(
    train_set: &[(Sentence, TagSequence)],
    eval_set: &[(Sentence, TagSequence)],
    feature_cfg: &FeatureConfig,
    train_cfg: &TrainConfig,
    lex: &DeviceLexicon,
) -> Result<(CrfModel, ScoreReport)> {
    let data = build_dataset(train_set, feature_cfg, lex)?;
    let model = train(&data, train_cfg)?;
    let sentences: Vec<Sentence> = eval_set.iter().map(|(s, _)| s.clone()).collect();
    let gold: Vec<TagSequence> = eval_set.iter().map(|(_, t)| t.clone()).collect();
    let pred = predict(&model, &sentences, feature_cfg, lex)?;
    let report = entity_scores(&gold, &pred)?;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use SlotLabel::*;

    fn seq(tags: &[Tag]) -> TagSequence {
        TagSequence(tags.to_vec())
    }

    #[test]
    fn perfect_prediction() {
        let g = vec![seq(&[Tag::O, Tag::B(Where)])];
        let r = entity_scores(&g, &g).unwrap();
        let w = r.per_label[&Where];
        assert_eq!((w.precision(), w.recall(), w.f1()), (1.0, 1.0, 1.0));
        assert_eq!(r.micro.f1(), 1.0);
    }

    #[test]
    fn half_recall() {
        let g = vec![seq(&[Tag::B(How), Tag::O, Tag::B(How), Tag::I(How)])];
        let p = vec![seq(&[Tag::B(How), Tag::O, Tag::O, Tag::O])];
        let r = entity_scores(&g, &p).unwrap();
        let h = r.per_label[&How];
        assert_eq!(h.precision(), 1.0);
        assert_eq!(h.recall(), 0.5);
        assert!((h.f1() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(h.support_tokens, 3);
        assert_eq!(h.support_entities, 2);
    }

    #[test]
    fn off_by_one_is_fp_and_fn() {
        let g = vec![seq(&[Tag::B(How), Tag::I(How), Tag::O])];
        let p = vec![seq(&[Tag::B(How), Tag::I(How), Tag::I(How)])];
        let r = entity_scores(&g, &p).unwrap();
        let h = r.per_label[&How];
        assert_eq!(h.entities.true_positives, 0);
        assert_eq!(h.entities.false_positives, 1);
        assert_eq!(h.entities.false_negatives, 1);
        assert_eq!(h.f1(), 0.0);
        assert_eq!(r.token_micro.true_positives, 2);
    }

    #[test]
    fn zero_support_with_predictions() {
        let g = vec![seq(&[Tag::O])];
        let p = vec![seq(&[Tag::B(What)])];
        let r = entity_scores(&g, &p).unwrap();
        assert_eq!(r.per_label[&What].f1(), 0.0);
        assert_eq!(r.per_label[&What].support_tokens, 0);
    }

    #[test]
    fn alignment_errors() {
        assert!(entity_scores(&[seq(&[Tag::O])], &[]).is_err());
        assert!(entity_scores(&[seq(&[Tag::O])], &[seq(&[Tag::O, Tag::O])]).is_err());
    }
}
