use alloc::vec::Vec;

use super::entity_scores;
use crate::corpus::{Sentence, TagSequence};
use crate::errors::{Error, Result};

/// Micro entity F1 between two annotators over the same sentences, treating
/// the first as gold. The value is symmetric in its arguments.
pub fn agreement_f1(a: &[(Sentence, TagSequence)], b: &[(Sentence, TagSequence)]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SentenceMismatch {
            index: a.len().min(b.len()),
        });
    }
    for (i, ((sa, ta), (sb, tb))) in a.iter().zip(b).enumerate() {
        if sa.text != sb.text || ta.len() != tb.len() {
            return Err(Error::SentenceMismatch { index: i });
        }
    }
    let gold: Vec<TagSequence> = a.iter().map(|(_, t)| t.clone()).collect();
    let pred: Vec<TagSequence> = b.iter().map(|(_, t)| t.clone()).collect();
    Ok(entity_scores(&gold, &pred)?.micro.f1())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseAgreement {
    /// `(i, j, f1)` for every annotator pair `i < j`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub mean: f64,
}

/// Agreement for every pair of annotators and the mean over pairs.
pub fn pairwise_agreement(annotators: &[Vec<(Sentence, TagSequence)>]) -> Result<PairwiseAgreement> {
    if annotators.len() < 2 {
        return Err(Error::EmptyInput("agreement needs at least two annotators"));
    }
    let mut pairs = Vec::new();
    for i in 0..annotators.len() {
        for j in i + 1..annotators.len() {
            pairs.push((i, j, agreement_f1(&annotators[i], &annotators[j])?));
        }
    }
    let mean = pairs.iter().map(|p| p.2).sum::<f64>() / pairs.len() as f64;
    Ok(PairwiseAgreement { pairs, mean })
}
