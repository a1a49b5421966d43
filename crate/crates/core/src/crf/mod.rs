//! Linear-chain conditional random field.
//!
//! A labeling `y` of an input `x` (one feature-id list per token) scores
//!
//! ```text
//! score(x, y) = Σ_t Σ_{f ∈ x_t} state[f, y_t] + Σ_{t>0} transition[y_{t-1}, y_t]
//! ```
//!
//! and `P(y | x) = exp(score(x, y) - log Z(x))`. Transitions do not depend on
//! features and there are no start/stop weights. All inference runs in log
//! space in `f64`.

mod objective;
mod owlqn;
mod train;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Tag, TagSequence};
use crate::errors::{Error, Result};
use crate::features::FeatureIndex;
use crate::math::{exp, logsumexp};

pub use objective::nll_and_gradient;
pub use owlqn::{minimize, Objective, OwlqnParams, OwlqnResult, StopReason};
pub use train::{train, train_with_history, TrainConfig, TrainHistory, OPTIMIZER_NAME};

/// Free-form model metadata, stored and restored verbatim.
pub type ModelMetadata = BTreeMap<String, String>;

/// CRF parameters over a label set and a feature index.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    labels: Vec<Tag>,
    feature_index: FeatureIndex,
    /// Row-major `[feature][label]`.
    state_weights: Vec<f64>,
    /// Row-major `[from][to]`.
    transition_weights: Vec<f64>,
    pub metadata: ModelMetadata,
}

/// Exact marginals of one input.
#[derive(Debug, Clone, PartialEq)]
pub struct Posteriors {
    /// `log Z` from the forward pass.
    pub log_partition: f64,
    /// `log Z` recomputed from the backward pass.
    pub log_partition_backward: f64,
    /// `marginals[t][y] = P(y_t = y)`.
    pub marginals: Vec<Vec<f64>>,
    /// `pairwise[t][a * L + b] = P(y_t = a, y_{t+1} = b)`, `T - 1` entries.
    pub pairwise: Vec<Vec<f64>>,
}

impl CrfModel {
    /// A model with every weight zero.
    pub fn zeros(labels: Vec<Tag>, feature_index: FeatureIndex) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("label set"));
        }
        let l = labels.len();
        let n = feature_index.len();
        Ok(Self {
            labels,
            feature_index,
            state_weights: vec![0.0; n * l],
            transition_weights: vec![0.0; l * l],
            metadata: ModelMetadata::new(),
        })
    }

    /// Assembles a model from parts, checking sizes and finiteness.
    pub fn from_parts(
        labels: Vec<Tag>,
        feature_index: FeatureIndex,
        state_weights: Vec<f64>,
        transition_weights: Vec<f64>,
        metadata: ModelMetadata,
    ) -> Result<Self> {
        let mut m = Self::zeros(labels, feature_index)?;
        if state_weights.len() != m.state_weights.len() {
            return Err(Error::LengthMismatch {
                expected: m.state_weights.len(),
                found: state_weights.len(),
            });
        }
        if transition_weights.len() != m.transition_weights.len() {
            return Err(Error::LengthMismatch {
                expected: m.transition_weights.len(),
                found: transition_weights.len(),
            });
        }
        if state_weights.iter().chain(&transition_weights).any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig("non-finite weight".into()));
        }
        let mut seen = labels_seen(&m.labels);
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("duplicate label".into()));
        }
        m.state_weights = state_weights;
        m.transition_weights = transition_weights;
        m.metadata = metadata;
        Ok(m)
    }

    pub fn labels(&self) -> &[Tag] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_index(&self) -> &FeatureIndex {
        &self.feature_index
    }

    pub fn num_features(&self) -> usize {
        self.feature_index.len()
    }

    pub fn state_weights(&self) -> &[f64] {
        &self.state_weights
    }

    pub fn transition_weights(&self) -> &[f64] {
        &self.transition_weights
    }

    pub fn state_weight(&self, feature: u32, label: usize) -> f64 {
        self.state_weights[feature as usize * self.labels.len() + label]
    }

    pub fn set_state_weight(&mut self, feature: u32, label: usize, w: f64) {
        let l = self.labels.len();
        self.state_weights[feature as usize * l + label] = w;
    }

    pub fn transition_weight(&self, from: usize, to: usize) -> f64 {
        self.transition_weights[from * self.labels.len() + to]
    }

    pub fn set_transition_weight(&mut self, from: usize, to: usize, w: f64) {
        let l = self.labels.len();
        self.transition_weights[from * l + to] = w;
    }

    /// All weights, state block first.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = self.state_weights.clone();
        w.extend_from_slice(&self.transition_weights);
        w
    }

    pub(crate) fn set_weights(&mut self, w: &[f64]) {
        let n = self.state_weights.len();
        self.state_weights.copy_from_slice(&w[..n]);
        self.transition_weights.copy_from_slice(&w[n..]);
    }

    /// Number of nonzero weights.
    pub fn nonzero_weights(&self) -> usize {
        self.state_weights
            .iter()
            .chain(&self.transition_weights)
            .filter(|w| **w != 0.0)
            .count()
    }

    pub fn label_id(&self, tag: Tag) -> Result<usize> {
        self.labels
            .iter()
            .position(|&t| t == tag)
            .ok_or_else(|| Error::LabelNotInModel(tag.to_string()))
    }

    pub fn label_ids(&self, tags: &TagSequence) -> Result<Vec<usize>> {
        tags.0.iter().map(|&t| self.label_id(t)).collect()
    }

    /// Per-token state scores, row-major `[t][label]`. Feature ids outside
    /// the index are ignored.
    pub fn emissions(&self, x: &[Vec<u32>]) -> Vec<f64> {
        let l = self.labels.len();
        let n = self.feature_index.len();
        let mut e = vec![0.0; x.len() * l];
        for (t, feats) in x.iter().enumerate() {
            let row = &mut e[t * l..(t + 1) * l];
            for &f in feats {
                if (f as usize) < n {
                    let w = &self.state_weights[f as usize * l..(f as usize + 1) * l];
                    for (r, wv) in row.iter_mut().zip(w) {
                        *r += wv;
                    }
                }
            }
        }
        e
    }

    /// Unnormalized log-potential of labeling `y` (label ids).
    pub fn score_sequence(&self, x: &[Vec<u32>], y: &[usize]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::EmptyInput("sequence"));
        }
        let l = self.labels.len();
        if let Some(&bad) = y.iter().find(|&&k| k >= l) {
            return Err(Error::IndexOutOfRange { index: bad, len: l });
        }
        let n = self.feature_index.len();
        let mut score = 0.0;
        for (t, (feats, &label)) in x.iter().zip(y).enumerate() {
            for &f in feats {
                if (f as usize) < n {
                    score += self.state_weights[f as usize * l + label];
                }
            }
            if t > 0 {
                score += self.transition_weights[y[t - 1] * l + label];
            }
        }
        Ok(score)
    }

    /// As [`score_sequence`](Self::score_sequence) over tags.
    pub fn score_tags(&self, x: &[Vec<u32>], tags: &TagSequence) -> Result<f64> {
        let y = self.label_ids(tags)?;
        self.score_sequence(x, &y)
    }

    /// `log Z(x)` by the forward recursion.
    pub fn log_partition(&self, x: &[Vec<u32>]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::EmptyInput("sequence"));
        }
        let e = self.emissions(x);
        let alpha = forward(&e, &self.transition_weights, self.labels.len());
        let l = self.labels.len();
        Ok(logsumexp(&alpha[(x.len() - 1) * l..]))
    }

    /// `log P(y | x)`.
    pub fn log_probability(&self, x: &[Vec<u32>], y: &[usize]) -> Result<f64> {
        Ok(self.score_sequence(x, y)? - self.log_partition(x)?)
    }

    /// Forward–backward marginals.
    pub fn forward_backward(&self, x: &[Vec<u32>]) -> Result<Posteriors> {
        if x.is_empty() {
            return Err(Error::EmptyInput("sequence"));
        }
        let e = self.emissions(x);
        Ok(posteriors(&e, &self.transition_weights, self.labels.len()))
    }

    /// Highest-scoring labeling. Among equal scores the lower label id wins
    /// at every backtracking step.
    pub fn viterbi(&self, x: &[Vec<u32>]) -> Result<Vec<usize>> {
        if x.is_empty() {
            return Err(Error::EmptyInput("sequence"));
        }
        let l = self.labels.len();
        let t_len = x.len();
        let e = self.emissions(x);
        let mut delta = e[..l].to_vec();
        let mut back = vec![0usize; t_len * l];
        let mut next = vec![0.0; l];
        for t in 1..t_len {
            for to in 0..l {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for (from, &d) in delta.iter().enumerate() {
                    let s = d + self.transition_weights[from * l + to];
                    if s > best {
                        best = s;
                        arg = from;
                    }
                }
                next[to] = best + e[t * l + to];
                back[t * l + to] = arg;
            }
            core::mem::swap(&mut delta, &mut next);
        }
        let mut last = 0;
        for k in 1..l {
            if delta[k] > delta[last] {
                last = k;
            }
        }
        let mut path = vec![0; t_len];
        path[t_len - 1] = last;
        for t in (1..t_len).rev() {
            path[t - 1] = back[t * l + path[t]];
        }
        Ok(path)
    }

    /// Viterbi decoding mapped to tags.
    pub fn decode(&self, x: &[Vec<u32>]) -> Result<TagSequence> {
        if x.is_empty() {
            return Ok(TagSequence::default());
        }
        let path = self.viterbi(x)?;
        Ok(TagSequence(path.into_iter().map(|k| self.labels[k]).collect()))
    }
}

fn labels_seen(labels: &[Tag]) -> Vec<usize> {
    labels.iter().map(|t| t.index()).collect()
}

/// Forward log-messages, row-major `[t][label]`.
pub(crate) fn forward(e: &[f64], trans: &[f64], l: usize) -> Vec<f64> {
    let t_len = e.len() / l;
    let mut alpha = vec![0.0; e.len()];
    alpha[..l].copy_from_slice(&e[..l]);
    let mut buf = vec![0.0; l];
    for t in 1..t_len {
        for to in 0..l {
            for from in 0..l {
                buf[from] = alpha[(t - 1) * l + from] + trans[from * l + to];
            }
            alpha[t * l + to] = logsumexp(&buf) + e[t * l + to];
        }
    }
    alpha
}

/// Backward log-messages, row-major `[t][label]`.
pub(crate) fn backward(e: &[f64], trans: &[f64], l: usize) -> Vec<f64> {
    let t_len = e.len() / l;
    let mut beta = vec![0.0; e.len()];
    let mut buf = vec![0.0; l];
    for t in (0..t_len.saturating_sub(1)).rev() {
        for from in 0..l {
            for to in 0..l {
                buf[to] = trans[from * l + to] + e[(t + 1) * l + to] + beta[(t + 1) * l + to];
            }
            beta[t * l + from] = logsumexp(&buf);
        }
    }
    beta
}

pub(crate) fn posteriors(e: &[f64], trans: &[f64], l: usize) -> Posteriors {
    let t_len = e.len() / l;
    let alpha = forward(e, trans, l);
    let beta = backward(e, trans, l);
    let log_z = logsumexp(&alpha[(t_len - 1) * l..]);
    let first: Vec<f64> = (0..l).map(|k| e[k] + beta[k]).collect();
    let log_z_back = logsumexp(&first);

    let marginals = (0..t_len)
        .map(|t| {
            (0..l)
                .map(|k| exp(alpha[t * l + k] + beta[t * l + k] - log_z))
                .collect()
        })
        .collect();
    let pairwise = (0..t_len.saturating_sub(1))
        .map(|t| {
            let mut p = vec![0.0; l * l];
            for a in 0..l {
                for b in 0..l {
                    p[a * l + b] = exp(
                        alpha[t * l + a] + trans[a * l + b] + e[(t + 1) * l + b]
                            + beta[(t + 1) * l + b]
                            - log_z,
                    );
                }
            }
            p
        })
        .collect();
    Posteriors {
        log_partition: log_z,
        log_partition_backward: log_z_back,
        marginals,
        pairwise,
    }
}
