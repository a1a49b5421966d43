use alloc::vec::Vec;

use super::{posteriors, CrfModel};
use crate::errors::{Error, Result};
use crate::features::{EncodedSequence, FeatureDataset};

/// Negative log-likelihood of a dataset with an L2 penalty, as a function of
/// the flat weight vector (state block then transition block).
pub(crate) struct Likelihood<'a> {
    pub sequences: &'a [EncodedSequence],
    pub num_features: usize,
    pub num_labels: usize,
    pub c2: f64,
}

impl Likelihood<'_> {
    pub fn dimension(&self) -> usize {
        self.num_features * self.num_labels + self.num_labels * self.num_labels
    }

    /// Writes the gradient into `grad` and returns the objective.
    pub fn evaluate(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let l = self.num_labels;
        let n_state = self.num_features * l;
        let (state_w, trans_w) = w.split_at(n_state);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let (state_g, trans_g) = grad.split_at_mut(n_state);

        let mut nll = 0.0;
        let mut e = Vec::new();
        for seq in self.sequences {
            if seq.features.is_empty() {
                continue;
            }
            let t_len = seq.features.len();
            e.clear();
            e.resize(t_len * l, 0.0);
            for (t, feats) in seq.features.iter().enumerate() {
                let row = &mut e[t * l..(t + 1) * l];
                for &f in feats {
                    let ws = &state_w[f as usize * l..(f as usize + 1) * l];
                    row.iter_mut().zip(ws).for_each(|(r, w)| *r += w);
                }
            }
            let post = posteriors(&e, trans_w, l);

            let mut gold = 0.0;
            for (t, &y) in seq.labels.iter().enumerate() {
                gold += e[t * l + y];
                if t > 0 {
                    gold += trans_w[seq.labels[t - 1] * l + y];
                }
            }
            nll += post.log_partition - gold;

            for (t, feats) in seq.features.iter().enumerate() {
                let marg = &post.marginals[t];
                let y = seq.labels[t];
                for &f in feats {
                    let g = &mut state_g[f as usize * l..(f as usize + 1) * l];
                    g.iter_mut().zip(marg).for_each(|(g, m)| *g += m);
                    g[y] -= 1.0;
                }
            }
            for (t, pair) in post.pairwise.iter().enumerate() {
                trans_g.iter_mut().zip(pair).for_each(|(g, p)| *g += p);
                trans_g[seq.labels[t] * l + seq.labels[t + 1]] -= 1.0;
            }
        }

        if self.c2 > 0.0 {
            let mut sq = 0.0;
            for (g, wv) in grad.iter_mut().zip(w) {
                *g += self.c2 * wv;
                sq += wv * wv;
            }
            nll += 0.5 * self.c2 * sq;
        }
        nll
    }
}

/// Negative log-likelihood `Σ_i [log Z(x_i) − score(x_i, y_i)] + (c2/2)‖w‖²`
/// and its gradient (model expectations − empirical counts + `c2·w`),
/// laid out like [`CrfModel::weights`].
pub fn nll_and_gradient(model: &CrfModel, data: &FeatureDataset, c2: f64) -> Result<(f64, Vec<f64>)> {
    if data.sequences.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    check_compatible(model, data)?;
    let lik = Likelihood {
        sequences: &data.sequences,
        num_features: model.num_features(),
        num_labels: model.num_labels(),
        c2,
    };
    let w = model.weights();
    let mut grad = vec![0.0; w.len()];
    let f = lik.evaluate(&w, &mut grad);
    Ok((f, grad))
}

pub(crate) fn check_compatible(model: &CrfModel, data: &FeatureDataset) -> Result<()> {
    if model.labels() != data.labels.as_slice() {
        return Err(Error::InvalidConfig("model and dataset label sets differ".into()));
    }
    if model.num_features() != data.feature_index.len() {
        return Err(Error::LengthMismatch {
            expected: model.num_features(),
            found: data.feature_index.len(),
        });
    }
    let l = model.num_labels();
    let nf = model.num_features();
    for seq in &data.sequences {
        if seq.features.len() != seq.labels.len() {
            return Err(Error::LengthMismatch {
                expected: seq.features.len(),
                found: seq.labels.len(),
            });
        }
        if let Some(&y) = seq.labels.iter().find(|&&y| y >= l) {
            return Err(Error::IndexOutOfRange { index: y, len: l });
        }
        if let Some(&f) = seq.features.iter().flatten().find(|&&f| f as usize >= nf) {
            return Err(Error::IndexOutOfRange {
                index: f as usize,
                len: nf,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tag;
    use crate::features::FeatureIndex;
    use crate::math::ln;

    fn dataset(labels: usize, features: usize, seqs: Vec<EncodedSequence>) -> FeatureDataset {
        FeatureDataset {
            sequences: seqs,
            feature_index: FeatureIndex::from_keys((0..features).map(|i| format!("f{i:03}"))),
            labels: Tag::ALL[..labels].to_vec(),
        }
    }

    #[test]
    fn zero_weight_nll_is_t_ln_l() {
        let data = dataset(
            9,
            1,
            vec![EncodedSequence {
                features: vec![vec![0]; 4],
                labels: vec![0, 1, 2, 0],
            }],
        );
        let model = CrfModel::zeros(data.labels.clone(), data.feature_index.clone()).unwrap();
        let (f, _) = nll_and_gradient(&model, &data, 0.0).unwrap();
        assert!((f - 4.0 * ln(9.0)).abs() < 1e-12);
    }

    #[test]
    fn uniform_expectation_gradient() {
        let data = dataset(
            2,
            1,
            vec![EncodedSequence {
                features: vec![vec![0]],
                labels: vec![0],
            }],
        );
        let model = CrfModel::zeros(data.labels.clone(), data.feature_index.clone()).unwrap();
        let (_, g) = nll_and_gradient(&model, &data, 0.0).unwrap();
        assert!((g[0] + 0.5).abs() < 1e-12);
        assert!((g[1] - 0.5).abs() < 1e-12);
        // single token: no transition expectation
        assert!(g[2..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn l2_term() {
        let data = dataset(
            2,
            1,
            vec![EncodedSequence {
                features: vec![vec![0]],
                labels: vec![0],
            }],
        );
        let mut model = CrfModel::zeros(data.labels.clone(), data.feature_index.clone()).unwrap();
        model.set_transition_weight(1, 1, 2.0);
        let (f0, g0) = nll_and_gradient(&model, &data, 0.0).unwrap();
        let (f1, g1) = nll_and_gradient(&model, &data, 0.5).unwrap();
        assert!((f1 - f0 - 0.25 * 4.0).abs() < 1e-12);
        assert!((g1[5] - g0[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incompatible_model_rejected() {
        let data = dataset(2, 1, vec![EncodedSequence { features: vec![vec![0]], labels: vec![1] }]);
        let model = CrfModel::zeros(Tag::ALL[..3].to_vec(), data.feature_index.clone()).unwrap();
        assert!(nll_and_gradient(&model, &data, 0.0).is_err());
        let bad = dataset(2, 1, vec![EncodedSequence { features: vec![vec![5]], labels: vec![1] }]);
        let model = CrfModel::zeros(bad.labels.clone(), bad.feature_index.clone()).unwrap();
        assert!(nll_and_gradient(&model, &bad, 0.0).is_err());
    }
}
