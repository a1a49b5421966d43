use alloc::string::ToString;
use alloc::vec::Vec;

use super::objective::{check_compatible, Likelihood};
use super::owlqn::{minimize, OwlqnParams, StopReason};
use super::CrfModel;
use crate::errors::{Error, Result};
use crate::features::FeatureDataset;

/// Recorded in model metadata under `optimizer`.
pub const OPTIMIZER_NAME: &str = "owl-qn";

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// L1 strength.
    pub c1: f64,
    /// L2 strength.
    pub c2: f64,
    pub max_iterations: usize,
    /// Relative objective change below which training stops.
    pub convergence_tol: f64,
    /// Recorded for replay; initialization is all-zero so training itself
    /// draws no randomness.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c1: 0.0,
            c2: 0.01,
            max_iterations: 200,
            convergence_tol: 1e-6,
            seed: 13,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 >= 0.0 && self.c1.is_finite()) || !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "c1 and c2 must be non-negative, got {} and {}",
                self.c1, self.c2
            )));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidConfig("convergence_tol must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Objective trace of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    /// Regularized objective at the start and after each accepted step.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

/// Trains a CRF by minimizing the L2-regularized negative log-likelihood
/// plus `c1 · ‖w‖₁` with OWL-QN, starting from zero weights.
pub fn train(data: &FeatureDataset, cfg: &TrainConfig) -> Result<CrfModel> {
    train_with_history(data, cfg).map(|(m, _)| m)
}

pub fn train_with_history(data: &FeatureDataset, cfg: &TrainConfig) -> Result<(CrfModel, TrainHistory)> {
    cfg.validate()?;
    if data.sequences.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let mut model = CrfModel::zeros(data.labels.clone(), data.feature_index.clone())?;
    check_compatible(&model, data)?;

    let lik = Likelihood {
        sequences: &data.sequences,
        num_features: model.num_features(),
        num_labels: model.num_labels(),
        c2: cfg.c2,
    };
    let start = vec![0.0; lik.dimension()];
    let params = OwlqnParams {
        l1: cfg.c1,
        max_iterations: cfg.max_iterations,
        tolerance: cfg.convergence_tol,
        ..OwlqnParams::default()
    };
    let mut f = |w: &[f64], g: &mut [f64]| lik.evaluate(w, g);
    let result = minimize(&mut f, &start, &params)?;
    model.set_weights(&result.weights);

    let meta = &mut model.metadata;
    meta.insert("optimizer".into(), OPTIMIZER_NAME.into());
    meta.insert("memory".into(), params.memory.to_string());
    meta.insert("c1".into(), format!("{:?}", cfg.c1));
    meta.insert("c2".into(), format!("{:?}", cfg.c2));
    meta.insert("max_iterations".into(), cfg.max_iterations.to_string());
    meta.insert("convergence_tol".into(), format!("{:?}", cfg.convergence_tol));
    meta.insert("seed".into(), cfg.seed.to_string());
    meta.insert("iterations".into(), result.iterations.to_string());
    meta.insert("objective".into(), format!("{:?}", result.objective));
    meta.insert("stop".into(), format!("{:?}", result.stop));

    Ok((
        model,
        TrainHistory {
            objective: result.history,
            iterations: result.iterations,
            stop: result.stop,
        },
    ))
}
