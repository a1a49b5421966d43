use alloc::vec::Vec;

use super::fit_and_evaluate;
use crate::corpus::{Sentence, TagSequence};
use crate::crf::TrainConfig;
use crate::errors::Result;
use crate::features::{FeatureConfig, MAX_WINDOW};
use crate::lexicon::DeviceLexicon;

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    /// `full`, then the cumulative removal that produced the row.
    pub name: &'static str,
    pub window: usize,
    pub use_head: bool,
    pub micro_f1: f64,
}

/// Feature configurations in removal order: all groups, then without the
/// head group, then shrinking the neighbor window from three to none.
pub fn ablation_configs(base: &FeatureConfig) -> Vec<(&'static str, FeatureConfig)> {
    let with = |window: usize, use_head: bool| FeatureConfig {
        window,
        use_head,
        ..base.clone()
    };
    vec![
        ("full", with(MAX_WINDOW, true)),
        ("-head", with(3, false)),
        ("-window3", with(2, false)),
        ("-window2", with(1, false)),
        ("-window1", with(0, false)),
    ]
}

/// Trains once per configuration of [`ablation_configs`] and reports
/// validation micro F1.
pub fn ablation(
    train_set: &[(Sentence, TagSequence)],
    valid_set: &[(Sentence, TagSequence)],
    base: &FeatureConfig,
    train_cfg: &TrainConfig,
    lex: &DeviceLexicon,
) -> Result<Vec<AblationRow>> {
    ablation_configs(base)
        .into_iter()
        .map(|(name, cfg)| {
            let (_, report) = fit_and_evaluate(train_set, valid_set, &cfg, train_cfg, lex)?;
            Ok(AblationRow {
                name,
                window: cfg.window,
                use_head: cfg.use_head,
                micro_f1: report.micro.f1(),
            })
        })
        .collect()
}
