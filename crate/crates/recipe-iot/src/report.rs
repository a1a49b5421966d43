//! Tables printed by the command-line tools, as TSV or aligned text.

use std::collections::BTreeMap;

use recipe_iot_core::command::CompletenessReport;
use recipe_iot_core::corpus::SlotLabel;
use recipe_iot_core::eval::{AblationRow, Distribution, PairwiseAgreement, ScoreReport, SearchOutcome};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tsv,
    #[default]
    Text,
}

/// A header row plus data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Tsv => {
                for row in std::iter::once(&self.header).chain(&self.rows) {
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            }
            ReportFormat::Text => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                for row in std::iter::once(&self.header).chain(&self.rows) {
                    let cells: Vec<String> = row
                        .iter()
                        .zip(&widths)
                        .enumerate()
                        .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                        .collect();
                    out.push_str(cells.join("  ").trim_end());
                    out.push('\n');
                }
            }
        }
        out
    }
}

fn f(x: f64) -> String {
    format!("{x:.4}")
}

pub fn scores_table(report: &ScoreReport) -> Table {
    let mut t = Table::new(&["label", "precision", "recall", "f1", "tp", "fp", "fn", "entities", "tokens"]);
    let rows = report
        .per_label
        .iter()
        .map(|(l, s)| (l.as_str(), s))
        .chain(std::iter::once(("micro", &report.micro)));
    for (name, s) in rows {
        t.push(vec![
            name.to_string(),
            f(s.precision()),
            f(s.recall()),
            f(s.f1()),
            s.entities.true_positives.to_string(),
            s.entities.false_positives.to_string(),
            s.entities.false_negatives.to_string(),
            s.support_entities.to_string(),
            s.support_tokens.to_string(),
        ]);
    }
    let tok = &report.token_micro;
    t.push(vec![
        "token-micro".into(),
        f(tok.precision()),
        f(tok.recall()),
        f(tok.f1()),
        tok.true_positives.to_string(),
        tok.false_positives.to_string(),
        tok.false_negatives.to_string(),
        "-".into(),
        "-".into(),
    ]);
    t
}

pub fn distribution_table(dist: &BTreeMap<String, Distribution>) -> Table {
    let mut t = Table::new(&["device", "spans", "where%", "what%", "why%", "how%"]);
    for (device, d) in dist {
        let mut row = vec![device.clone(), d.total().to_string()];
        row.extend(SlotLabel::ALL.iter().map(|&l| format!("{:.2}", d.percent(l))));
        t.push(row);
    }
    t
}

pub fn completeness_table(report: &CompletenessReport) -> Table {
    let mut t = Table::new(&[
        "device",
        "commands",
        "text_complete",
        "inferred_complete",
        "missing_where",
        "missing_what",
        "missing_why",
        "missing_how",
    ]);
    for (device, d) in &report.per_device {
        let mut row = vec![
            device.clone(),
            d.commands.to_string(),
            f(d.text_complete_rate()),
            f(d.inferred_complete_rate()),
        ];
        row.extend(SlotLabel::ALL.iter().map(|&l| f(d.missing_rate(l))));
        t.push(row);
    }
    t
}

/// One row per candidate in index order; the best is marked with `*`.
pub fn search_table(outcome: &SearchOutcome) -> Table {
    let mut t = Table::new(&["candidate", "c1", "c2", "min_freq", "mean_f1", "folds", "best"]);
    for r in &outcome.results {
        let c = &r.candidate;
        let folds = match &r.error {
            Some(e) => format!("error: {e}"),
            None => r.fold_scores.iter().map(|s| f(*s)).collect::<Vec<_>>().join(","),
        };
        t.push(vec![
            c.index.to_string(),
            format!("{:.4e}", c.c1),
            format!("{:.4e}", c.c2),
            c.min_freq.to_string(),
            if r.mean_f1.is_finite() { f(r.mean_f1) } else { "-inf".into() },
            folds,
            if c.index == outcome.best.candidate.index { "*".into() } else { String::new() },
        ]);
    }
    t
}

pub fn ablation_table(rows: &[AblationRow]) -> Table {
    let mut t = Table::new(&["config", "window", "head", "micro_f1"]);
    for r in rows {
        t.push(vec![r.name.into(), r.window.to_string(), r.use_head.to_string(), f(r.micro_f1)]);
    }
    t
}

pub fn agreement_table(names: &[String], agreement: &PairwiseAgreement) -> Table {
    let mut t = Table::new(&["annotator_a", "annotator_b", "f1"]);
    for &(i, j, v) in &agreement.pairs {
        t.push(vec![names[i].clone(), names[j].clone(), f(v)]);
    }
    t.push(vec!["mean".into(), "-".into(), f(agreement.mean)]);
    t
}
