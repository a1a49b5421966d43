//! Subcommand front end. Every subcommand reads its inputs, runs one pipeline
//! stage and writes a primary output that depends only on the inputs, the
//! configuration and the seed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use recipe_iot_core::command::{
    assemble_commands, completeness_report, default_rules, detect_control_cues, infer_missing_slots, CompletenessReport,
    DeviceCompleteness, InferenceRule,
};
use recipe_iot_core::corpus::{iob_to_spans, AcronymTable, AnnotatedRecipe, Sentence, TagSequence};
use recipe_iot_core::crf::{train_with_history, CrfModel};
use recipe_iot_core::eval::{
    ablation, cv_folds, entity_scores, evaluate_candidate, label_distribution,
    pairwise_agreement, predict, sample_candidates, select_best, SearchOutcome,
};
use recipe_iot_core::features::{build_dataset, builtin_stopwords, parse_stopwords, FeatureConfig};
use recipe_iot_core::lexicon::DeviceLexicon;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::formats::{commands, embeddings, lexicon, model, recipeqa, rules};
use crate::io::{self, CorpusFormat};
use crate::preprocess::recipe_sentences;
use crate::report::{self, ReportFormat};

#[derive(Debug, Parser)]
#[command(name = "recipe-iot", version, about = "Label recipe instructions and turn them into kitchen-device commands")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every randomized stage; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Device dictionary (TSV); the bundled one is used otherwise.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub report_format: Option<ReportFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize and tokenize raw recipes into sentences for annotation.
    Preprocess(PreprocessArgs),
    /// Convert a corpus between doccano JSONL and CoNLL.
    Convert(ConvertArgs),
    /// Split a corpus by recipe into train, valid and test files.
    Split(SplitArgs),
    /// Train a CRF tagger.
    Train(TrainArgs),
    /// Tag sentences with a trained model.
    Tag(TagArgs),
    /// Score predicted tags against gold tags.
    Eval(EvalArgs),
    /// Random hyperparameter search with cross-validation.
    Search(SearchArgs),
    /// Retrain with feature groups removed one at a time.
    Ablate(AblateArgs),
    /// Turn tagged sentences into device commands (JSON lines).
    Commands(CommandsArgs),
    /// Corpus statistics.
    Report(ReportArgs),
    /// Pairwise inter-annotator agreement.
    Agreement(AgreementArgs),
    /// Nearest neighbours of a term in a word-embedding file.
    Expand(ExpandArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Recipes as JSON, JSON lines or a `{"data": [...]}` document.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Acronym table (`short<TAB>full`); the bundled one is used otherwise.
    #[arg(long)]
    pub acronyms: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<CorpusFormat>,
    /// Keep only recipes whose device hint is this top-level class.
    #[arg(long)]
    pub device: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub from: Option<CorpusFormat>,
    #[arg(long, value_enum)]
    pub to: Option<CorpusFormat>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Receives train.conll, valid.conll and test.conll.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
}

#[derive(Debug, Args, Default)]
pub struct FeatureFlags {
    /// Neighbour window radius, 0 to 3.
    #[arg(long)]
    pub window: Option<usize>,
    /// Drop head-word features.
    #[arg(long)]
    pub no_head: bool,
    #[arg(long)]
    pub min_freq: Option<usize>,
    /// Stopword list, one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TrainFlags {
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training corpus; repeat to concatenate several files.
    #[arg(long, required = true)]
    pub train: Vec<PathBuf>,
    /// Model destination; defaults to `paths.model` from the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureFlags,
    #[command(flatten)]
    pub train_flags: TrainFlags,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    /// Defaults to `paths.model` from the configuration.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<CorpusFormat>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Recipes to cross-validate on (typically train and valid).
    #[arg(long, required = true)]
    pub train: Vec<PathBuf>,
    /// Results table; standard output otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Writes the winning setting as a configuration fragment.
    #[arg(long)]
    pub best: Option<PathBuf>,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub features: FeatureFlags,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long, required = true)]
    pub train: Vec<PathBuf>,
    #[arg(long)]
    pub valid: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureFlags,
    #[command(flatten)]
    pub train_flags: TrainFlags,
}

#[derive(Debug, Args)]
pub struct CommandsArgs {
    /// Tagged corpus.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Inference rules; defaults to `paths.rules`, then the bundled rules.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit commands as assembled, without rule inference.
    #[arg(long)]
    pub no_infer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    /// Share of each slot label among labeled spans.
    Distribution,
    /// Command completeness before and after rule inference.
    Completeness,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(value_enum)]
    pub kind: ReportKind,
    #[arg(long = "in", required = true)]
    pub input: Vec<PathBuf>,
    /// Pool all recipes instead of grouping by device.
    #[arg(long)]
    pub overall: bool,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// One corpus per annotator, sentence-aligned.
    #[arg(required = true, num_args = 2..)]
    pub annotations: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Word vectors, one `word v1 v2 ...` per line.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub term: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 for usage or configuration errors, 2
/// for data errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Shared state resolved from the configuration and the global flags.
struct Context {
    cfg: PipelineConfig,
    lex: DeviceLexicon,
    format: ReportFormat,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let mut cfg = match &cli.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = cli.seed {
            cfg.set_seed(seed);
        }
        if let Some(p) = &cli.lexicon {
            cfg.paths.lexicon = Some(p.clone());
        }
        if let Some(f) = cli.report_format {
            cfg.report_format = f;
        }
        let lex = match &cfg.paths.lexicon {
            Some(p) => lexicon::parse_lexicon(&io::read_text(p)?).map_err(|e| e.in_file(p))?,
            None => lexicon::builtin_lexicon(),
        };
        log::info!("config: {}", cfg.snapshot());
        log::info!(
            "seed: train={} split={} search={}",
            cfg.train.seed,
            cfg.split.seed,
            cfg.search.seed
        );
        Ok(Self {
            format: cfg.report_format,
            cfg,
            lex,
        })
    }

    fn feature_config(&mut self, flags: &FeatureFlags) -> Result<FeatureConfig> {
        if let Some(w) = flags.window {
            self.cfg.features.window = w;
        }
        if flags.no_head {
            self.cfg.features.use_head = false;
        }
        if let Some(m) = flags.min_freq {
            self.cfg.features.min_freq = m;
        }
        if let Some(p) = &flags.stopwords {
            self.cfg.paths.stopwords = Some(p.clone());
        }
        let stopwords = match &self.cfg.paths.stopwords {
            Some(p) => parse_stopwords(&io::read_text(p)?),
            None => builtin_stopwords(),
        };
        let fc = FeatureConfig {
            window: self.cfg.features.window,
            use_head: self.cfg.features.use_head,
            min_freq: self.cfg.features.min_freq,
            stopwords,
        };
        fc.validate()?;
        Ok(fc)
    }

    fn apply_train_flags(&mut self, flags: &TrainFlags) {
        if let Some(c1) = flags.c1 {
            self.cfg.train.c1 = c1;
        }
        if let Some(c2) = flags.c2 {
            self.cfg.train.c2 = c2;
        }
        if let Some(n) = flags.max_iterations {
            self.cfg.train.max_iterations = n;
        }
    }

    fn rules(&self, flag: Option<&PathBuf>) -> Result<Vec<InferenceRule>> {
        match flag.or(self.cfg.paths.rules.as_ref()) {
            Some(p) => rules::parse_rules(&io::read_text(p)?).map_err(|e| e.in_file(p)),
            None => Ok(default_rules()),
        }
    }

    fn load_many(&self, paths: &[PathBuf]) -> Result<Vec<(Sentence, TagSequence)>> {
        let mut out = Vec::new();
        for p in paths {
            out.extend(io::load_tagged(p, None)?);
        }
        Ok(out)
    }

    fn recipes(&self, paths: &[PathBuf]) -> Result<Vec<AnnotatedRecipe>> {
        Ok(io::group_recipes(self.load_many(paths)?, &self.lex))
    }

    fn emit(&self, out: Option<&Path>, table: report::Table) -> Result<()> {
        io::write_output(out, &table.render(self.format))
    }
}

fn model_path(flag: Option<&PathBuf>, cfg: &PipelineConfig) -> Result<PathBuf> {
    flag.or(cfg.paths.model.as_ref())
        .cloned()
        .ok_or_else(|| Error::Usage("no model path: pass --model/--out or set paths.model".into()))
}

/// Stores everything `tag` needs to rebuild the training features.
fn record_features(model: &mut CrfModel, fc: &FeatureConfig, lex: &DeviceLexicon) {
    let m = &mut model.metadata;
    m.insert("feature.window".into(), fc.window.to_string());
    m.insert("feature.use_head".into(), fc.use_head.to_string());
    m.insert("feature.min_freq".into(), fc.min_freq.to_string());
    let stop: Vec<&str> = fc.stopwords.iter().map(String::as_str).collect();
    m.insert("feature.stopwords".into(), stop.join("\n"));
    m.insert("lexicon".into(), lexicon::emit_lexicon(lex));
}

fn restore_features(model: &CrfModel) -> Result<(FeatureConfig, DeviceLexicon)> {
    let get = |k: &str| {
        model
            .metadata
            .get(k)
            .ok_or_else(|| Error::Model(format!("missing metadata `{k}`")))
    };
    let bad = |k: &str| Error::Model(format!("invalid metadata `{k}`"));
    let fc = FeatureConfig {
        window: get("feature.window")?.parse().map_err(|_| bad("feature.window"))?,
        use_head: get("feature.use_head")?.parse().map_err(|_| bad("feature.use_head"))?,
        min_freq: get("feature.min_freq")?.parse().map_err(|_| bad("feature.min_freq"))?,
        stopwords: parse_stopwords(get("feature.stopwords")?),
    };
    let lex = lexicon::parse_lexicon(get("lexicon")?)?;
    Ok((fc, lex))
}

fn execute(cli: Cli) -> Result<()> {
    let mut ctx = Context::new(&cli)?;
    match cli.command {
        Command::Preprocess(a) => preprocess(&ctx, a),
        Command::Convert(a) => {
            let data = io::load_tagged(&a.input, a.from)?;
            io::save_tagged(Some(&a.out), &data, a.to)
        }
        Command::Split(a) => split(&mut ctx, a),
        Command::Train(a) => train(&mut ctx, a),
        Command::Tag(a) => tag(&ctx, a),
        Command::Eval(a) => {
            let gold = io::load_tagged(&a.gold, None)?;
            let pred = io::load_tagged(&a.pred, None)?;
            if let Some(index) = gold.iter().zip(&pred).position(|((g, _), (p, _))| g.text != p.text) {
                return Err(recipe_iot_core::Error::SentenceMismatch { index }.into());
            }
            let g: Vec<TagSequence> = gold.into_iter().map(|(_, t)| t).collect();
            let p: Vec<TagSequence> = pred.into_iter().map(|(_, t)| t).collect();
            ctx.emit(a.out.as_deref(), report::scores_table(&entity_scores(&g, &p)?))
        }
        Command::Search(a) => search(&mut ctx, a),
        Command::Ablate(a) => {
            let fc = ctx.feature_config(&a.features)?;
            ctx.apply_train_flags(&a.train_flags);
            let train = ctx.load_many(&a.train)?;
            let valid = io::load_tagged(&a.valid, None)?;
            let rows = ablation(&train, &valid, &fc, &ctx.cfg.train_config(), &ctx.lex)?;
            ctx.emit(a.out.as_deref(), report::ablation_table(&rows))
        }
        Command::Commands(a) => emit_commands(&ctx, a),
        Command::Report(a) => {
            let recipes = ctx.recipes(&a.input)?;
            let table = match a.kind {
                ReportKind::Distribution => report::distribution_table(&label_distribution(&recipes, !a.overall)?),
                ReportKind::Completeness => {
                    let rules = ctx.rules(a.rules.as_ref())?;
                    let mut rep = completeness_report(&recipes, &ctx.lex, &rules)?;
                    if a.overall {
                        rep = pool_devices(rep);
                    }
                    report::completeness_table(&rep)
                }
            };
            ctx.emit(a.out.as_deref(), table)
        }
        Command::Agreement(a) => {
            let sets = a
                .annotations
                .iter()
                .map(|p| io::load_tagged(p, None))
                .collect::<Result<Vec<_>>>()?;
            let names: Vec<String> = a.annotations.iter().map(|p| p.display().to_string()).collect();
            ctx.emit(a.out.as_deref(), report::agreement_table(&names, &pairwise_agreement(&sets)?))
        }
        Command::Expand(a) => {
            let table = embeddings::parse_embeddings(&io::read_text(&a.embeddings)?)
                .map_err(|e| e.in_file(&a.embeddings))?;
            let mut out = String::new();
            for (word, sim) in table.expand(&a.term, a.k)? {
                out.push_str(&format!("{word}\t{sim:.6}\n"));
            }
            io::write_output(a.out.as_deref(), &out)
        }
    }
}

fn preprocess(ctx: &Context, a: PreprocessArgs) -> Result<()> {
    let acronyms = match a.acronyms.as_ref().or(ctx.cfg.paths.acronyms.as_ref()) {
        Some(p) => AcronymTable::parse(&io::read_text(p)?),
        None => AcronymTable::builtin(),
    };
    let (recipes, errors) = recipeqa::ingest_recipeqa(&io::read_text(&a.input)?).map_err(|e| e.in_file(&a.input))?;
    for e in &errors {
        log::warn!("{}: record {}: {}", a.input.display(), e.index, e.message);
    }
    log::info!("{} recipes read, {} skipped", recipes.len(), errors.len());
    let mut data = Vec::new();
    for r in &recipes {
        let sentences = recipe_sentences(r, &acronyms, &ctx.lex);
        if let Some(d) = &a.device {
            if sentences.first().and_then(|s| s.device_hint.as_ref()) != Some(d) {
                continue;
            }
        }
        data.extend(sentences.into_iter().map(|s| {
            let tags = TagSequence::all_outside(s.len());
            (s, tags)
        }));
    }
    let format = a
        .format
        .or_else(|| a.out.as_deref().map(CorpusFormat::detect))
        .unwrap_or(CorpusFormat::Doccano);
    io::save_tagged(a.out.as_deref(), &data, Some(format))
}

fn split(ctx: &mut Context, a: SplitArgs) -> Result<()> {
    if let Some(r) = a.ratios {
        ctx.cfg.split.ratios = r
            .try_into()
            .map_err(|r: Vec<f64>| Error::Usage(format!("--ratios needs three values, got {}", r.len())))?;
    }
    let recipes = ctx.recipes(std::slice::from_ref(&a.input))?;
    let (train, valid, test) = recipe_iot_core::corpus::stratified_split(&recipes, &ctx.cfg.split_spec())?;
    std::fs::create_dir_all(&a.out_dir).map_err(|source| Error::Io {
        path: a.out_dir.clone(),
        source,
    })?;
    for (name, part) in [("train", &train), ("valid", &valid), ("test", &test)] {
        let path = a.out_dir.join(format!("{name}.conll"));
        io::save_tagged(Some(&path), &io::flatten(part), Some(CorpusFormat::Conll))?;
        log::info!("{}: {} recipes", path.display(), part.len());
    }
    Ok(())
}

fn train(ctx: &mut Context, a: TrainArgs) -> Result<()> {
    let fc = ctx.feature_config(&a.features)?;
    ctx.apply_train_flags(&a.train_flags);
    let out = model_path(a.out.as_ref(), &ctx.cfg)?;
    let data = ctx.load_many(&a.train)?;
    let dataset = build_dataset(&data, &fc, &ctx.lex)?;
    log::info!(
        "{} sentences, {} features",
        dataset.sequences.len(),
        dataset.feature_index.len()
    );
    let (mut model, history) = train_with_history(&dataset, &ctx.cfg.train_config())?;
    log::info!(
        "stopped after {} iterations ({:?}), {} nonzero weights",
        history.iterations,
        history.stop,
        model.nonzero_weights()
    );
    record_features(&mut model, &fc, &ctx.lex);
    io::write_text(&out, &model::save_model(&model))
}

fn tag(ctx: &Context, a: TagArgs) -> Result<()> {
    let path = model_path(a.model.as_ref(), &ctx.cfg)?;
    let m = model::load_model(&io::read_text(&path)?).map_err(|e| e.in_file(&path))?;
    let (fc, lex) = restore_features(&m).map_err(|e| e.in_file(&path))?;
    if ctx.cfg.paths.lexicon.is_some() && lex != ctx.lex {
        log::warn!("--lexicon differs from the dictionary the model was trained with; using the model's");
    }
    let data = io::load_tagged(&a.input, None)?;
    let sentences: Vec<Sentence> = data.into_iter().map(|(s, _)| s).collect();
    let tags = predict(&m, &sentences, &fc, &lex)?;
    let out: Vec<(Sentence, TagSequence)> = sentences.into_iter().zip(tags).collect();
    io::save_tagged(a.out.as_deref(), &out, a.format)
}

fn search(ctx: &mut Context, a: SearchArgs) -> Result<()> {
    let fc = ctx.feature_config(&a.features)?;
    if let Some(n) = a.candidates {
        ctx.cfg.search.candidates = n;
    }
    if let Some(k) = a.folds {
        ctx.cfg.search.folds = k;
    }
    if let Some(n) = a.max_iterations {
        ctx.cfg.train.max_iterations = n;
    }
    let space = ctx.cfg.search_space();
    let tbase = ctx.cfg.train_config();
    let recipes = ctx.recipes(&a.train)?;
    let candidates = sample_candidates(&space)?;
    let folds = cv_folds(&recipes, space.folds, space.seed)?;
    let lex = &ctx.lex;
    let eval_all = || {
        candidates
            .par_iter()
            .map(|c| evaluate_candidate(&recipes, &folds, c, &fc, &tbase, lex))
            .collect::<Vec<_>>()
    };
    let results = match a.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(eval_all),
        None => eval_all(),
    };
    for r in &results {
        if let Some(e) = &r.error {
            log::warn!("candidate {} failed: {e}", r.candidate.index);
        }
    }
    let best = select_best(&results)?.clone();
    let c = best.candidate;
    log::info!(
        "best candidate {}: c1={:e} c2={:e} min_freq={} mean F1 {:.4}",
        c.index,
        c.c1,
        c.c2,
        c.min_freq,
        best.mean_f1
    );
    if let Some(p) = &a.best {
        let fragment = format!(
            "[train]\nc1 = {:?}\nc2 = {:?}\n\n[features]\nmin_freq = {}\n",
            c.c1, c.c2, c.min_freq
        );
        io::write_text(p, &fragment)?;
    }
    let outcome = SearchOutcome { best, results };
    ctx.emit(a.out.as_deref(), report::search_table(&outcome))
}

/// Sums every device's counts under `all`.
fn pool_devices(rep: CompletenessReport) -> CompletenessReport {
    let mut all = DeviceCompleteness::default();
    for d in rep.per_device.values() {
        all.commands += d.commands;
        all.text_complete += d.text_complete;
        all.inferred_complete += d.inferred_complete;
        for (acc, n) in all.missing.iter_mut().zip(d.missing) {
            *acc += n;
        }
    }
    CompletenessReport {
        per_device: BTreeMap::from([("all".to_string(), all)]),
    }
}

fn emit_commands(ctx: &Context, a: CommandsArgs) -> Result<()> {
    let rules = ctx.rules(a.rules.as_ref())?;
    let recipes = ctx.recipes(std::slice::from_ref(&a.input))?;
    let mut out = String::new();
    let mut counts: BTreeMap<bool, usize> = BTreeMap::new();
    for r in &recipes {
        for (sentence, tags) in &r.sentences {
            let (spans, _) = iob_to_spans(sentence, tags)?;
            let hinted;
            let sentence = match (&sentence.device_hint, &r.device) {
                (None, Some(d)) => {
                    hinted = sentence.clone().with_device_hint(d.clone());
                    &hinted
                }
                _ => sentence,
            };
            let cues: Vec<commands::Cue> = detect_control_cues(sentence)
                .into_iter()
                .map(|c| (c.keyword, c.kind, c.token))
                .collect();
            for cmd in assemble_commands(sentence, &spans, &ctx.lex) {
                let cmd = if a.no_infer { cmd } else { infer_missing_slots(cmd, &rules) };
                *counts.entry(cmd.complete).or_default() += 1;
                out.push_str(&commands::command_json(&cmd, &cues));
                out.push('\n');
            }
        }
    }
    log::info!(
        "{} commands, {} complete",
        counts.values().sum::<usize>(),
        counts.get(&true).copied().unwrap_or(0)
    );
    io::write_output(a.out.as_deref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["recipe-iot", "split", "--in", "c.conll", "--out-dir", "o", "--seed", "7", "--ratios", "0.6,0.2,0.2"]).unwrap();
        assert_eq!(cli.seed, Some(7));
        match cli.command {
            Command::Split(a) => assert_eq!(a.ratios, Some(vec![0.6, 0.2, 0.2])),
            _ => panic!(),
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["recipe-iot", "bogus"]), 1);
        assert_eq!(run(["recipe-iot"]), 1);
        assert_eq!(run(["recipe-iot", "--help"]), 0);
        assert_eq!(run(["recipe-iot", "tag", "--in", "/nonexistent.conll"]), 1);
        assert_eq!(run(["recipe-iot", "eval", "--gold", "/nonexistent.conll", "--pred", "/x"]), 2);
    }

    #[test]
    fn feature_metadata_round_trip() {
        let lex = lexicon::builtin_lexicon();
        let fc = FeatureConfig {
            window: 2,
            use_head: false,
            min_freq: 3,
            stopwords: ["the", "a"].iter().map(|s| s.to_string()).collect(),
        };
        let mut m = CrfModel::zeros(recipe_iot_core::corpus::Tag::ALL.to_vec(), Default::default()).unwrap();
        record_features(&mut m, &fc, &lex);
        let loaded = model::load_model(&model::save_model(&m)).unwrap();
        let (fc2, lex2) = restore_features(&loaded).unwrap();
        assert_eq!(fc2, fc);
        assert_eq!(lex2, lex);
    }
}
