use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ent2vec::corpus::ingest as read_corpus;
use ent2vec::projection::project_model;
use ent2vec::{
    build_entity_catalog, build_vocabulary, language_inclusivity, load_model, save_model, synth,
    task_language_distribution, task_preference, CorpusConfig, DocumentRecord, EntitySpace,
    MetricsOptions, SynthSpec, TrainConfig, TrainMode, TsneConfig,
};
use serde::Serialize;

use crate::config::FileConfig;
use crate::error::{io_error, CliError, CliResult};
use crate::manifest::write_manifest;
use crate::{svg, AnalyzeArgs, IngestArgs, Metric, Mode, ProjectArgs, SynthArgs, TrainArgs};

fn write(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|e| io_error(path, e))
}

fn corpus_config(file: &FileConfig, min_count: Option<u64>, subsample: Option<f64>) -> CliResult<CorpusConfig> {
    let defaults = CorpusConfig::default();
    let subsample = match subsample.or(file.subsample) {
        Some(t) if t == 0.0 => None,
        Some(t) => Some(t),
        None => defaults.subsample,
    };
    let config = CorpusConfig {
        languages: file.languages.clone().unwrap_or(defaults.languages),
        categories: file.categories.clone().unwrap_or(defaults.categories),
        year_min: file.year_min.unwrap_or(defaults.year_min),
        year_max: file.year_max.unwrap_or(defaults.year_max),
        min_count: min_count.or(file.min_count).unwrap_or(defaults.min_count),
        subsample,
    };
    config.validate()?;
    Ok(config)
}

fn load_corpus(path: &Path, config: &CorpusConfig) -> CliResult<Vec<DocumentRecord>> {
    let (records, report) = read_corpus(path, config)?;
    if report.rejected > 0 {
        log::warn!("{}: {} of {} lines rejected", path.display(), report.rejected, report.rejected + report.accepted);
    }
    if records.is_empty() {
        return Err(CliError::Input(format!("{}: no valid records", path.display())));
    }
    Ok(records)
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    accepted: usize,
    rejected: usize,
    reasons: BTreeMap<String, usize>,
    unknown_field_warnings: usize,
    rejections: &'a [ent2vec::corpus::Rejection],
}

pub fn ingest(args: IngestArgs) -> CliResult<()> {
    let started = Instant::now();
    let file = FileConfig::load(args.config.as_deref())?;
    let config = corpus_config(&file, None, None)?;
    let (records, report) = read_corpus(&args.corpus, &config)?;
    let mut reasons = BTreeMap::new();
    for r in &report.rejections {
        *reasons.entry(r.reason.to_string()).or_default() += 1;
    }
    let summary = IngestSummary {
        accepted: report.accepted,
        rejected: report.rejected,
        reasons,
        unknown_field_warnings: report.unknown_field_warnings,
        rejections: &report.rejections,
    };
    let body = serde_json::to_string_pretty(&summary).expect("report serializes");
    write(&args.report, &(body + "\n"))?;
    println!("accepted {} rejected {}", report.accepted, report.rejected);
    if records.is_empty() {
        return Err(CliError::Input(format!("{}: no valid records", args.corpus.display())));
    }
    write_manifest("ingest", &config, vec![args.corpus], vec![args.report], started)
}

#[derive(Serialize)]
struct TrainRun {
    corpus: CorpusConfig,
    train: TrainConfig,
}

pub fn train(args: TrainArgs) -> CliResult<()> {
    let started = Instant::now();
    let file = FileConfig::load(args.config.as_deref())?;
    let corpus_cfg = corpus_config(&file, args.min_count, args.subsample)?;
    let mode = match (args.mode, file.mode.as_deref()) {
        (Some(Mode::Softmax), _) | (None, Some("softmax")) => TrainMode::ExactSoftmax,
        (Some(Mode::Ns), _) | (None, Some("ns")) | (None, None) => TrainMode::NegativeSampling,
        (None, Some(other)) => {
            return Err(CliError::Config(format!("unknown mode {other:?}, expected ns or softmax")))
        }
    };
    let d = TrainConfig::default();
    let train_cfg = TrainConfig {
        dim: args.dim.or(file.dim).unwrap_or(d.dim),
        epochs: args.epochs.or(file.epochs).unwrap_or(d.epochs),
        negatives: args.negatives.or(file.negatives).unwrap_or(d.negatives),
        lr0: args.lr.or(file.lr).unwrap_or(d.lr0),
        lr_min: args.lr_min.or(file.lr_min).unwrap_or(d.lr_min),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        mode,
        threads: args.threads.or(file.threads).unwrap_or(d.threads),
    };
    train_cfg.validate()?;

    let corpus = load_corpus(&args.corpus, &corpus_cfg)?;
    let vocab = build_vocabulary(&corpus, corpus_cfg.min_count, corpus_cfg.subsample_threshold())?;
    let catalog = build_entity_catalog(&corpus)?;
    log::info!(
        "training on {} records: {} entities, {} words",
        corpus.len(),
        catalog.len(),
        vocab.words().len()
    );
    let (model, report) = ent2vec::train(&corpus, &vocab, &catalog, &train_cfg)?;
    save_model(&model, &args.out).map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    let label = match mode {
        TrainMode::NegativeSampling => "final_mean_pair_loss",
        TrainMode::ExactSoftmax => "final_corpus_loss",
    };
    println!("{label} {:.6}", report.final_loss().unwrap_or(f64::NAN));
    if report.pairs_skipped > 0 {
        log::warn!("{} pairs skipped for lack of a valid negative", report.pairs_skipped);
    }
    let run = TrainRun {
        corpus: corpus_cfg,
        train: train_cfg,
    };
    write_manifest("train", &run, vec![args.corpus], vec![args.out], started)
}

#[derive(Serialize)]
struct AnalyzeRun {
    metric: Metric,
    normalize_before_mean: bool,
    corpus: Option<CorpusConfig>,
}

pub fn analyze(args: AnalyzeArgs) -> CliResult<()> {
    let started = Instant::now();
    let file = FileConfig::load(args.config.as_deref())?;
    let opts = MetricsOptions {
        normalize_before_mean: args.normalize || file.normalize.unwrap_or(false),
    };
    let mut inputs = Vec::new();
    let mut outputs = vec![args.out.clone()];
    let mut run = AnalyzeRun {
        metric: args.metric,
        normalize_before_mean: opts.normalize_before_mean,
        corpus: None,
    };
    let space = || -> CliResult<EntitySpace> {
        let path = args.model.as_ref().ok_or_else(|| {
            CliError::Config(format!("--model is required for the {:?} metric", args.metric))
        })?;
        Ok(EntitySpace::from(&load_model(path)?))
    };

    let (table, title) = match args.metric {
        Metric::Inclusivity => {
            let table = language_inclusivity(&space()?, opts)?;
            inputs.extend(args.model.clone());
            (table, "Language inclusivity (cosine distance)")
        }
        Metric::Preference => {
            let (distances, ranks) = task_preference(&space()?, opts)?;
            inputs.extend(args.model.clone());
            let distance_path = args.out.with_extension("distance.csv");
            write(&distance_path, &distances.to_csv())?;
            outputs.push(distance_path);
            (ranks, "Task preference rank (1 = closest)")
        }
        Metric::Distribution => {
            let path = args.corpus.as_ref().ok_or_else(|| {
                CliError::Config("--corpus is required for the distribution metric".into())
            })?;
            let config = corpus_config(&file, None, None)?;
            let corpus = load_corpus(path, &config)?;
            inputs.push(path.clone());
            run.corpus = Some(config);
            (task_language_distribution(&corpus)?, "Task-language distribution")
        }
    };
    table.validate().map_err(CliError::Numeric)?;
    write(&args.out, &table.to_csv())?;
    if let Some(path) = &args.svg {
        write(path, &svg::heatmap(&table, title))?;
        outputs.push(path.clone());
    }
    println!("{} rows x {} columns -> {}", table.rows(), table.cols(), args.out.display());
    write_manifest("analyze", &run, inputs, outputs, started)
}

pub fn project(args: ProjectArgs) -> CliResult<()> {
    let started = Instant::now();
    let file = FileConfig::load(args.config.as_deref())?;
    let d = TsneConfig::default();
    let config = TsneConfig {
        perplexity: args.perplexity.or(file.perplexity).unwrap_or(d.perplexity),
        iterations: args.iters.or(file.iters).unwrap_or(d.iterations),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        ..d
    };
    config.validate()?;
    let model = load_model(&args.model)?;
    let projection = project_model(&model, &config)?;
    write(&args.out, &projection.to_csv())?;
    let mut outputs = vec![args.out.clone()];
    if let Some(path) = &args.svg {
        write(path, &svg::scatter(&projection, "Entity embeddings (t-SNE)"))?;
        outputs.push(path.clone());
    }
    println!("points {} final_kl {:.6}", projection.points.len(), projection.final_kl);
    write_manifest("project", &config, vec![args.model], outputs, started)
}

pub fn synth(args: SynthArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read spec {}: {e}", path.display())))?;
            serde_json::from_str::<SynthSpec>(&text)
                .map_err(|e| CliError::Config(format!("invalid spec {}: {e}", path.display())))?
        }
        None => SynthSpec::canonical(0),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let records = ent2vec::generate(&spec)?;
    synth::write_jsonl(&records, &args.out).map_err(|e| io_error(&args.out, e))?;
    println!("records {}", records.len());
    let inputs: Vec<PathBuf> = args.spec.into_iter().collect();
    write_manifest("synth", &spec, inputs, vec![args.out], started)
}
