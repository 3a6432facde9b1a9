//! `pdrank` — pipeline driver for public-domain notability ranking.
//!
//! Subcommands follow the data flow:
//! `ingest` → `topics` → `featurize` → `fit` → `rank` → `report`,
//! with `eval` covering cross-validation and ranking comparison.
//! All stage outputs are plain files (JSON/TSV); every stochastic stage
//! is driven by the global `--seed`, so reruns reproduce outputs exactly.

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::FileConfig;
use pdrank_core::eval::{
    load_reference_ranking, make_cv_plan, pairwise_loss, permutation_confidence, run_cv, CvConfig,
    CvModel,
};
use pdrank_core::features::{
    assemble_base, FeatureMatrix, FeaturePipeline, FeatureRegistry, AGE_COLUMN,
};
use pdrank_core::ingest::{
    dump::parse_dump_fixture, label_coverage_stats, load_editions, load_overrides, load_persons,
    match_and_label, Catalog, IdentifierTag, PersonFileFormat, PersonRecord, YearRange,
};
use pdrank_core::model::{
    coefficient_report, fit_map, laplace_draws, FitOptions, ModelFit, PosteriorDraws, PriorSpec,
};
use pdrank_core::ranking::{expected_rank_and_score, predictive_probs, Provenance, RankingTable};
use pdrank_core::reports::{commons_gap_report, overlooked_report, pd_day_report, ReportConfig};
use pdrank_core::topics::{fit_topics_with_options, TopicModelState, VocabOptions};

#[derive(Parser)]
#[command(
    name = "pdrank",
    version,
    about = "Rank historical individuals by predicted likelihood of volunteer-made public-domain digital editions"
)]
struct Cli {
    /// Seed for every stochastic stage.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// JSON configuration file supplying defaults for omitted flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a labeled catalog from person, edition, and override files.
    Ingest(IngestArgs),
    /// Fit the topic model on the catalog's token streams.
    Topics(TopicsArgs),
    /// Assemble, standardize, and augment the design matrix.
    Featurize(FeaturizeArgs),
    /// Fit the regression on the labeled rows and draw from the posterior.
    Fit(FitArgs),
    /// Score the whole population and compute expected ranks.
    Rank(RankArgs),
    /// Cross-validate against baselines, or compare a ranking to a
    /// reference with a permutation test (pass --candidate/--reference).
    Eval(EvalArgs),
    /// Generate application reports from a ranking.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Args)]
struct IngestArgs {
    /// Person records (JSONL by default; see --persons-format).
    #[arg(long, value_name = "FILE")]
    persons: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "jsonl")]
    persons_format: PersonsFormat,

    /// MediaWiki export XML whose pages become additional person records.
    #[arg(long, value_name = "FILE")]
    dump: Option<PathBuf>,

    /// Edition catalog: 4-column TSV (author, death_year, collection, title).
    #[arg(long, value_name = "FILE")]
    editions: PathBuf,

    /// Manual corrections: 2-column TSV (person_id, true/false).
    #[arg(long, value_name = "FILE")]
    overrides: Option<PathBuf>,

    /// Label window as START:END (default 1910:1952).
    #[arg(long, value_name = "YEARS")]
    window: Option<String>,

    /// Death-year bins for a coverage table, e.g. 1910:1919,1920:1929.
    #[arg(long, value_name = "BINS")]
    coverage: Option<String>,

    /// Output catalog (JSON).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PersonsFormat {
    Jsonl,
    Tsv,
}

#[derive(Args)]
struct TopicsArgs {
    #[arg(long, value_name = "FILE")]
    catalog: PathBuf,

    /// Topic count K.
    #[arg(long)]
    k: Option<usize>,

    /// Full Gibbs sweeps.
    #[arg(long)]
    iterations: Option<usize>,

    #[arg(long)]
    alpha: Option<f64>,

    #[arg(long)]
    beta: Option<f64>,

    /// Drop tokens in fewer than this many documents.
    #[arg(long)]
    min_doc_count: Option<usize>,

    /// Drop tokens in more than this fraction of documents.
    #[arg(long)]
    max_doc_fraction: Option<f64>,

    /// Output topic model state (JSON).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[arg(long, value_name = "FILE")]
    catalog: PathBuf,

    #[arg(long, value_name = "FILE")]
    topics: PathBuf,

    /// Which rows the scalers are fit on.
    #[arg(long, value_enum, default_value = "labeled")]
    fit_on: FitOn,

    /// Output design matrix (TSV).
    #[arg(long, value_name = "FILE")]
    features_out: PathBuf,

    /// Output pipeline sidecar (JSON: registry + scalers).
    #[arg(long, value_name = "FILE")]
    pipeline_out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FitOn {
    Labeled,
    All,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_name = "FILE")]
    features: PathBuf,

    #[arg(long, value_name = "FILE")]
    pipeline: PathBuf,

    /// Posterior draw count (0 = none; rank then uses the point estimate).
    #[arg(long)]
    draws: Option<usize>,

    #[arg(long, value_name = "FILE")]
    draws_out: Option<PathBuf>,

    /// Write the coefficient table (TSV) here.
    #[arg(long, value_name = "FILE")]
    coefficients_out: Option<PathBuf>,

    #[arg(long)]
    prior_df: Option<f64>,

    #[arg(long)]
    prior_scale: Option<f64>,

    #[arg(long)]
    prior_intercept_scale: Option<f64>,

    /// Gradient max-norm tolerance.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long)]
    max_iter: Option<usize>,

    /// Output model fit (JSON).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long, value_name = "FILE")]
    features: PathBuf,

    #[arg(long, value_name = "FILE")]
    pipeline: PathBuf,

    #[arg(long, value_name = "FILE")]
    fit: PathBuf,

    /// Posterior draws (JSON); omitted = point estimate only.
    #[arg(long, value_name = "FILE")]
    draws: Option<PathBuf>,

    #[arg(long, value_name = "FILE")]
    catalog: PathBuf,

    /// Output ranking table (TSV); provenance goes to <out>.meta.json.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    // Cross-validation mode.
    #[arg(long, value_name = "FILE")]
    catalog: Option<PathBuf>,

    #[arg(long, value_name = "FILE")]
    topics: Option<PathBuf>,

    /// CV repeats (each evaluates both halves).
    #[arg(long)]
    repeats: Option<usize>,

    // Pairwise-comparison mode.
    /// Candidate ranking TSV (as written by `rank`).
    #[arg(long, value_name = "FILE")]
    candidate: Option<PathBuf>,

    /// Reference ranking: TSV with header, columns (name, reference_rank).
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,

    #[arg(long)]
    permutations: Option<usize>,

    /// Output TSV (CV rows or the pairwise result; CV also writes
    /// <out>.summary.tsv).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Authors whose works enter the public domain inside a window.
    PdDay(PdDayArgs),
    /// Public-domain authors whose works lack digital editions.
    CommonsGap(CommonsGapArgs),
    /// High-scoring articles missing bibliographic identifiers.
    Overlooked(OverlookedArgs),
}

#[derive(Args)]
struct ReportIo {
    #[arg(long, value_name = "FILE")]
    ranking: PathBuf,

    #[arg(long, value_name = "FILE")]
    catalog: PathBuf,

    /// Keep at most this many rows (0 = unlimited).
    #[arg(long)]
    top_n: Option<usize>,

    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct PdDayArgs {
    #[command(flatten)]
    io: ReportIo,

    /// Copyright term in years p.m.a.
    #[arg(long)]
    term: Option<i32>,

    /// Entry window as START:END, e.g. 2015:2025.
    #[arg(long, value_name = "YEARS")]
    window: Option<String>,
}

#[derive(Args)]
struct CommonsGapArgs {
    #[command(flatten)]
    io: ReportIo,

    #[arg(long)]
    term: Option<i32>,

    /// Works entering at or before this year count as public domain.
    #[arg(long)]
    as_of: Option<i32>,
}

#[derive(Args)]
struct OverlookedArgs {
    #[command(flatten)]
    io: ReportIo,

    /// Minimum score.
    #[arg(long)]
    score_threshold: Option<f64>,

    /// Identifiers that must all be absent (comma-separated; default all).
    #[arg(long, value_name = "TAGS")]
    identifiers: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args, &config),
        Command::Topics(args) => cmd_topics(args, &config, cli.seed),
        Command::Featurize(args) => cmd_featurize(args),
        Command::Fit(args) => cmd_fit(args, &config, cli.seed),
        Command::Rank(args) => cmd_rank(args),
        Command::Eval(args) => cmd_eval(args, &config, cli.seed),
        Command::Report(report) => cmd_report(report, &config),
    }
}

fn parse_window(flag: Option<&str>, config: Option<&str>, default: YearRange) -> Result<YearRange> {
    match flag.or(config) {
        Some(s) => Ok(YearRange::from_str(s)?),
        None => Ok(default),
    }
}

fn sha256_prefix(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(hex::encode(&digest[..16]))
}

fn cmd_ingest(args: IngestArgs, config: &FileConfig) -> Result<()> {
    let mut persons: Vec<PersonRecord> = Vec::new();
    if let Some(path) = &args.persons {
        let format = match args.persons_format {
            PersonsFormat::Jsonl => PersonFileFormat::Jsonl,
            PersonsFormat::Tsv => PersonFileFormat::Tsv,
        };
        persons = load_persons(path, format)
            .with_context(|| format!("loading persons from {}", path.display()))?;
        log::info!(
            "loaded {} person records from {}",
            persons.len(),
            path.display()
        );
    }
    if let Some(path) = &args.dump {
        let file = BufReader::new(
            File::open(path).with_context(|| format!("opening dump {}", path.display()))?,
        );
        let parsed =
            parse_dump_fixture(file).with_context(|| format!("parsing dump {}", path.display()))?;
        log::info!(
            "dump: {} records, {} skipped (inclusion {}, pre-1000 {}, missing text {})",
            parsed.records.len(),
            parsed.skips.total(),
            parsed.skips.inclusion_rule,
            parsed.skips.early_death,
            parsed.skips.missing_text
        );
        persons.extend(parsed.records);
    }
    if persons.is_empty() {
        bail!("no person records; pass --persons and/or --dump");
    }

    let editions = load_editions(&args.editions)
        .with_context(|| format!("loading editions from {}", args.editions.display()))?;
    let overrides = match &args.overrides {
        Some(path) => load_overrides(path)
            .with_context(|| format!("loading overrides from {}", path.display()))?,
        None => Vec::new(),
    };
    let catalog = Catalog::from_parts(persons, editions, overrides)?;

    let window = parse_window(
        args.window.as_deref(),
        config.label_window.as_deref(),
        YearRange::label_window(),
    )?;
    let catalog = match_and_label(catalog, &window)?;

    let labeled = catalog
        .persons()
        .iter()
        .filter(|p| p.has_digital_edition.is_some())
        .count();
    let positives = catalog
        .persons()
        .iter()
        .filter(|p| p.has_digital_edition == Some(true))
        .count();
    println!(
        "catalog: {} persons, {} editions, {} labeled ({} with editions), window {}",
        catalog.len(),
        catalog.editions.len(),
        labeled,
        positives,
        window
    );

    if let Some(bins_arg) = &args.coverage {
        let bins: Vec<YearRange> = bins_arg
            .split(',')
            .map(YearRange::from_str)
            .collect::<pdrank_core::Result<_>>()?;
        println!("death_years\tlabeled\twith_editions\tpercent");
        for bin in label_coverage_stats(&catalog, &bins) {
            let pct = bin
                .percent
                .map(|p| format!("{p:.1}"))
                .unwrap_or_else(|| "-".to_string());
            println!(
                "{}-{}\t{}\t{}\t{}",
                bin.range.start, bin.range.end, bin.labeled, bin.positives, pct
            );
        }
    }

    catalog.save_json(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_topics(args: TopicsArgs, config: &FileConfig, seed: u64) -> Result<()> {
    let catalog = Catalog::load_json(&args.catalog)?;
    let section = config.topics();
    let k = args.k.or(section.k).unwrap_or(200);
    let iterations = args.iterations.or(section.iterations).unwrap_or(200);
    let alpha = args.alpha.or(section.alpha).unwrap_or(0.1);
    let beta = args.beta.or(section.beta).unwrap_or(0.01);
    let vocab = VocabOptions {
        min_doc_count: args
            .min_doc_count
            .or(section.min_doc_count)
            .unwrap_or(VocabOptions::default().min_doc_count),
        max_doc_fraction: args
            .max_doc_fraction
            .or(section.max_doc_fraction)
            .unwrap_or(VocabOptions::default().max_doc_fraction),
    };
    let corpus: Vec<Vec<String>> = catalog.persons().iter().map(|p| p.tokens.clone()).collect();
    let state = fit_topics_with_options(&corpus, k, iterations, alpha, beta, seed, &vocab)?;
    println!(
        "topics: K={} over {} documents, vocabulary {}, {} sweeps, seed {}",
        state.k(),
        state.doc_count(),
        state.vocabulary().len(),
        iterations,
        seed
    );
    state.save_json(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Topic weights for every catalog person, using stored counts (the state
/// must have been fit on this catalog, in order).
fn catalog_weights(catalog: &Catalog, state: &TopicModelState) -> Result<Vec<Vec<f64>>> {
    if state.doc_count() != catalog.len() {
        bail!(
            "topic state covers {} documents but the catalog has {} persons; \
             refit topics on this catalog",
            state.doc_count(),
            catalog.len()
        );
    }
    (0..catalog.len())
        .map(|d| state.document_weights(d).map_err(Into::into))
        .collect()
}

fn cmd_featurize(args: FeaturizeArgs) -> Result<()> {
    let catalog = Catalog::load_json(&args.catalog)?;
    let state = TopicModelState::load_json(&args.topics)?;
    let weights = catalog_weights(&catalog, &state)?;
    let registry = FeatureRegistry::standard(state.k());
    let base = assemble_base(catalog.persons(), &weights, &registry)?;

    let fit_base = match args.fit_on {
        FitOn::All => base.clone(),
        FitOn::Labeled => {
            let rows = base.labeled_rows();
            if rows.len() < 2 {
                bail!("need at least 2 labeled rows to fit the scalers");
            }
            base.select_rows(&rows)?
        }
    };
    let pipeline = FeaturePipeline::fit(registry, &fit_base, AGE_COLUMN)?;
    let features = pipeline.transform(&base)?;
    features.save_tsv(&args.features_out)?;
    pipeline.save_json(&args.pipeline_out)?;
    println!(
        "features: {} rows × {} columns (pipeline {})",
        features.n_rows(),
        features.n_cols(),
        pipeline.hash()
    );
    println!("wrote {}", args.features_out.display());
    println!("wrote {}", args.pipeline_out.display());
    Ok(())
}

/// Load a feature TSV and stamp it with the pipeline's hash, verifying the
/// column layout matches the pipeline that claims to have produced it.
fn load_features(features: &Path, pipeline: &Path) -> Result<(FeatureMatrix, FeaturePipeline)> {
    let pipeline = FeaturePipeline::load_json(pipeline)?;
    let mut matrix = FeatureMatrix::load_tsv(features)?;
    let expected = pipeline.output_columns();
    if matrix.columns() != expected.as_slice() {
        bail!(
            "feature columns do not match the pipeline ({} vs {} columns); \
             re-run featurize",
            matrix.columns().len(),
            expected.len()
        );
    }
    matrix.set_pipeline_hash(Some(pipeline.hash()));
    Ok((matrix, pipeline))
}

fn cmd_fit(args: FitArgs, config: &FileConfig, seed: u64) -> Result<()> {
    let (features, _pipeline) = load_features(&args.features, &args.pipeline)?;
    let labeled_rows = features.labeled_rows();
    if labeled_rows.is_empty() {
        bail!("the feature matrix has no labeled rows");
    }
    let train = features.select_rows(&labeled_rows)?;
    let labels = train.label_vector(&(0..train.n_rows()).collect::<Vec<_>>())?;

    let prior_section = config.prior();
    let prior = PriorSpec {
        df: args.prior_df.or(prior_section.df).unwrap_or(7.0),
        scale: args.prior_scale.or(prior_section.scale).unwrap_or(5.0),
        intercept_scale: args
            .prior_intercept_scale
            .or(prior_section.intercept_scale)
            .unwrap_or(10.0),
    };
    let fit_section = config.fit();
    let opts = FitOptions {
        tol: args.tol.or(fit_section.tol).unwrap_or(1e-8),
        max_iter: args.max_iter.or(fit_section.max_iter).unwrap_or(500),
    };

    let fit = fit_map(&train, &labels, &prior, &opts)?;
    println!(
        "fit: {} rows, {} coefficients, converged={}, grad_norm={:.3e}, iterations={}",
        train.n_rows(),
        fit.coefficients.len(),
        fit.converged,
        fit.grad_norm,
        fit.iterations
    );
    fit.save_json(&args.out)?;
    println!("wrote {}", args.out.display());

    let n_draws = args.draws.or(config.draws).unwrap_or(0);
    let draws = if n_draws > 0 {
        let draws = laplace_draws(&fit, &train, &labels, &prior, n_draws, seed)?;
        if let Some(path) = &args.draws_out {
            draws.save_json(path)?;
            println!("wrote {} ({} draws, seed {seed})", path.display(), n_draws);
        }
        Some(draws)
    } else {
        if args.draws_out.is_some() {
            bail!("--draws-out requires --draws > 0");
        }
        None
    };

    if let Some(path) = &args.coefficients_out {
        let draws = draws.unwrap_or_else(|| PosteriorDraws::point_estimate(&fit));
        let names: Vec<String> = train.columns().to_vec();
        let rows = coefficient_report(&names, &fit, &draws)?;
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "feature\tmap\tposterior_mean\tq25\tq75\tq025\tq975")?;
        for r in &rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.name, r.map_value, r.posterior_mean, r.ci50.0, r.ci50.1, r.ci95.0, r.ci95.1
            )?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let (features, _pipeline) = load_features(&args.features, &args.pipeline)?;
    let fit = ModelFit::load_json(&args.fit)?;
    let draws = match &args.draws {
        Some(path) => PosteriorDraws::load_json(path)?,
        None => PosteriorDraws::point_estimate(&fit),
    };
    let catalog = Catalog::load_json(&args.catalog)?;

    let probs = predictive_probs(&draws, &features)?;
    let provenance = Provenance {
        model_hash: Some(sha256_prefix(&args.fit)?),
        data_hash: Some(sha256_prefix(&args.features)?),
    };
    let table = expected_rank_and_score(&probs, features.row_ids(), provenance)?;
    table.save_tsv(&catalog, &args.out)?;
    println!(
        "ranking: {} persons × {} draws",
        table.population, table.draw_count
    );
    println!("wrote {}", args.out.display());

    let meta_path = PathBuf::from(format!("{}.meta.json", args.out.display()));
    let meta = serde_json::json!({
        "population": table.population,
        "draw_count": table.draw_count,
        "provenance": table.provenance,
    });
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    println!("wrote {}", meta_path.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs, config: &FileConfig, seed: u64) -> Result<()> {
    match (&args.candidate, &args.reference) {
        (Some(candidate), Some(reference)) => {
            let permutations = args
                .permutations
                .or(config.eval().permutations)
                .unwrap_or(10_000);
            eval_pairwise(candidate, reference, permutations, seed, &args.out)
        }
        (None, None) => {
            let (Some(catalog), Some(topics)) = (&args.catalog, &args.topics) else {
                bail!("eval needs --catalog and --topics (CV mode) or --candidate and --reference (pairwise mode)");
            };
            let repeats = args.repeats.or(config.eval().repeats).unwrap_or(20);
            eval_cv(catalog, topics, repeats, seed, &args.out)
        }
        _ => bail!("pass both --candidate and --reference for pairwise mode"),
    }
}

fn eval_cv(
    catalog_path: &Path,
    topics_path: &Path,
    repeats: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let catalog = Catalog::load_json(catalog_path)?;
    let state = TopicModelState::load_json(topics_path)?;
    let weights = catalog_weights(&catalog, &state)?;
    let registry = FeatureRegistry::standard(state.k());
    let base = assemble_base(catalog.persons(), &weights, &registry)?;

    let labeled_rows = base.labeled_rows();
    let labeled_base = base.select_rows(&labeled_rows)?;
    let labeled: Vec<(String, bool)> = labeled_base
        .row_ids()
        .iter()
        .zip(labeled_base.labels())
        .map(|(id, l)| (id.clone(), l.expect("labeled rows")))
        .collect();
    let plan = make_cv_plan(&labeled, repeats, seed)?;
    let report = run_cv(&labeled_base, &plan, &CvModel::ALL, &CvConfig::default())?;

    let file = BufWriter::new(File::create(out)?);
    report.write_tsv(file)?;
    println!("wrote {}", out.display());
    let summary_path = out.with_extension("summary.tsv");
    let file = BufWriter::new(File::create(&summary_path)?);
    report.write_summary(file)?;
    println!("wrote {}", summary_path.display());

    println!(
        "cv: {} repeats × 2 halves over {} labeled persons (seed {seed})",
        repeats,
        labeled.len()
    );
    for s in &report.summaries {
        println!(
            "  {}: mean held-out log loss {:.4} (sd {:.4}, {} fits)",
            s.model, s.mean_loss, s.sd_loss, s.fits
        );
    }
    for s in &report.skipped {
        println!(
            "  skipped repeat {} half {}: {}",
            s.repeat, s.half, s.reason
        );
    }
    Ok(())
}

/// Candidate rows (person_id, title, expected_rank) from a ranking TSV.
fn load_candidate_rows(path: &Path) -> Result<Vec<(String, String, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("ranking file lacks a {name:?} column"))
    };
    let id_col = col("person_id")?;
    let title_col = col("title")?;
    let rank_col = col("expected_rank")?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push((
            record[id_col].to_string(),
            record[title_col].to_string(),
            record[rank_col]
                .parse::<f64>()
                .with_context(|| format!("bad expected_rank {:?}", &record[rank_col]))?,
        ));
    }
    Ok(rows)
}

fn eval_pairwise(
    candidate_path: &Path,
    reference_path: &Path,
    permutations: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let reference = load_reference_ranking(reference_path)?;
    let rows = load_candidate_rows(candidate_path)?;

    // Reference keys may be person ids or display titles.
    let mut candidate = Vec::with_capacity(reference.len());
    let mut missing = Vec::new();
    for (key, _) in &reference {
        match rows.iter().find(|(id, title, _)| id == key || title == key) {
            Some((_, _, rank)) => candidate.push((key.clone(), *rank)),
            None => missing.push(key.clone()),
        }
    }
    if !missing.is_empty() {
        bail!("ranking lacks reference entries: {}", missing.join(", "));
    }

    let observed = pairwise_loss(&candidate, &reference)?;
    let result = permutation_confidence(&candidate, &reference, permutations, seed)?;
    println!(
        "pairwise: discordance {:.4} over {} ids; better than random with confidence {:.4} ({} permutations, seed {seed})",
        observed,
        candidate.len(),
        result.confidence,
        permutations
    );
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "observed_discordance\tpermutations\tconfidence")?;
    writeln!(
        w,
        "{}\t{}\t{}",
        result.observed, result.permutations, result.confidence
    )?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_report(report: ReportCommand, config: &FileConfig) -> Result<()> {
    let section = config.report();
    let (io, kind_config) = match report {
        ReportCommand::PdDay(args) => {
            let term = args.term.or(section.term).unwrap_or(50);
            let window = parse_window(
                args.window.as_deref(),
                section.window.as_deref(),
                YearRange::new(2015, 2025)?,
            )?;
            let mut cfg = ReportConfig::new(term, window)?;
            cfg.top_n = args.io.top_n.or(section.top_n).unwrap_or(0);
            (args.io, ReportKind::PdDay(cfg))
        }
        ReportCommand::CommonsGap(args) => {
            let term = args.term.or(section.term).unwrap_or(50);
            let mut cfg = ReportConfig::new(term, YearRange::new(1800, 3000)?)?;
            cfg.as_of_year = args.as_of.or(section.as_of_year).unwrap_or(2014);
            cfg.top_n = args.io.top_n.or(section.top_n).unwrap_or(0);
            (args.io, ReportKind::CommonsGap(cfg))
        }
        ReportCommand::Overlooked(args) => {
            let mut cfg = ReportConfig::new(50, YearRange::new(1800, 3000)?)?;
            cfg.score_threshold = args
                .score_threshold
                .or(section.score_threshold)
                .unwrap_or(90.0);
            if let Some(tags) = &args.identifiers {
                cfg.missing_identifiers = tags
                    .split(',')
                    .map(|t| {
                        IdentifierTag::from_str(t)
                            .map_err(|e| anyhow::anyhow!("bad identifier tag: {e}"))
                    })
                    .collect::<Result<_>>()?;
            }
            cfg.top_n = args.io.top_n.or(section.top_n).unwrap_or(0);
            (args.io, ReportKind::Overlooked(cfg))
        }
    };

    let ranking = RankingTable::load_tsv(&io.ranking)?;
    let catalog = Catalog::load_json(&io.catalog)?;
    let list = match &kind_config {
        ReportKind::PdDay(cfg) => pd_day_report(&ranking, &catalog, cfg)?,
        ReportKind::CommonsGap(cfg) => commons_gap_report(&ranking, &catalog, cfg)?,
        ReportKind::Overlooked(cfg) => overlooked_report(&ranking, &catalog, cfg)?,
    };
    list.save_tsv(&io.out)?;
    println!(
        "report: {} rows ({} persons lacked a death year)",
        list.rows.len(),
        list.excluded_missing_death
    );
    println!("wrote {}", io.out.display());
    Ok(())
}

enum ReportKind {
    PdDay(ReportConfig),
    CommonsGap(ReportConfig),
    Overlooked(ReportConfig),
}
