//! `vulnrisk`: command-line front end for the risk assessment pipeline.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use vulnrisk::cvss::Metric;
use vulnrisk::evaluation::masking::{self, masking_experiment};
use vulnrisk::imputer::baseline::{examples_from_records, train_baseline, BaselineConfig, BaselineModel};
use vulnrisk::imputer::{ExternalModel, ImputeError, Imputer, PerfectOracle};
use vulnrisk::nvd::{ExportFilter, FeedFormat, ReplacePolicy, StoreError};
use vulnrisk::pipeline::{assess_scan, assessable_groups, impute_records};
use vulnrisk::scan::{parse_csv, parse_trivy_json, ScanReport};
use vulnrisk::taxonomy::Tagger;
use vulnrisk::text::StopWords;
use vulnrisk::{risk, CveRecord, NvdStore};

use config::{ModelChoice, Overrides, PipelineConfig};
use manifest::Run;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: io::Error },
    Lib(vulnrisk::Error),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Lib(e) => e.exit_code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

macro_rules! lib_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(e.into())
            }
        }
    )*};
}

lib_errors!(
    vulnrisk::Error,
    vulnrisk::cvss::CvssError,
    StoreError,
    vulnrisk::scan::ScanError,
    ImputeError,
    vulnrisk::risk::RiskError,
    vulnrisk::evaluation::EvalError,
    vulnrisk::taxonomy::TaxonomyError
);

#[derive(Parser)]
#[command(name = "vulnrisk", version, about = "CVSS v2 risk assessment for containerized microservices")]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Local NVD store directory.
    #[arg(long, global = true, env = "VULNRISK_STORE")]
    store: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Upper bound on concurrent imputation workers.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FeedFormatArg {
    Api,
    Legacy,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScanFormat {
    Trivy,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FilterArg {
    All,
    Complete,
    Incomplete,
}

#[derive(Debug, clap::Args, Serialize)]
struct ModelArgs {
    /// Imputation model; defaults to the config's `model`.
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    /// Model server, e.g. tcp://127.0.0.1:7000 or stdio:<command>.
    #[arg(long)]
    endpoint: Option<String>,
    /// Saved baseline model.
    #[arg(long)]
    model_path: Option<PathBuf>,
}

#[derive(Debug, clap::Args, Serialize)]
struct ScanArgs {
    /// Trivy JSON report or `component,cve_id` CSV.
    #[arg(long)]
    scan: PathBuf,
    #[arg(long, value_enum)]
    scan_format: Option<ScanFormat>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Load NVD feed files into the store.
    IngestNvd {
        #[arg(required = true)]
        feeds: Vec<PathBuf>,
        /// Feed layout; detected from the content when omitted.
        #[arg(long, value_enum)]
        format: Option<FeedFormatArg>,
        /// Fail when a feed changes a record already in the store.
        #[arg(long)]
        reject_conflicts: bool,
    },
    /// Parse a scanner report and write its normalized findings.
    ImportScan {
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Option<ScanFormat>,
    },
    /// Train the built-in classifier on the store's complete records.
    TrainBaseline {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_tokens: Option<usize>,
        #[arg(long)]
        max_epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        patience: Option<usize>,
        #[arg(long)]
        model_path: Option<PathBuf>,
    },
    /// Predict missing metrics for incomplete store records.
    Impute {
        /// Restrict to the CVEs of this scan report.
        #[arg(long)]
        scan: Option<PathBuf>,
        #[arg(long, value_enum)]
        scan_format: Option<ScanFormat>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Score every CVE of a scan and aggregate per component.
    Assess {
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Hide a fraction of known vectors, impute them, and report error and bias.
    Evaluate {
        #[command(flatten)]
        scan: ScanArgs,
        /// Fraction of each component's CVEs to mask.
        #[arg(long)]
        mask: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Metric completeness of the store.
    Stats,
    /// Write the store as CSV, with `NF` for missing metrics.
    Export {
        #[arg(long, value_enum, default_value = "all")]
        filter: FilterArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::IngestNvd { .. } => "ingest-nvd",
            Command::ImportScan { .. } => "import-scan",
            Command::TrainBaseline { .. } => "train-baseline",
            Command::Impute { .. } => "impute",
            Command::Assess { .. } => "assess",
            Command::Evaluate { .. } => "evaluate",
            Command::Stats => "stats",
            Command::Export { .. } => "export",
        }
    }

    fn overrides(&self, cli: &Cli) -> Overrides {
        let mut o = Overrides {
            store_path: cli.store.clone(),
            output_dir: cli.output_dir.clone(),
            workers: cli.workers,
            ..Overrides::default()
        };
        let apply_model = |o: &mut Overrides, m: &ModelArgs| {
            o.model = m.model;
            o.endpoint = m.endpoint.clone();
            o.model_path = m.model_path.clone();
        };
        match self {
            Command::TrainBaseline { seed, max_tokens, model_path, .. } => {
                o.split_seed = *seed;
                o.max_tokens = *max_tokens;
                o.model_path = model_path.clone();
            }
            Command::Impute { model, .. } | Command::Assess { model, .. } => apply_model(&mut o, model),
            Command::Evaluate { mask, seed, model, .. } => {
                o.mask_fraction = *mask;
                o.split_seed = *seed;
                apply_model(&mut o, model);
            }
            _ => {}
        }
        o
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = PipelineConfig::resolve(cli.config.as_deref(), cli.command.overrides(cli))?;
    let arguments = serde_json::to_value(&cli.command).expect("json");
    let mut run = Run::start(&config, cli.command.name(), arguments)?;
    let stop_words = config.stop_words()?;
    if let Some(p) = &config.stop_word_list_path {
        run.input_file(p)?;
    }
    match &cli.command {
        Command::IngestNvd { feeds, format, reject_conflicts } => ingest(&mut run, feeds, *format, *reject_conflicts)?,
        Command::ImportScan { report, format } => import_scan(&mut run, report, *format)?,
        Command::TrainBaseline { max_epochs, learning_rate, patience, .. } => {
            train(&mut run, &stop_words, *max_epochs, *learning_rate, *patience)?
        }
        Command::Impute { scan, scan_format, .. } => impute(&mut run, &stop_words, scan.as_deref(), *scan_format)?,
        Command::Assess { scan, .. } => assess(&mut run, &stop_words, scan)?,
        Command::Evaluate { scan, .. } => evaluate(&mut run, &stop_words, scan)?,
        Command::Stats => stats(&mut run)?,
        Command::Export { filter } => export(&mut run, *filter)?,
    }
    run.finish(stop_words.version().to_string())?;
    Ok(())
}

/// Opens the store read-only; unlike the library, a missing directory is an error.
fn open_store(run: &mut Run) -> Result<NvdStore, CliError> {
    let path = &run.config.store_path;
    if !path.is_dir() {
        let e = io::Error::new(io::ErrorKind::NotFound, format!("no NVD store at {}; run ingest-nvd first", path.display()));
        return Err(StoreError::Io(e).into());
    }
    let store = NvdStore::open(path)?;
    run.input_bytes(format!("store:{}", path.display()), &store_csv(&store)?);
    Ok(store)
}

fn store_csv(store: &NvdStore) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    store.export_csv(&mut buf, ExportFilter::All)?;
    Ok(buf)
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("json");
    v.push(b'\n');
    v
}

fn load_scan(run: &mut Run, path: &Path, format: Option<ScanFormat>) -> Result<ScanReport, CliError> {
    let format = format.unwrap_or_else(|| {
        let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if csv { ScanFormat::Csv } else { ScanFormat::Trivy }
    });
    let report = match format {
        ScanFormat::Csv => parse_csv(path)?,
        ScanFormat::Trivy => parse_trivy_json(path)?,
    };
    for e in &report.row_errors {
        eprintln!("warning: {} line {}: {}", path.display(), e.line, e.message);
    }
    run.input_file(path)?;
    Ok(report)
}

fn build_imputer(run: &mut Run, stop_words: &StopWords, store: &NvdStore) -> Result<Option<Box<dyn Imputer>>, CliError> {
    let config = run.config;
    Ok(match config.model {
        ModelChoice::None => None,
        ModelChoice::Baseline => {
            let model = BaselineModel::load(&config.model_path)?;
            run.input_file(&config.model_path)?;
            Some(Box::new(model))
        }
        ModelChoice::External => {
            let endpoint = config
                .endpoint
                .as_deref()
                .ok_or_else(|| CliError::Usage("the external model needs --endpoint or `endpoint` in the config".into()))?
                .parse()
                .map_err(CliError::Usage)?;
            let model = ExternalModel::new(endpoint, config.timeout())
                .with_preprocessing(config.max_tokens, stop_words.clone());
            Some(Box::new(model))
        }
        ModelChoice::PerfectOracle => {
            let truth = store.records().map(|r| (r.cve_id().clone(), *r.vector()));
            Some(Box::new(PerfectOracle::new(truth)))
        }
    })
}

fn ingest(run: &mut Run, feeds: &[PathBuf], format: Option<FeedFormatArg>, reject: bool) -> Result<(), CliError> {
    let format = format.map(|f| match f {
        FeedFormatArg::Api => FeedFormat::NvdApi2,
        FeedFormatArg::Legacy => FeedFormat::LegacyFeed,
    });
    let policy = if reject { ReplacePolicy::Reject } else { ReplacePolicy::Replace };
    for feed in feeds {
        run.input_file(feed)?;
    }
    let mut store = NvdStore::open_writable(&run.config.store_path)?;
    let report = store.ingest_feeds(feeds, format, policy)?;
    store.commit()?;
    let stats = store.stats();
    for r in report.rejected.iter().take(20) {
        eprintln!("warning: rejected {}: {}", r.cve_id.as_deref().unwrap_or("<no id>"), r.reason);
    }
    if report.rejected.len() > 20 {
        eprintln!("warning: {} more records rejected", report.rejected.len() - 20);
    }
    println!(
        "ingested {} records ({} replaced, {} unchanged, {} rejected); store holds {}",
        report.ingested,
        report.replaced,
        report.unchanged,
        report.rejected.len(),
        stats.total
    );
    run.write("ingest-report.json", &to_json(&json!({"report": report, "stats": stats})))?;
    let digest = store_csv(&store)?;
    run.input_bytes(format!("store-after:{}", run.config.store_path.display()), &digest);
    Ok(())
}

fn import_scan(run: &mut Run, path: &Path, format: Option<ScanFormat>) -> Result<(), CliError> {
    let report = load_scan(run, path, format)?;
    let mut csv = String::from("component,cve_id,package,severity_hint\n");
    for f in &report.findings {
        let field = |s: &Option<String>| s.as_deref().map(csv_field).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&f.component),
            f.cve_id,
            field(&f.package),
            field(&f.severity_hint)
        ));
    }
    run.write("findings.csv", csv.as_bytes())?;
    let components: Vec<_> = report
        .components()
        .into_iter()
        .map(|(c, ids)| json!({"component": c, "n_cves": ids.len()}))
        .collect();
    let summary = json!({
        "source": report.source,
        "scanned_at": report.scanned_at,
        "n_findings": report.len(),
        "components": components,
        "skipped_non_cve": report.skipped_non_cve,
        "row_errors": report.row_errors,
    });
    run.write("scan-summary.json", &to_json(&summary))?;
    println!(
        "{} findings across {} components ({} non-CVE advisories skipped, {} bad rows)",
        report.len(),
        components.len(),
        report.skipped_non_cve,
        report.row_errors.len()
    );
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn train(
    run: &mut Run,
    stop_words: &StopWords,
    max_epochs: Option<usize>,
    learning_rate: Option<f64>,
    patience: Option<usize>,
) -> Result<(), CliError> {
    let store = open_store(run)?;
    let config = run.config;
    let (corpus, empty) = examples_from_records(store.records(), config.max_tokens, stop_words)?;
    if corpus.len() < 1000 {
        eprintln!("warning: only {} labelled records; held-out metrics will be noisy", corpus.len());
    }
    let defaults = BaselineConfig::default();
    let baseline = BaselineConfig {
        max_tokens: config.max_tokens,
        seed: config.split_seed,
        max_epochs: max_epochs.unwrap_or(defaults.max_epochs),
        learning_rate: learning_rate.unwrap_or(defaults.learning_rate),
        patience: patience.unwrap_or(defaults.patience),
        ..defaults
    };
    let outcome = train_baseline(&corpus, stop_words, &baseline)?;
    if let Some(dir) = config.model_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    outcome.model.save(&config.model_path)?;
    run.output_file(&config.model_path)?;

    println!("trained on {} records ({} skipped: no content tokens)", corpus.len(), empty);
    println!("{:<4} {:<10} {:>6} {:>9} {:>9}", "task", "status", "epochs", "accuracy", "majority");
    for (curve, (_, majority)) in outcome.curves.iter().zip(&outcome.majority_accuracy) {
        let accuracy = outcome.test_report.as_ref().and_then(|r| r.get(curve.task)).map(|m| m.accuracy);
        println!(
            "{:<4} {:<10} {:>6} {:>9} {:>9.3}",
            curve.task.key(),
            format!("{:?}", curve.status).to_lowercase(),
            curve.epochs.len(),
            accuracy.map_or("-".into(), |a| format!("{a:.3}")),
            majority
        );
    }
    let report = json!({
        "n_examples": corpus.len(),
        "n_empty_descriptions": empty,
        "config": baseline,
        "split": {
            "train": outcome.split.train.len(),
            "validation": outcome.split.validation.len(),
            "test": outcome.split.test.len(),
        },
        "curves": outcome.curves,
        "test_report": outcome.test_report,
        "majority_accuracy": outcome.majority_accuracy.iter().map(|(m, a)| (m.key(), *a)).collect::<BTreeMap<_, _>>(),
    });
    run.write("training-report.json", &to_json(&report))?;
    Ok(())
}

fn impute(run: &mut Run, stop_words: &StopWords, scan: Option<&Path>, format: Option<ScanFormat>) -> Result<(), CliError> {
    let store = open_store(run)?;
    let targets: Vec<&CveRecord> = match scan {
        Some(path) => {
            let report = load_scan(run, path, format)?;
            let mut ids: Vec<_> = report.findings.iter().map(|f| f.cve_id.clone()).collect();
            ids.sort();
            ids.dedup();
            ids.iter().filter_map(|id| store.lookup(id)).filter(|r| !r.vector().is_complete()).collect()
        }
        None => store.records().filter(|r| !r.vector().is_complete()).collect(),
    };
    let imputer = build_imputer(run, stop_words, &store)?
        .ok_or_else(|| CliError::Usage("impute needs a model other than `none`".into()))?;
    let results = impute_records(&targets, imputer.as_ref(), run.config.workers);

    let mut csv = String::from("cve_id");
    for m in Metric::ALL {
        csv.push_str(&format!(",{}", m.key()));
    }
    for m in Metric::ALL {
        csv.push_str(&format!(",{}_confidence", m.key()));
    }
    csv.push_str(",low_confidence,source\n");
    let mut failures = String::from("cve_id,error\n");
    let (mut ok, mut failed) = (0, 0);
    for (record, result) in targets.iter().zip(&results) {
        match result {
            Ok(p) => {
                csv.push_str(record.cve_id().as_str());
                for m in Metric::ALL {
                    csv.push_str(&format!(",{}", p.get(m).label.code()));
                }
                for m in Metric::ALL {
                    csv.push_str(&format!(",{}", p.get(m).confidence));
                }
                let source = serde_json::to_value(p.source()).expect("json");
                csv.push_str(&format!(",{},{}\n", p.low_confidence(), source.as_str().unwrap_or_default()));
                ok += 1;
            }
            Err(e) => {
                failures.push_str(&format!("{},{}\n", record.cve_id(), csv_field(&e.to_string())));
                failed += 1;
            }
        }
    }
    run.write("predictions.csv", csv.as_bytes())?;
    run.write("prediction-failures.csv", failures.as_bytes())?;
    println!("predicted {ok} of {} incomplete records ({failed} failed)", targets.len());
    Ok(())
}

fn assess(run: &mut Run, stop_words: &StopWords, scan: &ScanArgs) -> Result<(), CliError> {
    let store = open_store(run)?;
    let report = load_scan(run, &scan.scan, scan.scan_format)?;
    let imputer = build_imputer(run, stop_words, &store)?;
    let assessment = assess_scan(&report, &store, imputer.as_deref(), run.config.workers)?;

    let mut components = Vec::new();
    risk::write_components_csv(&mut components, &assessment.components)?;
    run.write("components.csv", &components)?;
    let mut detail = Vec::new();
    risk::write_detail_csv(&mut detail, &assessment.components)?;
    run.write("cves.csv", &detail)?;

    let tagger = Tagger::builtin();
    let mut tags: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in &assessment.components {
        for cve in &c.cves {
            let record = store.lookup(&cve.cve_id).expect("assessed CVEs come from the store");
            let nodes: Vec<String> = tagger.tag(record.description()).into_iter().map(|n| n.id.clone()).collect();
            if !nodes.is_empty() {
                tags.insert(cve.cve_id.to_string(), nodes);
            }
        }
    }
    run.write("assessment.json", &to_json(&json!({"assessment": assessment, "taxonomy_tags": tags})))?;

    println!("{:<28} {:>5} {:>8} {:>9} {:>8}", "component", "cves", "imputed", "mean_base", "max_base");
    for c in &assessment.components {
        println!("{:<28} {:>5} {:>8} {:>9.2} {:>8.1}", c.component, c.n_cves, c.n_imputed, c.mean_base, c.max_base);
    }
    if !assessment.not_found.is_empty() {
        eprintln!("warning: {} scanned CVEs are not in the store", assessment.not_found.len());
    }
    if !assessment.imputation_failures.is_empty() {
        eprintln!("warning: {} CVEs could not be imputed", assessment.imputation_failures.len());
    }
    Ok(())
}

fn evaluate(run: &mut Run, stop_words: &StopWords, scan: &ScanArgs) -> Result<(), CliError> {
    let store = open_store(run)?;
    let report = load_scan(run, &scan.scan, scan.scan_format)?;
    let imputer = build_imputer(run, stop_words, &store)?
        .ok_or_else(|| CliError::Usage("evaluate needs a model other than `none`".into()))?;
    let groups = assessable_groups(&report, &store);
    let (fraction, seed) = (run.config.mask_fraction, run.config.split_seed);
    let outcome = masking_experiment(&groups, fraction, seed, imputer.as_ref())?;

    let mut error = Vec::new();
    masking::write_error_csv(&mut error, &outcome.rows)?;
    run.write("error.csv", &error)?;
    let mut bias = Vec::new();
    masking::write_bias_csv(&mut bias, &outcome.rows)?;
    run.write("bias.csv", &bias)?;
    let mut detail = Vec::new();
    masking::write_json(&mut detail, &outcome)?;
    detail.push(b'\n');
    run.write("evaluation.json", &detail)?;

    let cell = |v: Option<f64>, digits: usize| v.map_or("-".to_string(), |x| format!("{x:.digits$}"));
    println!("{:<28} {:>6} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8}", "component", "masked", "imp_err%", "exp_err%", "base_err%", "imp_bias", "exp_bias", "base_bias");
    for r in &outcome.rows {
        println!(
            "{:<28} {:>6} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8}",
            r.component,
            r.n_masked,
            cell(r.impact_error_pct, 3),
            cell(r.exploitability_error_pct, 3),
            cell(r.base_error_pct, 3),
            cell(r.impact_bias, 3),
            cell(r.exploitability_bias, 3),
            cell(r.base_bias, 3)
        );
    }
    for s in &outcome.skipped {
        eprintln!("warning: skipped {} ({})", s.component, s.reason);
    }
    if outcome.zero_true_excluded.total() > 0 {
        eprintln!("note: {} zero-valued true scores left out of error means", outcome.zero_true_excluded.total());
    }
    if !outcome.imputation_failures.is_empty() {
        eprintln!("warning: {} masked CVEs could not be imputed", outcome.imputation_failures.len());
    }
    Ok(())
}

/// Two decimals, truncated rather than rounded, as completeness is usually quoted.
fn truncated_percent(p: f64) -> String {
    format!("{:.2}", (p * 100.0).floor() / 100.0)
}

fn stats(run: &mut Run) -> Result<(), CliError> {
    let store = open_store(run)?;
    let s = store.stats();
    println!("records      {}", s.total);
    println!("available    {}", s.available);
    println!("unavailable  {} ({}%)", s.unavailable, truncated_percent(s.percent_unavailable));
    run.write("stats.json", &to_json(&s))?;
    Ok(())
}

fn export(run: &mut Run, filter: FilterArg) -> Result<(), CliError> {
    let store = open_store(run)?;
    let filter = match filter {
        FilterArg::All => ExportFilter::All,
        FilterArg::Complete => ExportFilter::CompleteOnly,
        FilterArg::Incomplete => ExportFilter::IncompleteOnly,
    };
    let mut buf = Vec::new();
    let n = store.export_csv(&mut buf, filter)?;
    let path = run.write("nvd-export.csv", &buf)?;
    println!("wrote {n} records to {}", path.display());
    Ok(())
}
