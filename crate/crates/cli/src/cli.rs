//! Command-line surface: argument definitions, dispatch, and exit codes.
//!
//! Every subcommand is a thin wrapper over the library; the `run`
//! subcommand chains them through `pipeline`.

use std::fmt;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgAction, Parser, Subcommand};

use decaygraph_core::dataset::Dataset;
use decaygraph_core::error::DecayError;
use decaygraph_core::eval::{evaluate, render_compare, EvalReport};
use decaygraph_core::features::{label_edges, read_features_csv, write_features_csv, FeatureConfig};
use decaygraph_core::graph::{load_graph_csv, save_graph_csv, split_windows, RobotFilter, WindowConfig};
use decaygraph_core::infogain::{rank_features, write_ranking_json, Discretization};
use decaygraph_core::ingest::{parse_records_file, write_records_csv, IngestConfig};
use decaygraph_core::logit::{train_logit, LogitConfig};
use decaygraph_core::model::Model;
use decaygraph_core::stats::{
    spearman_matrix, summarize, write_cdf_files, write_matrix_csv, write_summary_json,
    DEFAULT_CDF_POINTS,
};
use decaygraph_core::synth::{self, SynthTruth};
use decaygraph_core::tree::{DecisionTree, TreeConfig};

use crate::config::{
    self, parse_call_type, parse_gain_mode, parse_injn_mode, parse_neighbor_mode,
    parse_persist_mode, parse_strategy, ConfigError, RawConfig, SynthSection,
};
use crate::pipeline::{run_pipeline, PipelineError};

/// Exit codes: 0 success, 1 usage, 2 data, 3 internal.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(DecayError),
    Stage(PipelineError),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => data_or_internal(e),
            CliError::Stage(e) => data_or_internal(&e.source),
        }
    }
}

fn data_or_internal(e: &DecayError) -> i32 {
    if e.is_data_error() {
        2
    } else {
        3
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
            CliError::Stage(e) => e.fmt(f),
        }
    }
}

impl From<DecayError> for CliError {
    fn from(e: DecayError) -> Self {
        CliError::Core(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Stage(e)
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(
    name = "decaygraph",
    version,
    about = "Predict which call-graph edges persist into the next window",
    disable_help_subcommand = true
)]
struct Cli {
    /// Cap worker threads for parallel sections.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, filter, and normalize raw call records.
    Ingest(IngestArgs),
    /// Build the two adjacent window graphs from records.
    Build(BuildArgs),
    /// Extract labeled per-edge features from a graph pair.
    Features(FeaturesArgs),
    /// Per-feature distribution statistics (median, mean, CDF).
    Summarize(SummarizeArgs),
    /// Pairwise Spearman rank correlations between features.
    Correlate(CorrelateArgs),
    /// Rank features by information gain about persistence.
    Rank(RankArgs),
    /// Train a decision tree or logistic regression.
    Train(TrainArgs),
    /// Score a trained model against labeled features.
    Evaluate(EvaluateArgs),
    /// Print evaluation reports side by side.
    Compare(CompareArgs),
    /// Explain a trained model or a synthetic corpus's planted rule.
    Describe(DescribeArgs),
    /// Coefficient and odds-ratio table of a logistic model.
    Odds(OddsArgs),
    /// Generate a synthetic call corpus with a known decay rule.
    Synth(SynthArgs),
    /// Run the whole pipeline from one config file.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct IngestArgs {
    /// Raw records CSV: caller,callee,timestamp,duration,call_type.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Horizon start (inclusive, epoch seconds).
    #[arg(long, value_name = "T")]
    start: i64,
    /// Horizon end (exclusive, epoch seconds).
    #[arg(long, value_name = "T")]
    end: i64,
    /// Call types to keep.
    #[arg(long, value_delimiter = ',', default_values_t = [String::from("voice")])]
    types: Vec<String>,
    /// Abort on the first malformed row instead of counting it.
    #[arg(long)]
    strict: bool,
    /// Skip calls shorter than this many seconds.
    #[arg(long, default_value_t = 0, value_name = "SECS")]
    min_duration: u64,
    /// Treat the first row as a header.
    #[arg(long)]
    has_header: bool,
    /// Where to write the accepted records.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Where to write the JSON ingest report (default: stdout).
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BuildArgs {
    /// Ingested records CSV (header expected unless --no-header).
    #[arg(long, value_name = "FILE")]
    records: PathBuf,
    /// Start of the first window (epoch seconds).
    #[arg(long, value_name = "T")]
    t0: i64,
    /// Length of the observation window τ₁ (seconds).
    #[arg(long, value_name = "SECS")]
    delta1: i64,
    /// Length of the outcome window τ₂ (seconds).
    #[arg(long, value_name = "SECS")]
    delta2: i64,
    /// Remove vertices with at least this many neighbors.
    #[arg(long, default_value_t = 50, value_name = "N")]
    max_neighbors: usize,
    /// Which neighbors the robot filter counts: out|total.
    #[arg(long, default_value = "out")]
    neighbor_mode: String,
    /// The records file has no header row.
    #[arg(long)]
    no_header: bool,
    /// Directory for tau1.csv, tau2.csv, and build_report.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct FeaturesArgs {
    /// τ₁ graph CSV (with its .meta.json sidecar).
    #[arg(long, value_name = "FILE")]
    tau1: PathBuf,
    /// τ₂ graph CSV (with its .meta.json sidecar).
    #[arg(long, value_name = "FILE")]
    tau2: PathBuf,
    /// Neighborhood cross-arc counting: arcs|calls.
    #[arg(long, default_value = "arcs")]
    injn_mode: String,
    /// What counts as persistence: directed|either.
    #[arg(long, default_value = "directed")]
    persist_mode: String,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SummarizeArgs {
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write one CDF point file per feature into this directory.
    #[arg(long, value_name = "DIR")]
    cdf_out: Option<PathBuf>,
    /// Downsample each CDF to at most this many points.
    #[arg(long, default_value_t = DEFAULT_CDF_POINTS, value_name = "N")]
    max_cdf_points: usize,
}

#[derive(clap::Args)]
struct CorrelateArgs {
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RankArgs {
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
    /// Conditional-entropy weighting: weighted|paper.
    #[arg(long, default_value = "weighted")]
    mode: String,
    /// Numeric discretization: best-binary-split|equal-frequency.
    #[arg(long, default_value = "best-binary-split")]
    strategy: String,
    /// Bucket count for equal-frequency discretization.
    #[arg(long, value_name = "N")]
    bins: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct TrainArgs {
    /// Which learner: tree|logit.
    #[arg(long)]
    model: String,
    /// Labeled training features CSV.
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Tree: smallest admissible leaf.
    #[arg(long, value_name = "N")]
    min_leaf: Option<usize>,
    /// Tree: maximum depth.
    #[arg(long, value_name = "N")]
    max_depth: Option<usize>,
    /// Tree: smallest gain worth splitting on.
    #[arg(long, value_name = "BITS")]
    min_gain: Option<f64>,
    /// Logit: iteration cap.
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    /// Logit: per-row gradient tolerance.
    #[arg(long, value_name = "EPS")]
    tolerance: Option<f64>,
    /// Logit: L2 penalty on coefficients.
    #[arg(long, value_name = "EPS")]
    ridge: Option<f64>,
    /// Logit: optimize on z-scored features.
    #[arg(long)]
    standardize: bool,
}

#[derive(clap::Args)]
struct EvaluateArgs {
    /// Trained model JSON (tree or logit).
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Labeled test features CSV.
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// Evaluation reports to print side by side.
    #[arg(required = true, value_name = "REPORT")]
    reports: Vec<PathBuf>,
    /// Also write the rendered table here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DescribeArgs {
    /// Trained model JSON to explain.
    #[arg(long, value_name = "FILE", conflicts_with = "truth")]
    model: Option<PathBuf>,
    /// Synthetic corpus directory or truth.json to explain.
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
    /// Print at most this many tree leaves.
    #[arg(long, value_name = "N")]
    max_leaves: Option<usize>,
}

#[derive(clap::Args)]
struct OddsArgs {
    /// Trained logistic model JSON.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
}

#[derive(clap::Args)]
struct SynthArgs {
    /// Built-in generator preset: paperlike|cij-steep (default paperlike).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// TOML overrides for the preset (same keys as a [synth] section).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for records.csv, truth.json, and truth_edges.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Pipeline config TOML.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the config file's seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the config file's out_dir.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Re-execute every stage even when the manifest says it is current.
    #[arg(long)]
    force: bool,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        decaygraph_core::limit_threads(n);
    }

    // `run` defers to the config file's verbosity unless -v is given.
    if !matches!(cli.command, Command::Run(_)) || cli.verbose > 0 {
        init_logs(cli.verbose, None);
    }

    match dispatch(cli.command, cli.verbose) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn init_logs(verbose: u8, config_level: Option<&str>) {
    let level = match verbose {
        0 => config_level.unwrap_or("warn"),
        1 => "info",
        _ => "debug",
    };
    let env = env_logger::Env::default().default_filter_or(level);
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn dispatch(command: Command, verbose: u8) -> CliResult {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Build(a) => cmd_build(a),
        Command::Features(a) => cmd_features(a),
        Command::Summarize(a) => cmd_summarize(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Describe(a) => cmd_describe(a),
        Command::Odds(a) => cmd_odds(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Run(a) => cmd_run(a, verbose),
    }
}

fn cmd_ingest(a: IngestArgs) -> CliResult {
    if a.start >= a.end {
        return Err(CliError::Usage(format!("--start {} must be before --end {}", a.start, a.end)));
    }
    let mut cfg = IngestConfig::new(a.start, a.end)?;
    cfg.keep_call_types = a
        .types
        .iter()
        .map(|t| parse_call_type(t))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.strict = a.strict;
    cfg.min_duration = a.min_duration;
    cfg.has_header = a.has_header;

    let (records, report) = parse_records_file(&a.input, &cfg)?;
    write_records_csv(&a.out, &records)?;

    let json = serde_json::to_string_pretty(&report).map_err(DecayError::from)?;
    match &a.report {
        Some(path) => {
            std::fs::write(path, json + "\n").map_err(DecayError::from)?;
            println!(
                "accepted {} of {} rows ({} skipped, {} malformed)",
                report.accepted,
                report.total,
                report.skipped(),
                report.malformed
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_build(a: BuildArgs) -> CliResult {
    let window = WindowConfig { t0: a.t0, delta1: a.delta1, delta2: a.delta2 };
    window.validate()?;
    let filter = RobotFilter {
        max_neighbors: a.max_neighbors,
        mode: parse_neighbor_mode(&a.neighbor_mode)?,
    };

    let mut icfg = IngestConfig::new(a.t0, a.t0 + a.delta1 + a.delta2)?;
    icfg.has_header = !a.no_header;
    let (records, _) = parse_records_file(&a.records, &icfg)?;
    let (g1, g2, removed) = split_windows(&records, &window, &filter)?;

    std::fs::create_dir_all(&a.out).map_err(DecayError::from)?;
    save_graph_csv(&g1, &a.out.join("tau1.csv"))?;
    save_graph_csv(&g2, &a.out.join("tau2.csv"))?;
    let report = serde_json::json!({
        "removed_vertices": removed,
        "tau1": { "vertices": g1.vertex_count(), "arcs": g1.arc_count() },
        "tau2": { "vertices": g2.vertex_count(), "arcs": g2.arc_count() },
    });
    std::fs::write(
        a.out.join("build_report.json"),
        serde_json::to_string_pretty(&report).map_err(DecayError::from)? + "\n",
    )
    .map_err(DecayError::from)?;
    println!(
        "tau1: {} vertices, {} arcs; tau2: {} vertices, {} arcs; removed {} robot vertices",
        g1.vertex_count(),
        g1.arc_count(),
        g2.vertex_count(),
        g2.arc_count(),
        report["removed_vertices"].as_array().map_or(0, Vec::len),
    );
    Ok(())
}

fn cmd_features(a: FeaturesArgs) -> CliResult {
    let cfg = FeatureConfig {
        injn_mode: parse_injn_mode(&a.injn_mode)?,
        persist_mode: parse_persist_mode(&a.persist_mode)?,
    };
    let g1 = load_graph_csv(&a.tau1)?;
    let g2 = load_graph_csv(&a.tau2)?;
    let edges = label_edges(&g1, &g2, &cfg);
    if edges.is_empty() {
        return Err(DecayError::EmptyInput("no arcs in the first window".into()).into());
    }
    write_features_csv(&edges, &a.out)?;
    let persisted = edges.iter().filter(|e| e.class == 1).count();
    println!("{} labeled edges ({} persisted, {} decayed)", edges.len(), persisted, edges.len() - persisted);
    Ok(())
}

fn cmd_summarize(a: SummarizeArgs) -> CliResult {
    let edges = read_features_csv(&a.features)?;
    let summary = summarize(&Dataset::from_edges(&edges), a.max_cdf_points)?;
    write_summary_json(&summary, &a.out)?;
    if let Some(dir) = &a.cdf_out {
        std::fs::create_dir_all(dir).map_err(DecayError::from)?;
        write_cdf_files(&summary, dir)?;
    }
    println!("{:<8}{:>12}{:>12}{:>12}", "feature", "median", "mean", "max");
    for f in &summary.features {
        println!("{:<8}{:>12.4}{:>12.4}{:>12.4}", f.name, f.median, f.mean, f.max);
    }
    Ok(())
}

fn cmd_correlate(a: CorrelateArgs) -> CliResult {
    let edges = read_features_csv(&a.features)?;
    let matrix = spearman_matrix(&Dataset::from_edges(&edges))?;
    write_matrix_csv(&matrix, &a.out)?;
    println!("wrote {}x{} Spearman matrix to {}", matrix.n(), matrix.n(), a.out.display());
    Ok(())
}

fn cmd_rank(a: RankArgs) -> CliResult {
    let mode = parse_gain_mode(&a.mode)?;
    let strategy = parse_strategy(&a.strategy, a.bins)?;
    let edges = read_features_csv(&a.features)?;
    let ranking = rank_features(&Dataset::from_edges(&edges), strategy, mode)?;
    write_ranking_json(&ranking, &a.out)?;

    println!("class entropy: {:.4} bits", ranking.class_entropy);
    println!("{:<6}{:<8}{:>10}  {}", "rank", "feature", "gain", "split");
    for (i, f) in ranking.features.iter().enumerate() {
        let split = match &f.discretization {
            Discretization::SingleBucket => "-".to_string(),
            Discretization::Threshold { threshold } => format!("<= {threshold}"),
            Discretization::Bins { edges } => format!("{} bins", edges.len() + 1),
        };
        println!("{:<6}{:<8}{:>10.4}  {}", i + 1, f.name, f.gain, split);
    }
    Ok(())
}

fn cmd_train(a: TrainArgs) -> CliResult {
    let edges = read_features_csv(&a.features)?;
    let ds = Dataset::from_edges(&edges);
    let model = match a.model.as_str() {
        "tree" => {
            if a.max_iter.is_some() || a.tolerance.is_some() || a.ridge.is_some() || a.standardize {
                return Err(CliError::Usage(
                    "--max-iter/--tolerance/--ridge/--standardize apply to --model logit".into(),
                ));
            }
            let defaults = TreeConfig::default();
            let cfg = TreeConfig {
                min_leaf_size: a.min_leaf.unwrap_or(defaults.min_leaf_size),
                max_depth: a.max_depth.or(defaults.max_depth),
                min_gain: a.min_gain.unwrap_or(defaults.min_gain),
            };
            let tree = DecisionTree::train(&ds, cfg)?;
            println!(
                "tree: {} leaves, depth {}, root split on {}",
                tree.root.n_leaves(),
                tree.root.depth(),
                tree.root_feature().unwrap_or("(none)")
            );
            Model::Tree(tree)
        }
        "logit" => {
            if a.min_leaf.is_some() || a.max_depth.is_some() || a.min_gain.is_some() {
                return Err(CliError::Usage(
                    "--min-leaf/--max-depth/--min-gain apply to --model tree".into(),
                ));
            }
            let defaults = LogitConfig::default();
            let cfg = LogitConfig {
                max_iter: a.max_iter.unwrap_or(defaults.max_iter),
                tolerance: a.tolerance.unwrap_or(defaults.tolerance),
                ridge: a.ridge.unwrap_or(defaults.ridge),
                standardize: a.standardize,
            };
            let logit = train_logit(&ds, cfg)?;
            println!(
                "logit: {} in {} iterations (final |grad| {:.3e})",
                if logit.meta.converged { "converged" } else { "stopped" },
                logit.meta.iterations,
                logit.meta.final_grad_norm
            );
            Model::Logit(logit)
        }
        other => {
            return Err(CliError::Usage(format!("unknown model {other:?} (expected tree|logit)")))
        }
    };
    model.save_json(&a.out)?;
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> CliResult {
    let model = Model::load_json(&a.model)?;
    let edges = read_features_csv(&a.features)?;
    let ds = Dataset::from_edges(&edges);
    let truth: Vec<u8> = edges.iter().map(|e| e.class).collect();
    let report = evaluate(model.name(), &model.predict(&ds), &truth)?;
    report.save_json(&a.out)?;
    print!("{}", render_compare(std::slice::from_ref(&report)));
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> CliResult {
    let reports = a
        .reports
        .iter()
        .map(|p| EvalReport::load_json(p))
        .collect::<Result<Vec<_>, _>>()?;
    let table = render_compare(&reports);
    if let Some(path) = &a.out {
        std::fs::write(path, &table).map_err(DecayError::from)?;
    }
    print!("{table}");
    Ok(())
}

fn cmd_describe(a: DescribeArgs) -> CliResult {
    match (&a.model, &a.truth) {
        (Some(path), None) => {
            match Model::load_json(path)? {
                Model::Tree(tree) => print!("{}", tree.describe(a.max_leaves)),
                Model::Logit(logit) => print!("{}", logit.render_odds_table()),
            }
            Ok(())
        }
        (None, Some(path)) => {
            let truth = synth::describe_truth(path)?;
            print!("{}", render_truth(&truth));
            Ok(())
        }
        _ => Err(CliError::Usage("describe needs exactly one of --model or --truth".into())),
    }
}

fn render_truth(t: &SynthTruth) -> String {
    let mut out = String::new();
    out.push_str(&format!("planted rule (seed {})\n", t.seed));
    out.push_str(&format!(
        "  window: t0={} delta1={} delta2={}\n",
        t.window.t0, t.window.delta1, t.window.delta2
    ));
    out.push_str(&format!("  intercept: {:.6}\n", t.intercept));
    out.push_str("  weights:\n");
    for (name, w) in &t.weights {
        out.push_str(&format!("    {name:<8} {w:+.4}\n"));
    }
    out.push_str(&format!("  expected persist share: {:.4}\n", t.expected_persist_share));
    out.push_str(&format!("  observed persist share: {:.4}\n", t.observed_persist_share));
    out.push_str(&format!("  bayes accuracy: {:.4}\n", t.bayes_accuracy));
    out.push_str(&format!("  tau1 arcs: {}\n", t.n_tau1_arcs));
    out
}

fn cmd_odds(a: OddsArgs) -> CliResult {
    match Model::load_json(&a.model)? {
        Model::Logit(logit) => {
            print!("{}", logit.render_odds_table());
            Ok(())
        }
        Model::Tree(_) => {
            Err(CliError::Usage("odds needs a logistic model; this file holds a tree".into()))
        }
    }
}

fn cmd_synth(a: SynthArgs) -> CliResult {
    let mut section = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<SynthSection>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => SynthSection::default(),
    };
    // flags override the file
    if let Some(p) = &a.preset {
        section.preset = Some(p.clone());
    }
    if a.seed.is_some() {
        section.seed = a.seed;
    }
    let cfg = section.resolve(section.seed.unwrap_or(0))?;

    let corpus = synth::generate(&cfg)?;
    std::fs::create_dir_all(&a.out).map_err(DecayError::from)?;
    synth::write_corpus(&corpus, &a.out)?;
    println!(
        "{} records, {} tau1 arcs, persist share {:.4}, bayes accuracy {:.4}",
        corpus.records.len(),
        corpus.truth.n_tau1_arcs,
        corpus.truth.observed_persist_share,
        corpus.truth.bayes_accuracy
    );
    println!("wrote {}", a.out.join(synth::RECORDS_FILE).display());
    Ok(())
}

fn cmd_run(a: RunArgs, verbose: u8) -> CliResult {
    let raw = RawConfig::load(&a.config)?;
    let cfg = raw.resolve(a.seed, a.out_dir.clone())?;
    init_logs(verbose, cfg.verbosity.as_deref());
    validate_inputs(&cfg)?;

    let summary = run_pipeline(&cfg, a.force)?;
    for outcome in &summary.outcomes {
        let status = if outcome.executed { "executed" } else { "skipped (up to date)" };
        println!("stage {:<10} {status}", outcome.name);
    }
    println!();
    print!("{}", summary.comparison);
    println!("manifest: {}", summary.manifest_path.display());
    Ok(())
}

fn validate_inputs(cfg: &config::PipelineConfig) -> CliResult {
    if let Some(records) = &cfg.records {
        if cfg.synth.is_none() && !records.exists() {
            // Missing input data, not a malformed invocation: fail before
            // any stage runs, but with the data-error exit code.
            return Err(CliError::Core(decaygraph_core::DecayError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("records file {} not found", records.display()),
            ))));
        }
    }
    Ok(())
}
