//! `qcpd`: quality change-point detection over article revision histories.

mod corpus;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qcpd_core::cpd::{hybrid_report, Bandwidth, CostKind, HybridMode};
use qcpd_core::evaluation::{aggregate_report, evaluate_article, CoveringOp, EvalReport};
use qcpd_core::features::{
    build_series, change_window_means, correlation_matrix, AblationGroup, FEATURE_COUNT,
};
use qcpd_core::harness::{
    detect_corpus, run_ablation, split_train_test, synth_generate, tune_hyperparameters,
    CorpusFilter, Metric, RunOptions, SynthSpec, TuneGrid,
};
use qcpd_core::ingest::{
    extract_quality_labels, parse_mediawiki_xml, read_labels_jsonl, read_revisions_jsonl,
    write_labels_jsonl, write_revisions_jsonl,
};
use qcpd_core::model::MonthCalendar;
use qcpd_core::trajectory::{
    classify_trajectory, switch_histograms, transition_stats, QualityTrajectory, TrajectoryKind,
};
use qcpd_core::{Algorithm, ArticleSeries, DetectorConfig, QualityClass};

use corpus::{read_corpus, write_corpus, GroundTruthFile, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "qcpd",
    version,
    about = "Quality change-point detection toolkit"
)]
struct Cli {
    /// Seed for every stochastic step (splits, permutation tests, synthesis).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// First study month, as YYYY-MM.
    #[arg(long, global = true, default_value = "2006-07")]
    calendar_start: String,
    /// Number of study months.
    #[arg(long, global = true, default_value_t = 156)]
    months: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a MediaWiki export XML file into revision JSONL.
    Ingest {
        /// Export XML path.
        #[arg(long)]
        xml: PathBuf,
        /// Output revision JSONL path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract quality-label events from talk-page assessment banners.
    Labels {
        #[arg(long)]
        revisions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build per-article monthly feature CSVs plus manifest and gt.json.
    Features {
        #[arg(long)]
        revisions: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run one detector over a corpus directory.
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "pelt")]
        algo: AlgorithmArg,
        /// Feature subset: Gc, Ga, Gp, G1..G8, all, or a + union.
        #[arg(long, default_value = "all")]
        features: String,
        /// PELT penalty.
        #[arg(long, default_value_t = 1.0)]
        pen: f64,
        /// BinSeg number of breakpoints.
        #[arg(long, default_value_t = 1)]
        n_bkps: usize,
        /// Minimum segment length (defaults: 5 for ECP, 2 otherwise).
        #[arg(long)]
        min_size: Option<usize>,
        #[arg(long, default_value = "rbf")]
        cost: String,
        /// Fixed RBF bandwidth; omitted = median heuristic.
        #[arg(long)]
        gamma: Option<f64>,
        /// ECP permutations.
        #[arg(long, default_value_t = 199)]
        permutations: usize,
        /// ECP significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score prediction files against a ground-truth file.
    Evaluate {
        #[arg(long)]
        gt: PathBuf,
        /// Prediction JSON; repeat for HYBRID over exactly three files.
        #[arg(long = "pred", required = true)]
        preds: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        margin: usize,
        #[arg(long, default_value = "max")]
        covering_op: CoveringOpArg,
        /// Keep articles with at least this many ground-truth points.
        #[arg(long, default_value_t = 1)]
        min_changepoints: usize,
        /// Keep only articles whose latest class matches.
        #[arg(long)]
        latest_class: Option<QualityClassArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search one detector's hyperparameter on the training split.
    Tune {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "pelt")]
        algo: AlgorithmArg,
        #[arg(long, default_value = "all")]
        features: String,
        #[arg(long, default_value = "covering")]
        objective: MetricArg,
        /// Test fraction of the stratified split.
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// PELT penalty grid, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])]
        pen_vals: Vec<f64>,
        /// ECP min-size grid, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10, 15, 20])]
        min_sizes: Vec<usize>,
        /// BinSeg breakpoint-count grid, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5, 6, 7, 8])]
        n_bkps_grid: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        margin: usize,
        #[arg(long, default_value_t = 1)]
        min_changepoints: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate all three detectors on feature subsets.
    Ablate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated group names (Gc, Ga, Gp, G1..G8, unions).
        #[arg(long, value_delimiter = ',', default_value = "Gc,Ga,Gp")]
        groups: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        pen: f64,
        #[arg(long, default_value_t = 1)]
        n_bkps: usize,
        #[arg(long, default_value_t = 5)]
        margin: usize,
        #[arg(long, default_value_t = 1)]
        min_changepoints: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize quality-label trajectories from label JSONL.
    Trajectory {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with known change points.
    Synth {
        #[arg(long, default_value_t = 50)]
        articles: usize,
        #[arg(long, default_value_t = FEATURE_COUNT)]
        dims: usize,
        #[arg(long, default_value_t = 3)]
        n_breaks: usize,
        /// Mean shift per dimension, in noise standard deviations.
        #[arg(long, default_value_t = 5.0)]
        shift: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        /// Minimum spacing between breaks and to the series ends.
        #[arg(long, default_value_t = 20)]
        min_spacing: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Average features position-wise around ground-truth change points.
    WindowMeans {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation matrix of the corpus-mean feature series, as CSV.
    Correlate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CoveringOpArg {
    Max,
    Min,
}

impl From<CoveringOpArg> for CoveringOp {
    fn from(op: CoveringOpArg) -> Self {
        match op {
            CoveringOpArg::Max => CoveringOp::Max,
            CoveringOpArg::Min => CoveringOp::Min,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum QualityClassArg {
    Ss,
    Bc,
    Aga,
    Fa,
}

impl From<QualityClassArg> for QualityClass {
    fn from(c: QualityClassArg) -> Self {
        match c {
            QualityClassArg::Ss => QualityClass::SS,
            QualityClassArg::Bc => QualityClass::BC,
            QualityClassArg::Aga => QualityClass::AGA,
            QualityClassArg::Fa => QualityClass::FA,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlgorithmArg {
    Binseg,
    Pelt,
    Ecp,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Binseg => Algorithm::BinSeg,
            AlgorithmArg::Pelt => Algorithm::Pelt,
            AlgorithmArg::Ecp => Algorithm::Ecp,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MetricArg {
    Covering,
    Precision,
    Recall,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Covering => Metric::Covering,
            MetricArg::Precision => Metric::Precision,
            MetricArg::Recall => Metric::Recall,
        }
    }
}

/// Run metadata echoed into every detection and evaluation output.
#[derive(Clone, Serialize, Deserialize)]
struct RunMeta {
    algorithm: String,
    features: String,
    pen_val: f64,
    n_bkps: usize,
    min_size: usize,
    cost: String,
    /// "auto" or the fixed value.
    bandwidth: String,
    /// Median-heuristic gamma actually used, per article (RBF auto only).
    gamma: BTreeMap<String, f64>,
    permutations: usize,
    significance: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct PredictionsFile {
    schema_version: u32,
    run: RunMeta,
    /// Calendar-space change months per article.
    predictions: BTreeMap<String, Vec<usize>>,
}

fn parse_calendar(cli: &Cli) -> Result<MonthCalendar> {
    let (y, m) = cli
        .calendar_start
        .split_once('-')
        .context("--calendar-start must be YYYY-MM")?;
    Ok(MonthCalendar::new(y.parse()?, m.parse()?, cli.months)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Ingest { xml, out } => cmd_ingest(xml, out),
        Command::Labels { revisions, out } => cmd_labels(revisions, out),
        Command::Features {
            revisions,
            labels,
            out_dir,
        } => cmd_features(&cli, revisions, labels, out_dir),
        Command::Detect { .. } => cmd_detect(&cli),
        Command::Evaluate { .. } => cmd_evaluate(&cli),
        Command::Tune { .. } => cmd_tune(&cli),
        Command::Ablate { .. } => cmd_ablate(&cli),
        Command::Trajectory { labels, out } => cmd_trajectory(labels, out),
        Command::Synth { .. } => cmd_synth(&cli),
        Command::WindowMeans { input, window, out } => cmd_window_means(input, *window, out),
        Command::Correlate { input, out } => cmd_correlate(input, out),
    }
}

fn cmd_ingest(xml: &Path, out: &Path) -> Result<()> {
    let reader =
        BufReader::new(File::open(xml).with_context(|| format!("opening {}", xml.display()))?);
    let pages = parse_mediawiki_xml(reader)?;
    let mut w = BufWriter::new(File::create(out)?);
    for page in &pages {
        write_revisions_jsonl(&mut w, page)?;
    }
    w.flush()?;
    eprintln!("ingested {} page histories", pages.len());
    Ok(())
}

fn cmd_labels(revisions: &Path, out: &Path) -> Result<()> {
    let pages = read_revisions_jsonl(BufReader::new(File::open(revisions)?))?;
    let mut w = BufWriter::new(File::create(out)?);
    let mut total = 0usize;
    for page in &pages {
        let events = extract_quality_labels(&page.talk_revisions);
        total += events.len();
        write_labels_jsonl(&mut w, &page.article_id, &events)?;
    }
    w.flush()?;
    eprintln!(
        "extracted {total} label events from {} articles",
        pages.len()
    );
    Ok(())
}

fn cmd_features(cli: &Cli, revisions: &Path, labels: &Path, out_dir: &Path) -> Result<()> {
    let cal = parse_calendar(cli)?;
    let pages = read_revisions_jsonl(BufReader::new(File::open(revisions)?))?;
    let label_map = read_labels_jsonl(BufReader::new(File::open(labels)?))?;
    let mut corpus = Vec::new();
    let mut latest = BTreeMap::new();
    for page in &pages {
        let events = label_map.get(&page.article_id).cloned().unwrap_or_default();
        match build_series(page, &events, &cal) {
            Ok(series) => {
                if let Some(last) = events.last() {
                    latest.insert(page.article_id.clone(), last.merged_class);
                }
                corpus.push(series);
            }
            Err(e) => eprintln!("skipping {}: {e}", page.article_id),
        }
    }
    write_corpus(out_dir, &corpus, &latest)?;
    eprintln!(
        "wrote {} article series to {}",
        corpus.len(),
        out_dir.display()
    );
    Ok(())
}

fn detector_config(cli: &Cli) -> Result<(DetectorConfig, String)> {
    let Command::Detect {
        algo,
        features,
        pen,
        n_bkps,
        min_size,
        cost,
        gamma,
        permutations,
        alpha,
        ..
    } = &cli.command
    else {
        unreachable!()
    };
    let mut config = DetectorConfig::new((*algo).into());
    config.penalty = *pen;
    config.n_bkps = *n_bkps;
    if let Some(ms) = min_size {
        config.min_size = *ms;
    }
    config.cost = match cost.as_str() {
        "rbf" => CostKind::Rbf,
        "l2" => CostKind::L2,
        other => bail!("unknown cost {other:?} (rbf or l2)"),
    };
    config.bandwidth = match gamma {
        Some(g) => Bandwidth::Fixed(*g),
        None => Bandwidth::Auto,
    };
    config.permutations = *permutations;
    config.significance = *alpha;
    config.seed = cli.seed;
    Ok((config, features.clone()))
}

fn cmd_detect(cli: &Cli) -> Result<()> {
    let Command::Detect { input, out, .. } = &cli.command else {
        unreachable!()
    };
    let (config, features) = detector_config(cli)?;
    let group = AblationGroup::resolve(&features)?;
    let (corpus, _) = read_corpus(input)?;
    let predictions = detect_corpus(&corpus, &group.columns, &config)?;

    let mut gamma_used = BTreeMap::new();
    if config.cost == CostKind::Rbf && matches!(config.bandwidth, Bandwidth::Auto) {
        for series in &corpus {
            let rows = series.valid_rows(&group.columns);
            if rows.len() >= 2 {
                gamma_used.insert(
                    series.article_id.clone(),
                    qcpd_core::cpd::median_heuristic_gamma(&rows),
                );
            }
        }
    }
    let run = RunMeta {
        algorithm: format!("{:?}", config.algorithm).to_lowercase(),
        features: group.name,
        pen_val: config.penalty,
        n_bkps: config.n_bkps,
        min_size: config.min_size,
        cost: format!("{:?}", config.cost).to_lowercase(),
        bandwidth: match config.bandwidth {
            Bandwidth::Auto => "auto".to_string(),
            Bandwidth::Fixed(g) => g.to_string(),
        },
        gamma: gamma_used,
        permutations: config.permutations,
        significance: config.significance,
        seed: cli.seed,
    };
    write_json(
        out,
        &PredictionsFile {
            schema_version: SCHEMA_VERSION,
            run,
            predictions,
        },
    )?;
    eprintln!("wrote predictions for {} articles", corpus.len());
    Ok(())
}

#[derive(Serialize)]
struct EvaluateOutput {
    schema_version: u32,
    margin: usize,
    covering_op: String,
    runs: Vec<RunMeta>,
    reports: Vec<EvalReport>,
    hybrid: Option<HybridOutput>,
}

#[derive(Serialize)]
struct HybridOutput {
    aggregate_max: EvalReport,
    per_article_max: EvalReport,
}

fn cmd_evaluate(cli: &Cli) -> Result<()> {
    let Command::Evaluate {
        gt,
        preds,
        margin,
        covering_op,
        min_changepoints,
        latest_class,
        out,
    } = &cli.command
    else {
        unreachable!()
    };
    let gt_file: GroundTruthFile = serde_json::from_str(&fs::read_to_string(gt)?)?;
    if gt_file.schema_version != SCHEMA_VERSION {
        bail!("unsupported gt schema {}", gt_file.schema_version);
    }
    let op: CoveringOp = (*covering_op).into();
    let want_class: Option<QualityClass> = latest_class.map(Into::into);

    let mut runs = Vec::new();
    let mut reports = Vec::new();
    for pred_path in preds {
        let pred_file: PredictionsFile = serde_json::from_str(&fs::read_to_string(pred_path)?)?;
        if pred_file.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported predictions schema {}",
                pred_file.schema_version
            );
        }
        let mut rows = Vec::new();
        for (article, gt_points) in &gt_file.ground_truth {
            if gt_points.len() < *min_changepoints {
                continue;
            }
            if let Some(want) = want_class {
                if gt_file.latest_class.get(article) != Some(&want) {
                    continue;
                }
            }
            let empty = Vec::new();
            let pred_points = pred_file.predictions.get(article).unwrap_or(&empty);
            rows.push(evaluate_article(
                article,
                gt_points,
                pred_points,
                gt_file.n_months,
                *margin,
                op,
            ));
        }
        reports.push(aggregate_report(rows, *margin)?);
        runs.push(pred_file.run);
    }

    let hybrid = if reports.len() == 3 {
        let refs: Vec<&EvalReport> = reports.iter().collect();
        Some(HybridOutput {
            aggregate_max: hybrid_report(&refs, HybridMode::AggregateMax)?,
            per_article_max: hybrid_report(&refs, HybridMode::PerArticleMax)?,
        })
    } else {
        None
    };
    for (run, report) in runs.iter().zip(&reports) {
        eprintln!(
            "{}: covering {:.4} precision {:.4} recall {:.4} ({} articles)",
            run.algorithm,
            report.covering,
            report.precision,
            report.recall,
            report.per_article.len()
        );
    }
    write_json(
        out,
        &EvaluateOutput {
            schema_version: SCHEMA_VERSION,
            margin: *margin,
            covering_op: format!("{op:?}").to_lowercase(),
            runs,
            reports,
            hybrid,
        },
    )
}

#[derive(Serialize)]
struct TuneOutput {
    schema_version: u32,
    algorithm: String,
    objective: Metric,
    best: serde_json::Value,
    leaderboard: Vec<qcpd_core::harness::TuneEntry>,
    train: Vec<String>,
    test: Vec<String>,
    warnings: Vec<String>,
}

fn cmd_tune(cli: &Cli) -> Result<()> {
    let Command::Tune {
        input,
        algo,
        features,
        objective,
        test_fraction,
        pen_vals,
        min_sizes,
        n_bkps_grid,
        margin,
        min_changepoints,
        out,
    } = &cli.command
    else {
        unreachable!()
    };
    let (corpus, latest) = read_corpus(input)?;
    let (train_ids, test_ids, warnings) = if latest.is_empty() {
        (
            corpus
                .iter()
                .map(|s| s.article_id.clone())
                .collect::<Vec<_>>(),
            Vec::new(),
            vec!["no quality classes in manifest; tuning on the full corpus".to_string()],
        )
    } else {
        let keyed: Vec<(String, QualityClass)> = corpus
            .iter()
            .filter_map(|s| {
                latest
                    .get(&s.article_id)
                    .map(|&c| (s.article_id.clone(), c))
            })
            .collect();
        let split = split_train_test(&keyed, *test_fraction, cli.seed)?;
        (split.train, split.test, split.warnings)
    };
    let train: Vec<ArticleSeries> = corpus
        .iter()
        .filter(|s| train_ids.contains(&s.article_id))
        .cloned()
        .collect();

    let group = AblationGroup::resolve(features)?;
    let mut config = DetectorConfig::new((*algo).into());
    config.seed = cli.seed;
    let mut opts = RunOptions::new(config);
    opts.margin = *margin;
    opts.filter = CorpusFilter {
        min_changepoints: *min_changepoints,
        latest_class: None,
    };
    let grid = TuneGrid {
        pen_vals: pen_vals.clone(),
        min_sizes: min_sizes.clone(),
        n_bkps: n_bkps_grid.clone(),
        objective: (*objective).into(),
    };
    let (best, leaderboard) = tune_hyperparameters(&train, &group.columns, &latest, &opts, &grid)?;
    for entry in &leaderboard {
        eprintln!(
            "{} = {:>6}: {} {:.4}",
            entry.parameter, entry.value, features, entry.score
        );
    }
    write_json(
        out,
        &TuneOutput {
            schema_version: SCHEMA_VERSION,
            algorithm: format!("{:?}", Algorithm::from(*algo)).to_lowercase(),
            objective: (*objective).into(),
            best: serde_json::to_value(best)?,
            leaderboard,
            train: train_ids,
            test: test_ids,
            warnings,
        },
    )
}

#[derive(Serialize)]
struct AblateOutput {
    schema_version: u32,
    margin: usize,
    rows: Vec<qcpd_core::harness::AblationRow>,
}

fn cmd_ablate(cli: &Cli) -> Result<()> {
    let Command::Ablate {
        input,
        groups,
        pen,
        n_bkps,
        margin,
        min_changepoints,
        out,
    } = &cli.command
    else {
        unreachable!()
    };
    let (corpus, latest) = read_corpus(input)?;
    let configs: Vec<DetectorConfig> = [Algorithm::BinSeg, Algorithm::Ecp, Algorithm::Pelt]
        .into_iter()
        .map(|a| {
            let mut c = DetectorConfig::new(a);
            c.penalty = *pen;
            c.n_bkps = *n_bkps;
            c.seed = cli.seed;
            c
        })
        .collect();
    let mut opts = RunOptions::new(configs[0]);
    opts.margin = *margin;
    opts.filter = CorpusFilter {
        min_changepoints: *min_changepoints,
        latest_class: None,
    };
    let rows = run_ablation(&corpus, groups, &latest, &configs, &opts)?;
    for row in &rows {
        eprintln!(
            "{:>8} {:?}: covering {:.4} precision {:.4} recall {:.4}",
            row.group, row.algorithm, row.covering, row.precision, row.recall
        );
    }
    write_json(
        out,
        &AblateOutput {
            schema_version: SCHEMA_VERSION,
            margin: *margin,
            rows,
        },
    )
}

#[derive(Serialize)]
struct TrajectoryOutput {
    schema_version: u32,
    articles: usize,
    kind_counts: BTreeMap<String, usize>,
    transitions: Vec<qcpd_core::trajectory::TransitionStat>,
    switches: qcpd_core::trajectory::SwitchHistograms,
}

fn cmd_trajectory(labels: &Path, out: &Path) -> Result<()> {
    let label_map = read_labels_jsonl(BufReader::new(File::open(labels)?))?;
    let mut trajectories = Vec::new();
    for (article_id, events) in &label_map {
        if events.is_empty() {
            continue;
        }
        trajectories.push(QualityTrajectory {
            article_id: article_id.clone(),
            labeled: events
                .iter()
                .map(|e| (e.timestamp, e.merged_class))
                .collect(),
            creation_time: events[0].timestamp,
        });
    }
    let mut kind_counts: BTreeMap<String, usize> = BTreeMap::new();
    for kind in [
        TrajectoryKind::OnlyPromotion,
        TrajectoryKind::OnlyDemotion,
        TrajectoryKind::Both,
        TrajectoryKind::NoChange,
    ] {
        kind_counts.insert(format!("{kind:?}"), 0);
    }
    for t in &trajectories {
        *kind_counts
            .entry(format!("{:?}", classify_trajectory(t)?))
            .or_default() += 1;
    }
    write_json(
        out,
        &TrajectoryOutput {
            schema_version: SCHEMA_VERSION,
            articles: trajectories.len(),
            kind_counts,
            transitions: transition_stats(&trajectories),
            switches: switch_histograms(&trajectories),
        },
    )
}

fn cmd_synth(cli: &Cli) -> Result<()> {
    let Command::Synth {
        articles,
        dims,
        n_breaks,
        shift,
        noise,
        min_spacing,
        out_dir,
    } = &cli.command
    else {
        unreachable!()
    };
    let cal = parse_calendar(cli)?;
    let n = cal.n_months;
    if (*n_breaks + 1) * *min_spacing > n {
        bail!("{n} months cannot fit {n_breaks} breaks {min_spacing} apart");
    }
    let mut corpus = Vec::new();
    for i in 0..*articles {
        let mut rng =
            ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(i as u64).wrapping_mul(2654435761));
        let mut breaks = Vec::new();
        let mut lo = 1 + *min_spacing;
        for k in 0..*n_breaks {
            let remaining = (*n_breaks - 1 - k) * *min_spacing;
            let hi = n + 1 - *min_spacing - remaining;
            breaks.push(rng.gen_range(lo..=hi));
            lo = breaks[k] + *min_spacing;
        }
        let mut spec = SynthSpec::with_random_shifts(
            format!("synth{i:04}"),
            n,
            *dims,
            breaks,
            *shift,
            *noise,
            rng.gen(),
        );
        spec.min_spacing = *min_spacing;
        let mut series = synth_generate(&spec)?;
        series.calendar = cal;
        corpus.push(series);
    }
    write_corpus(out_dir, &corpus, &BTreeMap::new())?;
    eprintln!(
        "wrote {} synthetic articles to {}",
        articles,
        out_dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct WindowMeansOutput {
    schema_version: u32,
    window: usize,
    change_index: usize,
    n_articles: usize,
    skipped: Vec<String>,
    /// One row per feature, `window` columns each.
    means: Vec<Vec<f64>>,
}

fn cmd_window_means(input: &Path, window: usize, out: &Path) -> Result<()> {
    let (corpus, _) = read_corpus(input)?;
    let w = change_window_means(&corpus, window)?;
    write_json(
        out,
        &WindowMeansOutput {
            schema_version: SCHEMA_VERSION,
            window: w.window,
            change_index: w.change_index,
            n_articles: w.n_articles,
            skipped: w.skipped,
            means: w.means,
        },
    )
}

fn cmd_correlate(input: &Path, out: &Path) -> Result<()> {
    let (corpus, _) = read_corpus(input)?;
    let matrix = correlation_matrix(&corpus)?;
    let mut w = csv::Writer::from_path(out)?;
    let mut header = vec![String::new()];
    header.extend((1..=FEATURE_COUNT).map(|f| format!("F{f}")));
    w.write_record(&header)?;
    for (i, row) in matrix.iter().enumerate() {
        let mut record = vec![format!("F{}", i + 1)];
        record.extend(row.iter().map(|v| format!("{v:.6}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
