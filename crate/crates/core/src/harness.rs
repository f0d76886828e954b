//! Experiment harness: corpus splits, hyperparameter tuning, ablations over
//! feature groups, and the synthetic benchmark generator.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cpd::{detect, Algorithm, DetectorConfig};
use crate::error::{QcpdError, Result};
use crate::evaluation::{aggregate_report, evaluate_article, CoveringOp, EvalReport};
use crate::features::{AblationGroup, ArticleSeries};
use crate::model::{ChangePointSet, MonthCalendar, QualityClass};

/// Stratified train/test split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub test_fraction: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// Stratified shuffle split by latest merged quality class, deterministic
/// under `seed`. Classes with fewer than 2 articles go entirely to train.
pub fn split_train_test(
    corpus: &[(String, QualityClass)],
    test_fraction: f64,
    seed: u64,
) -> Result<CorpusSplit> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(QcpdError::invalid("test fraction must be in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = CorpusSplit {
        train: Vec::new(),
        test: Vec::new(),
        test_fraction,
        seed,
        warnings: Vec::new(),
    };
    if test_fraction == 0.0 {
        split.warnings.push("empty test set (ratio 100:0)".into());
    }
    let mut by_class: BTreeMap<u8, Vec<&str>> = BTreeMap::new();
    for (id, class) in corpus {
        by_class.entry(class.rank()).or_default().push(id);
    }
    for (rank, mut ids) in by_class {
        ids.sort_unstable();
        ids.shuffle(&mut rng);
        if ids.len() < 2 {
            split.warnings.push(format!(
                "class {} has {} article(s); all assigned to train",
                QualityClass::ALL[rank as usize],
                ids.len()
            ));
            split.train.extend(ids.iter().map(|s| s.to_string()));
            continue;
        }
        let n_test = (ids.len() as f64 * test_fraction).round() as usize;
        let (test, train) = ids.split_at(n_test.min(ids.len()));
        split.test.extend(test.iter().map(|s| s.to_string()));
        split.train.extend(train.iter().map(|s| s.to_string()));
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Corpus filters mirroring the experiment criteria.
#[derive(Clone, Copy, Debug, Default)]
pub struct CorpusFilter {
    /// Keep articles with at least this many ground-truth change points.
    pub min_changepoints: usize,
    /// Keep articles whose latest class equals this one.
    pub latest_class: Option<QualityClass>,
}

/// Options for a detection + evaluation run.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub config: DetectorConfig,
    pub margin: usize,
    pub covering_op: CoveringOp,
    pub filter: CorpusFilter,
}

impl RunOptions {
    pub fn new(config: DetectorConfig) -> Self {
        RunOptions {
            config,
            margin: 5,
            covering_op: CoveringOp::Max,
            filter: CorpusFilter {
                min_changepoints: 1,
                ..Default::default()
            },
        }
    }
}

fn series_passes(
    series: &ArticleSeries,
    latest: Option<QualityClass>,
    filter: &CorpusFilter,
) -> bool {
    series.ground_truth.len() >= filter.min_changepoints
        && match filter.latest_class {
            None => true,
            Some(want) => latest == Some(want),
        }
}

/// Runs one detector over every article's valid region, restricted to the
/// given feature columns. Predictions are returned in calendar month space.
pub fn detect_corpus(
    corpus: &[ArticleSeries],
    columns: &[usize],
    config: &DetectorConfig,
) -> Result<BTreeMap<String, Vec<usize>>> {
    let mut out = BTreeMap::new();
    for series in corpus {
        let rows = series.valid_rows(columns);
        let Some(first) = series.first_valid_month() else {
            out.insert(series.article_id.clone(), Vec::new());
            continue;
        };
        let preds = if rows.is_empty() {
            Vec::new()
        } else {
            detect(&rows, config)?
                .into_iter()
                .map(|q| q + first - 1)
                .collect()
        };
        out.insert(series.article_id.clone(), preds);
    }
    Ok(out)
}

/// Detects and evaluates a detector over the (filtered) corpus, working in
/// each article's valid region.
pub fn evaluate_detector(
    corpus: &[ArticleSeries],
    columns: &[usize],
    latest_classes: &BTreeMap<String, QualityClass>,
    opts: &RunOptions,
) -> Result<EvalReport> {
    let mut rows = Vec::new();
    for series in corpus {
        let latest = latest_classes.get(&series.article_id).copied();
        if !series_passes(series, latest, &opts.filter) {
            continue;
        }
        let data = series.valid_rows(columns);
        if data.is_empty() {
            continue;
        }
        let preds = detect(&data, &opts.config)?;
        let gt = series.ground_truth_in_valid_region();
        rows.push(evaluate_article(
            &series.article_id,
            &gt,
            &preds,
            data.len(),
            opts.margin,
            opts.covering_op,
        ));
    }
    aggregate_report(rows, opts.margin)
}

/// Objective metric for tuning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Covering,
    Precision,
    Recall,
}

impl Metric {
    pub fn of(self, report: &EvalReport) -> f64 {
        match self {
            Metric::Covering => report.covering,
            Metric::Precision => report.precision,
            Metric::Recall => report.recall,
        }
    }
}

/// Hyperparameter grid. Which axis applies depends on the algorithm:
/// `pen_vals` for PELT, `min_sizes` for ECP, `n_bkps` for BinSeg.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuneGrid {
    pub pen_vals: Vec<f64>,
    pub min_sizes: Vec<usize>,
    pub n_bkps: Vec<usize>,
    pub objective: Metric,
}

impl Default for TuneGrid {
    fn default() -> Self {
        TuneGrid {
            pen_vals: (1..=8).map(f64::from).collect(),
            min_sizes: vec![2, 5, 10, 15, 20],
            n_bkps: (1..=8).collect(),
            objective: Metric::Covering,
        }
    }
}

/// One leaderboard row of a tuning run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuneEntry {
    pub parameter: String,
    pub value: f64,
    pub score: f64,
}

/// Evaluates every grid point on the training corpus and returns the best
/// configuration (argmax objective, smaller parameter on ties) plus the
/// full leaderboard.
pub fn tune_hyperparameters(
    train: &[ArticleSeries],
    columns: &[usize],
    latest_classes: &BTreeMap<String, QualityClass>,
    base: &RunOptions,
    grid: &TuneGrid,
) -> Result<(DetectorConfig, Vec<TuneEntry>)> {
    let algorithm = base.config.algorithm;
    let axis: Vec<(String, f64)> = match algorithm {
        Algorithm::Pelt => grid
            .pen_vals
            .iter()
            .map(|&v| ("pen_val".to_string(), v))
            .collect(),
        Algorithm::Ecp => grid
            .min_sizes
            .iter()
            .map(|&v| ("min_size".to_string(), v as f64))
            .collect(),
        Algorithm::BinSeg => grid
            .n_bkps
            .iter()
            .map(|&v| ("n_bkps".to_string(), v as f64))
            .collect(),
    };
    if axis.is_empty() {
        return Err(QcpdError::invalid("empty tuning grid"));
    }
    let mut leaderboard = Vec::new();
    let mut best: Option<(f64, f64, DetectorConfig)> = None; // (score, param, config)
    for (name, value) in axis {
        let mut opts = *base;
        match algorithm {
            Algorithm::Pelt => opts.config.penalty = value,
            Algorithm::Ecp => opts.config.min_size = value as usize,
            Algorithm::BinSeg => opts.config.n_bkps = value as usize,
        }
        let report = evaluate_detector(train, columns, latest_classes, &opts)?;
        let score = grid.objective.of(&report);
        leaderboard.push(TuneEntry {
            parameter: name,
            value,
            score,
        });
        let better = match &best {
            None => true,
            Some((bs, bv, _)) => score > *bs || (score == *bs && value < *bv),
        };
        if better {
            best = Some((score, value, opts.config));
        }
    }
    let (_, _, config) = best.unwrap();
    Ok((config, leaderboard))
}

/// One row of an ablation table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AblationRow {
    pub group: String,
    pub algorithm: Algorithm,
    pub covering: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Runs every (group, detector) combination and returns Table-6-shaped rows.
pub fn run_ablation(
    corpus: &[ArticleSeries],
    groups: &[String],
    latest_classes: &BTreeMap<String, QualityClass>,
    configs: &[DetectorConfig],
    base: &RunOptions,
) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::new();
    for name in groups {
        let group = AblationGroup::resolve(name)?;
        for config in configs {
            let mut opts = *base;
            opts.config = *config;
            let report = evaluate_detector(corpus, &group.columns, latest_classes, &opts)?;
            rows.push(AblationRow {
                group: group.name.clone(),
                algorithm: config.algorithm,
                covering: report.covering,
                precision: report.precision,
                recall: report.recall,
            });
        }
    }
    Ok(rows)
}

/// Specification of one synthetic piecewise-stationary series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub article_id: String,
    pub n_months: usize,
    pub dims: usize,
    /// 1-based first-month-of-new-regime indices.
    pub breaks: Vec<usize>,
    /// One mean vector per regime (`breaks.len() + 1` of them).
    pub regime_means: Vec<Vec<f64>>,
    pub noise_scale: f64,
    pub seed: u64,
    /// Minimum spacing between breaks (and to the series ends).
    pub min_spacing: usize,
}

impl SynthSpec {
    /// Random regime means where every regime shifts each dimension by
    /// `shift_sigmas` noise standard deviations in a random direction.
    pub fn with_random_shifts(
        article_id: impl Into<String>,
        n_months: usize,
        dims: usize,
        breaks: Vec<usize>,
        shift_sigmas: f64,
        noise_scale: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
        let mut means = vec![vec![0.0; dims]];
        for _ in 0..breaks.len() {
            let prev = means.last().unwrap().clone();
            let next: Vec<f64> = prev
                .iter()
                .map(|&m| {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    m + sign * shift_sigmas * noise_scale
                })
                .collect();
            means.push(next);
        }
        SynthSpec {
            article_id: article_id.into(),
            n_months,
            dims,
            breaks,
            regime_means: means,
            noise_scale,
            seed,
            min_spacing: 5,
        }
    }
}

/// Generates a piecewise-constant-mean series with independent Gaussian
/// noise; the ground truth is the spec's break list. Fully determined by
/// the seed.
pub fn synth_generate(spec: &SynthSpec) -> Result<ArticleSeries> {
    if spec.n_months < 2 || spec.dims == 0 {
        return Err(QcpdError::invalid(
            "synthetic series needs n_months >= 2 and dims >= 1",
        ));
    }
    if spec.regime_means.len() != spec.breaks.len() + 1
        || spec.regime_means.iter().any(|m| m.len() != spec.dims)
    {
        return Err(QcpdError::invalid(
            "need one mean vector of width dims per regime",
        ));
    }
    let mut bounds = vec![1usize];
    bounds.extend_from_slice(&spec.breaks);
    bounds.push(spec.n_months + 1);
    for w in bounds.windows(2) {
        if w[1] <= w[0] || w[1] - w[0] < spec.min_spacing {
            return Err(QcpdError::invalid(format!(
                "breaks must be strictly increasing and >= {} apart",
                spec.min_spacing
            )));
        }
    }
    let calendar = MonthCalendar::new(2006, 7, spec.n_months)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut matrix = Vec::with_capacity(spec.n_months);
    for seg in 0..bounds.len() - 1 {
        let mean = &spec.regime_means[seg];
        for _ in bounds[seg]..bounds[seg + 1] {
            let row: Vec<f64> = mean
                .iter()
                .map(|&m| {
                    let eps: f64 = rng.sample(StandardNormal);
                    m + spec.noise_scale * eps
                })
                .collect();
            matrix.push(row);
        }
    }
    Ok(ArticleSeries {
        article_id: spec.article_id.clone(),
        calendar,
        matrix,
        mask: vec![true; spec.n_months],
        ground_truth: ChangePointSet::new(spec.breaks.clone(), spec.n_months)?,
    })
}
