//! The 34 monthly quality-indicator features, article series assembly,
//! feature correlation, and change-window trend analysis.
//!
//! Feature layout (1-based, matching the column order everywhere):
//! F1-F6 contribution (G_c), F7-F14 activity (G_a), F15-F34 content (G_p),
//! of which F26-F34 are the readability scores.

pub mod readability;
pub mod text;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};
use crate::model::{
    bin_monthly, ground_truth_changepoints, ChangePointSet, MonthCalendar, PageHistory,
    QualityLabelEvent, Revision,
};
use crate::wikitext::{parse_wikitext_markers, plain_text, MarkerCounts};
use readability::readability_features;
use text::information_to_noise;

pub const FEATURE_COUNT: usize = 34;

/// Monthly feature matrix for one article, plus validity mask and the
/// ground-truth change points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArticleSeries {
    pub article_id: String,
    pub calendar: MonthCalendar,
    /// `n_months` rows of 34 features; invalid rows are all zero.
    pub matrix: Vec<Vec<f64>>,
    /// Months before the first main revision are invalid.
    pub mask: Vec<bool>,
    pub ground_truth: ChangePointSet,
}

impl ArticleSeries {
    /// 1-based month index of the first valid row, if any.
    pub fn first_valid_month(&self) -> Option<usize> {
        self.mask.iter().position(|&v| v).map(|i| i + 1)
    }

    /// Rows of the valid region, restricted to `columns` (0-based).
    pub fn valid_rows(&self, columns: &[usize]) -> Vec<Vec<f64>> {
        self.matrix
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(row, _)| columns.iter().map(|&c| row[c]).collect())
            .collect()
    }

    /// Ground-truth points re-indexed into the valid region (1-based within
    /// it); points falling before the region are dropped.
    pub fn ground_truth_in_valid_region(&self) -> Vec<usize> {
        let Some(first) = self.first_valid_month() else {
            return Vec::new();
        };
        self.ground_truth
            .points()
            .iter()
            .filter(|&&q| q > first)
            .map(|&q| q - first + 1)
            .collect()
    }
}

fn month_editors<'a>(
    revisions: &'a [Revision],
    cal: &'a MonthCalendar,
    month: usize,
) -> impl Iterator<Item = &'a Revision> {
    revisions
        .iter()
        .filter(move |r| cal.month_index(r.timestamp) == Some(month))
}

fn contribution_half(revisions: &[Revision], cal: &MonthCalendar, month: usize) -> (f64, f64, f64) {
    let mut distinct_registered: HashSet<&str> = HashSet::new();
    let mut distinct_unregistered: HashSet<&str> = HashSet::new();
    for r in month_editors(revisions, cal, month) {
        if r.registered {
            distinct_registered.insert(&r.editor_id);
        } else {
            distinct_unregistered.insert(&r.editor_id);
        }
    }
    // Editors registered on this page before the month started.
    let seen_before: HashSet<&str> = revisions
        .iter()
        .filter(|r| {
            r.registered
                && cal
                    .month_index(r.timestamp)
                    .map_or(r.timestamp < cal_month_start(cal, month), |m| m < month)
        })
        .map(|r| r.editor_id.as_str())
        .collect();
    let new_registered = distinct_registered
        .iter()
        .filter(|e| !seen_before.contains(**e))
        .count();
    (
        distinct_registered.len() as f64,
        new_registered as f64,
        distinct_unregistered.len() as f64,
    )
}

fn cal_month_start(cal: &MonthCalendar, month: usize) -> chrono::DateTime<chrono::Utc> {
    use chrono::TimeZone;
    let (y, m) = cal.year_month(month);
    chrono::Utc.with_ymd_and_hms(y, m, 1, 0, 0, 0).unwrap()
}

/// F1..F6 for one month: distinct/new registered and distinct unregistered
/// editors on the talk and main pages.
pub fn contribution_features(history: &PageHistory, cal: &MonthCalendar, month: usize) -> [f64; 6] {
    let (f1, f2, f3) = contribution_half(&history.talk_revisions, cal, month);
    let (f4, f5, f6) = contribution_half(&history.main_revisions, cal, month);
    [f1, f2, f3, f4, f5, f6]
}

/// Mean and population variance of inter-revision gaps (in days) whose later
/// member falls in `month`. Fewer than two gaps yields (0, 0).
fn gap_stats(revisions: &[Revision], cal: &MonthCalendar, month: usize) -> (f64, f64) {
    let mut gaps = Vec::new();
    for w in revisions.windows(2) {
        if cal.month_index(w[1].timestamp) == Some(month) {
            gaps.push((w[1].timestamp - w[0].timestamp).num_seconds() as f64 / 86_400.0);
        }
    }
    if gaps.len() < 2 {
        return (0.0, 0.0);
    }
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// F7..F14 for one month: gap statistics and revision counts at monthly and
/// weekly granularity for the main and talk pages.
pub fn activity_features(history: &PageHistory, cal: &MonthCalendar, month: usize) -> [f64; 8] {
    let (f7, f8) = gap_stats(&history.main_revisions, cal, month);
    let (f9, f10) = gap_stats(&history.talk_revisions, cal, month);
    let talk_count = month_editors(&history.talk_revisions, cal, month).count() as f64;
    let main_count = month_editors(&history.main_revisions, cal, month).count() as f64;
    let weeks = cal.days_in_month(month) as f64 / 7.0;
    [
        f7,
        f8,
        f9,
        f10,
        talk_count,
        talk_count / weeks,
        main_count,
        main_count / weeks,
    ]
}

/// F15..F25 from the month's latest revision markers and plain text.
pub fn content_features(markers: &MarkerCounts, plain: &str) -> [f64; 11] {
    let byte_length = markers.byte_length as f64;
    let image_ratio = if markers.byte_length == 0 {
        0.0
    } else {
        markers.images as f64 / byte_length
    };
    [
        byte_length,
        markers.refs as f64,
        markers.categories as f64,
        markers.wikilinks as f64,
        markers.citation_templates as f64,
        markers.noncitation_templates as f64,
        image_ratio,
        if markers.has_infobox { 1.0 } else { 0.0 },
        markers.level2_headings as f64,
        markers.level3plus_headings as f64,
        information_to_noise(plain),
    ]
}

/// Builds the full T x 34 monthly series for one article.
///
/// Content features come from the month's latest main revision and are
/// carried forward through revision-less months; contribution and activity
/// features are monthly and zero when nothing happened. Months before the
/// first in-window main revision are invalid.
pub fn build_series(
    history: &PageHistory,
    labels: &[QualityLabelEvent],
    cal: &MonthCalendar,
) -> Result<ArticleSeries> {
    if history.main_revisions.is_empty() {
        return Err(QcpdError::invalid(format!(
            "article {:?} has no main revisions",
            history.article_id
        )));
    }
    let binned = bin_monthly(&history.main_revisions, cal);
    let mut matrix = vec![vec![0.0; FEATURE_COUNT]; cal.n_months];
    let mut mask = vec![false; cal.n_months];
    let mut carried: Option<[f64; 20]> = None;

    for month in 1..=cal.n_months {
        if let Some(rev) = binned[month - 1] {
            let markers = parse_wikitext_markers(&rev.wikitext);
            let plain = plain_text(&rev.wikitext);
            let content = content_features(&markers, &plain);
            let read = readability_features(&plain).as_array();
            let mut gp = [0.0; 20];
            gp[..11].copy_from_slice(&content);
            gp[11..].copy_from_slice(&read);
            carried = Some(gp);
        }
        let Some(gp) = carried else { continue };
        mask[month - 1] = true;
        let row = &mut matrix[month - 1];
        row[..6].copy_from_slice(&contribution_features(history, cal, month));
        row[6..14].copy_from_slice(&activity_features(history, cal, month));
        row[14..].copy_from_slice(&gp);
    }

    Ok(ArticleSeries {
        article_id: history.article_id.clone(),
        calendar: *cal,
        matrix,
        mask,
        ground_truth: ground_truth_changepoints(labels, cal),
    })
}

/// Named feature subset for ablation runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationGroup {
    pub name: String,
    /// 0-based column indices into the 34-feature layout.
    pub columns: Vec<usize>,
}

fn range_cols(from_f: usize, to_f: usize) -> Vec<usize> {
    (from_f..=to_f).map(|f| f - 1).collect()
}

impl AblationGroup {
    /// Resolves a group name: `Gc`, `Ga`, `Gp`, `G1`..`G8`, `all`, or a
    /// `+`-joined union such as `Gc+Ga`.
    pub fn resolve(name: &str) -> Result<AblationGroup> {
        if name.contains('+') {
            let mut cols: Vec<usize> = Vec::new();
            for part in name.split('+') {
                cols.extend(AblationGroup::resolve(part.trim())?.columns);
            }
            cols.sort_unstable();
            cols.dedup();
            return Ok(AblationGroup {
                name: name.to_string(),
                columns: cols,
            });
        }
        let columns = match name.trim() {
            "Gc" | "gc" => range_cols(1, 6),
            "Ga" | "ga" => range_cols(7, 14),
            "Gp" | "gp" => range_cols(15, 34),
            "all" | "All" => range_cols(1, 34),
            "G1" | "g1" => range_cols(26, 34),
            "G2" | "g2" => range_cols(15, 25),
            "G3" | "g3" => {
                let mut c = range_cols(15, 25);
                c.push(31); // F32
                c
            }
            "G4" | "g4" => {
                let mut c = range_cols(15, 21);
                c.extend([22, 23]); // F23, F24
                c
            }
            "G5" | "g5" => {
                let mut c = AblationGroup::resolve("G4")?.columns;
                c.push(31);
                c
            }
            "G6" | "g6" => range_cols(9, 14),
            "G7" | "g7" => {
                let mut c = range_cols(9, 14);
                c.push(31);
                c
            }
            "G8" | "g8" => {
                let mut c = AblationGroup::resolve("G7")?.columns;
                c.extend(range_cols(1, 6));
                c
            }
            other => {
                return Err(QcpdError::invalid(format!(
                    "unknown feature group {other:?}"
                )))
            }
        };
        let mut columns = columns;
        columns.sort_unstable();
        columns.dedup();
        Ok(AblationGroup {
            name: name.trim().to_string(),
            columns,
        })
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// 34 x 34 Pearson correlation matrix of the corpus-mean feature series.
///
/// Each feature is first averaged across articles per timestamp (over the
/// articles valid at that timestamp), giving 34 series of length `n_months`.
/// Zero-variance features correlate 0 with everything; the diagonal is 1.
pub fn correlation_matrix(corpus: &[ArticleSeries]) -> Result<Vec<Vec<f64>>> {
    if corpus.len() < 2 {
        return Err(QcpdError::invalid("correlation needs at least 2 articles"));
    }
    let n_months = corpus[0].calendar.n_months;
    if corpus.iter().any(|s| s.calendar != corpus[0].calendar) {
        return Err(QcpdError::invalid("articles must share one calendar"));
    }
    let mut mean_series = vec![vec![0.0; n_months]; FEATURE_COUNT];
    for t in 0..n_months {
        let valid: Vec<&ArticleSeries> = corpus.iter().filter(|s| s.mask[t]).collect();
        if valid.is_empty() {
            continue;
        }
        for (f, series) in mean_series.iter_mut().enumerate() {
            series[t] = valid.iter().map(|s| s.matrix[t][f]).sum::<f64>() / valid.len() as f64;
        }
    }
    let mut out = vec![vec![0.0; FEATURE_COUNT]; FEATURE_COUNT];
    for i in 0..FEATURE_COUNT {
        out[i][i] = 1.0;
        for j in i + 1..FEATURE_COUNT {
            let r = pearson(&mean_series[i], &mean_series[j]);
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    Ok(out)
}

/// Position-wise feature means around the change point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeWindowMeans {
    /// 34 series of length `window`.
    pub means: Vec<Vec<f64>>,
    /// 0-based position of the change point inside the window.
    pub change_index: usize,
    pub window: usize,
    pub n_articles: usize,
    pub skipped: Vec<String>,
}

/// Aligns articles on a ground-truth change point and averages each feature
/// position-wise over a window of `window` months including the point.
///
/// The first ground-truth point with full context is used per article;
/// articles lacking one are skipped and reported.
pub fn change_window_means(corpus: &[ArticleSeries], window: usize) -> Result<ChangeWindowMeans> {
    if window < 2 {
        return Err(QcpdError::invalid("window must be at least 2"));
    }
    let change_index = window / 2;
    let mut sums = vec![vec![0.0; window]; FEATURE_COUNT];
    let mut n_articles = 0usize;
    let mut skipped = Vec::new();
    for series in corpus {
        let n_months = series.calendar.n_months;
        let aligned = series.ground_truth.points().iter().copied().find(|&q| {
            q > change_index
                && q - change_index >= 1
                && q - change_index + window - 1 <= n_months
                && (q - change_index..q - change_index + window).all(|m| series.mask[m - 1])
        });
        match aligned {
            Some(q) => {
                let start = q - change_index;
                for (f, row) in sums.iter_mut().enumerate() {
                    for (w, sum) in row.iter_mut().enumerate() {
                        *sum += series.matrix[start + w - 1][f];
                    }
                }
                n_articles += 1;
            }
            None => skipped.push(series.article_id.clone()),
        }
    }
    if n_articles == 0 {
        return Err(QcpdError::invalid(
            "no article has a change point with full window context",
        ));
    }
    for row in &mut sums {
        for v in row.iter_mut() {
            *v /= n_articles as f64;
        }
    }
    Ok(ChangeWindowMeans {
        means: sums,
        change_index,
        window,
        n_articles,
        skipped,
    })
}
