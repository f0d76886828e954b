//! Segmentation-quality metrics: Jaccard covering, margin-matched
//! precision/recall with one-to-one matching, and corpus aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};
use crate::model::QualityClass;

/// Contiguous segments (inclusive index ranges) induced by a change-point
/// list plus the bookends, over timestamps `1..=n`.
pub fn partition(points: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut bounds = Vec::with_capacity(points.len() + 2);
    bounds.push(1);
    bounds.extend_from_slice(points);
    bounds.push(n + 1);
    bounds.windows(2).map(|w| (w[0], w[1] - 1)).collect()
}

/// Jaccard index of two inclusive index ranges; two empty sets give 1.0.
pub fn jaccard(s: (usize, usize), t: (usize, usize)) -> f64 {
    let lo = s.0.max(t.0);
    let hi = s.1.min(t.1);
    let inter = if hi >= lo { hi - lo + 1 } else { 0 };
    let len_s = s.1 + 1 - s.0;
    let len_t = t.1 + 1 - t.0;
    let union = len_s + len_t - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Which overlap the covering metric takes per ground-truth segment.
///
/// `Max` is the metric's original definition and the default; `Min`
/// reproduces a literal reading that collapses to near zero for any
/// multi-segment prediction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveringOp {
    #[default]
    Max,
    Min,
}

/// Covering of the ground-truth partition by the predicted partition:
/// the |s|-weighted best Jaccard overlap, averaged over timestamps.
pub fn covering(gt: &[usize], pred: &[usize], n: usize, op: CoveringOp) -> f64 {
    let gt_segments = partition(gt, n);
    let pred_segments = partition(pred, n);
    let mut total = 0.0;
    for s in &gt_segments {
        let overlaps = pred_segments.iter().map(|t| jaccard(*s, *t));
        let best = match op {
            CoveringOp::Max => overlaps.fold(0.0, f64::max),
            CoveringOp::Min => overlaps.fold(f64::INFINITY, f64::min),
        };
        total += (s.1 + 1 - s.0) as f64 * best;
    }
    total / n as f64
}

/// One-to-one matching of ground-truth points to predictions within margin
/// `m`: ground-truth points are processed in increasing order, each taking
/// the smallest unused admissible prediction.
///
/// With sorted ground truth each point is admissible for an interval of
/// predictions, and the smallest-first greedy is cardinality-optimal there
/// (taking the nearest instead is not: gt {38, 42}, pred {32, 36}, m = 6
/// would strand 42).
pub fn match_true_positives(gt: &[usize], pred: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut used = vec![false; pred.len()];
    let mut matches = Vec::new();
    for &g in gt {
        let pick = pred
            .iter()
            .enumerate()
            .filter(|&(i, &q)| !used[i] && g.abs_diff(q) <= m)
            .min_by_key(|&(_, &q)| q);
        if let Some((i, &q)) = pick {
            used[i] = true;
            matches.push((g, q));
        }
    }
    matches
}

/// Precision and recall from margin-matched true positives, with the
/// degenerate conventions: empty prediction and empty truth give (1, 1);
/// otherwise an empty side scores 0 precision / recall as the formulas say.
pub fn precision_recall(gt: &[usize], pred: &[usize], m: usize) -> (f64, f64) {
    let tp = match_true_positives(gt, pred, m).len() as f64;
    let precision = if pred.is_empty() {
        if gt.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        tp / pred.len() as f64
    };
    let recall = if gt.is_empty() {
        1.0
    } else {
        tp / gt.len() as f64
    };
    (precision, recall)
}

/// Converts a per-month predicted class sequence into change points: month
/// `m` is a point iff its class differs from month `m - 1`.
pub fn labels_to_changepoints(classes: &[QualityClass]) -> Vec<usize> {
    classes
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, _)| i + 2)
        .collect()
}

/// Per-article metric row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArticleEval {
    pub article_id: String,
    pub covering: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Corpus-level report: per-article rows plus unweighted means.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub margin: usize,
    pub covering: f64,
    pub precision: f64,
    pub recall: f64,
    pub per_article: Vec<ArticleEval>,
}

/// Evaluates one article's prediction against its ground truth.
pub fn evaluate_article(
    article_id: &str,
    gt: &[usize],
    pred: &[usize],
    n: usize,
    margin: usize,
    op: CoveringOp,
) -> ArticleEval {
    let tp = match_true_positives(gt, pred, margin).len();
    let (precision, recall) = precision_recall(gt, pred, margin);
    ArticleEval {
        article_id: article_id.to_string(),
        covering: covering(gt, pred, n, op),
        precision,
        recall,
        tp,
        fp: pred.len() - tp,
        fn_: gt.len() - tp,
    }
}

/// Unweighted mean of covering, precision, and recall across articles.
pub fn aggregate_report(rows: Vec<ArticleEval>, margin: usize) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(QcpdError::invalid("no article reports to aggregate"));
    }
    let n = rows.len() as f64;
    Ok(EvalReport {
        margin,
        covering: rows.iter().map(|r| r.covering).sum::<f64>() / n,
        precision: rows.iter().map(|r| r.precision).sum::<f64>() / n,
        recall: rows.iter().map(|r| r.recall).sum::<f64>() / n,
        per_article: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use QualityClass::*;

    #[test]
    fn jaccard_fixtures() {
        assert_eq!(jaccard((1, 5), (1, 5)), 1.0);
        assert!((jaccard((1, 5), (4, 10)) - 0.2).abs() < 1e-12);
        assert_eq!(jaccard((1, 3), (7, 9)), 0.0);
    }

    #[test]
    fn covering_perfect_prediction_is_one() {
        for gt in [vec![], vec![6], vec![3, 8]] {
            assert!((covering(&gt, &gt, 10, CoveringOp::Max) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covering_hand_enumerated_fixture() {
        let c = covering(&[6], &[4], 10, CoveringOp::Max);
        assert!((c - 0.657143).abs() < 1e-6, "{c}");
    }

    #[test]
    fn covering_empty_prediction() {
        let c = covering(&[6], &[], 10, CoveringOp::Max);
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn covering_min_mode_differs() {
        let max = covering(&[6], &[4], 10, CoveringOp::Max);
        let min = covering(&[6], &[4], 10, CoveringOp::Min);
        assert!(min < max);
    }

    #[test]
    fn matching_fixture_and_no_double_counting() {
        let m = match_true_positives(&[10, 50], &[12, 30, 53], 5);
        assert_eq!(m, vec![(10, 12), (50, 53)]);

        let m = match_true_positives(&[10], &[10, 11], 5);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0], (10, 10));

        assert!(match_true_positives(&[10], &[20], 5).is_empty());
    }

    #[test]
    fn matching_tie_takes_smaller_prediction() {
        let m = match_true_positives(&[10], &[8, 12], 5);
        assert_eq!(m, vec![(10, 8)]);
    }

    #[test]
    fn matching_is_cardinality_optimal_where_nearest_first_is_not() {
        let m = match_true_positives(&[38, 42], &[32, 36], 6);
        assert_eq!(m, vec![(38, 32), (42, 36)]);
    }

    #[test]
    fn precision_recall_fixture() {
        let (p, r) = precision_recall(&[10, 50], &[12, 30, 53], 5);
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn degenerate_conventions() {
        assert_eq!(precision_recall(&[], &[], 5), (1.0, 1.0));
        assert_eq!(precision_recall(&[10], &[], 5), (0.0, 0.0));
        assert_eq!(precision_recall(&[], &[10], 5), (0.0, 1.0));
    }

    #[test]
    fn counts_are_consistent() {
        let row = evaluate_article("a", &[10, 50], &[12, 30, 53], 60, 5, CoveringOp::Max);
        assert_eq!(row.tp + row.fn_, 2);
        assert_eq!(row.tp + row.fp, 3);
    }

    #[test]
    fn labels_to_changepoints_fixtures() {
        assert_eq!(labels_to_changepoints(&[BC, BC, AGA, AGA, FA]), vec![3, 5]);
        assert!(labels_to_changepoints(&[SS, SS, SS]).is_empty());
        assert_eq!(labels_to_changepoints(&[SS, BC, SS, BC]), vec![2, 3, 4]);
        assert!(labels_to_changepoints(&[]).is_empty());
    }

    #[test]
    fn aggregation_is_unweighted_mean_and_order_free() {
        let a = evaluate_article("a", &[5], &[5], 20, 5, CoveringOp::Max);
        let b = evaluate_article("b", &[5], &[15], 20, 5, CoveringOp::Max);
        let fwd = aggregate_report(vec![a.clone(), b.clone()], 5).unwrap();
        let rev = aggregate_report(vec![b, a], 5).unwrap();
        assert!((fwd.covering - rev.covering).abs() < 1e-12);
        assert!((fwd.precision - rev.precision).abs() < 1e-12);
        let single = aggregate_report(vec![fwd.per_article[0].clone()], 5).unwrap();
        assert_eq!(single.covering, fwd.per_article[0].covering);
    }
}
