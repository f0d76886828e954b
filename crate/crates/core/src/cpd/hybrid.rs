//! HYBRID: evaluation-time upper-bound ensemble over the three detectors.
//!
//! Not a deployable detector: it selects the best metric value after the
//! fact, either over aggregate means or per article.

use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};
use crate::evaluation::{ArticleEval, EvalReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HybridMode {
    /// Per metric, the maximum of the detectors' aggregate means.
    AggregateMax,
    /// Per article and metric, the maximum across detectors, then the mean.
    PerArticleMax,
}

/// Best-of-three report. Expects one report per detector (BinSeg, ECP,
/// PELT) over the same corpus.
pub fn hybrid_report(reports: &[&EvalReport], mode: HybridMode) -> Result<EvalReport> {
    if reports.len() != 3 {
        return Err(QcpdError::invalid(format!(
            "hybrid needs all three detector reports, got {}",
            reports.len()
        )));
    }
    let margin = reports[0].margin;
    if reports.iter().any(|r| r.margin != margin) {
        return Err(QcpdError::invalid("reports use different margins"));
    }
    match mode {
        HybridMode::AggregateMax => Ok(EvalReport {
            margin,
            covering: reports.iter().map(|r| r.covering).fold(0.0, f64::max),
            precision: reports.iter().map(|r| r.precision).fold(0.0, f64::max),
            recall: reports.iter().map(|r| r.recall).fold(0.0, f64::max),
            per_article: Vec::new(),
        }),
        HybridMode::PerArticleMax => {
            let n = reports[0].per_article.len();
            if reports.iter().any(|r| r.per_article.len() != n) || n == 0 {
                return Err(QcpdError::invalid(
                    "per-article hybrid needs aligned non-empty article rows",
                ));
            }
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let id = &reports[0].per_article[i].article_id;
                if reports.iter().any(|r| &r.per_article[i].article_id != id) {
                    return Err(QcpdError::invalid("article rows are not aligned"));
                }
                let pick = |f: fn(&ArticleEval) -> f64| {
                    reports
                        .iter()
                        .map(|r| f(&r.per_article[i]))
                        .fold(0.0, f64::max)
                };
                rows.push(ArticleEval {
                    article_id: id.clone(),
                    covering: pick(|a| a.covering),
                    precision: pick(|a| a.precision),
                    recall: pick(|a| a.recall),
                    tp: 0,
                    fp: 0,
                    fn_: 0,
                });
            }
            crate::evaluation::aggregate_report(rows, margin)
        }
    }
}
