//! Segment cost models for penalized segmentation.
//!
//! The RBF cost of rows `a..b` is `(b-a) - (1/(b-a)) * sum_{x,y} exp(-gamma * ||y_x - y_y||^2)`
//! over all ordered pairs in the segment; it is zero for a segment of
//! identical rows. The L2 cost is the within-segment sum of squared
//! deviations from the segment mean. Both are precomputed with prefix sums
//! so a segment evaluation is O(1) (RBF) or O(d) (L2).

use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Rbf,
    L2,
}

/// RBF bandwidth selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// 1 / median of pairwise squared distances over the whole series,
    /// falling back to 1.0 when the median is zero.
    Auto,
    Fixed(f64),
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Median-heuristic gamma for a series.
pub fn median_heuristic_gamma(series: &[Vec<f64>]) -> f64 {
    let n = series.len();
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            dists.push(squared_distance(&series[i], &series[j]));
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(|a, b| a.total_cmp(b));
    let median = if dists.len() % 2 == 1 {
        dists[dists.len() / 2]
    } else {
        (dists[dists.len() / 2 - 1] + dists[dists.len() / 2]) / 2.0
    };
    if median > 0.0 {
        1.0 / median
    } else {
        1.0
    }
}

/// Cost model bound to one series.
#[derive(Clone, Debug)]
pub struct CostModel {
    n: usize,
    kind: CostKind,
    gamma: Option<f64>,
    /// RBF: (n+1)^2 prefix sums of the kernel matrix.
    kernel_prefix: Vec<Vec<f64>>,
    /// L2: per-dimension prefix sums of values and of squared norms.
    value_prefix: Vec<Vec<f64>>,
    sq_prefix: Vec<f64>,
}

impl CostModel {
    pub fn new(series: &[Vec<f64>], kind: CostKind, bandwidth: Bandwidth) -> Result<Self> {
        let n = series.len();
        if n == 0 {
            return Err(QcpdError::invalid("empty series"));
        }
        let d = series[0].len();
        if series.iter().any(|r| r.len() != d) {
            return Err(QcpdError::invalid("ragged series rows"));
        }
        if series.iter().flatten().any(|v| !v.is_finite()) {
            return Err(QcpdError::invalid("series contains non-finite values"));
        }
        match kind {
            CostKind::Rbf => {
                let gamma = match bandwidth {
                    Bandwidth::Auto => median_heuristic_gamma(series),
                    Bandwidth::Fixed(g) if g > 0.0 => g,
                    Bandwidth::Fixed(_) => {
                        return Err(QcpdError::invalid("gamma must be positive"))
                    }
                };
                let mut prefix = vec![vec![0.0; n + 1]; n + 1];
                for i in 0..n {
                    for j in 0..n {
                        let k = (-gamma * squared_distance(&series[i], &series[j])).exp();
                        prefix[i + 1][j + 1] =
                            k + prefix[i][j + 1] + prefix[i + 1][j] - prefix[i][j];
                    }
                }
                Ok(CostModel {
                    n,
                    kind,
                    gamma: Some(gamma),
                    kernel_prefix: prefix,
                    value_prefix: Vec::new(),
                    sq_prefix: Vec::new(),
                })
            }
            CostKind::L2 => {
                let mut value_prefix = vec![vec![0.0; d]; n + 1];
                let mut sq_prefix = vec![0.0; n + 1];
                for i in 0..n {
                    for c in 0..d {
                        value_prefix[i + 1][c] = value_prefix[i][c] + series[i][c];
                    }
                    sq_prefix[i + 1] = sq_prefix[i] + series[i].iter().map(|v| v * v).sum::<f64>();
                }
                Ok(CostModel {
                    n,
                    kind,
                    gamma: None,
                    kernel_prefix: Vec::new(),
                    value_prefix,
                    sq_prefix,
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    /// Resolved RBF bandwidth, if any.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    /// Cost of rows `a..b` (0-based, half-open). `a < b <= n` required;
    /// callers in the detectors guarantee it.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < b && b <= self.n);
        let len = (b - a) as f64;
        match self.kind {
            CostKind::Rbf => {
                let block =
                    self.kernel_prefix[b][b] - self.kernel_prefix[a][b] - self.kernel_prefix[b][a]
                        + self.kernel_prefix[a][a];
                (len - block / len).max(0.0)
            }
            CostKind::L2 => {
                let sq = self.sq_prefix[b] - self.sq_prefix[a];
                let mut mean_term = 0.0;
                for c in 0..self.value_prefix[0].len() {
                    let s = self.value_prefix[b][c] - self.value_prefix[a][c];
                    mean_term += s * s;
                }
                (sq - mean_term / len).max(0.0)
            }
        }
    }

    /// Checked 1-based variant: rows `i..j-1` with `1 <= i < j <= n+1`.
    pub fn segment_cost(&self, i: usize, j: usize) -> Result<f64> {
        if i < 1 || i >= j || j > self.n + 1 {
            return Err(QcpdError::invalid(format!(
                "invalid segment [{i}, {j}) for series of length {}",
                self.n
            )));
        }
        Ok(self.cost(i - 1, j - 1))
    }
}
