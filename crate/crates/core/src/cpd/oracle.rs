//! Unpruned dynamic-programming oracle for the penalized segmentation cost.
//! Test-support only: quadratic in the series length and capped at N = 30.

use serde::{Deserialize, Serialize};

use super::cost::CostModel;
use crate::error::{QcpdError, Result};

pub const ORACLE_MAX_LEN: usize = 30;

/// An exact segmentation with its total penalized cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    /// 1-based first-row-of-new-segment indices.
    pub change_points: Vec<usize>,
    pub total_cost: f64,
}

impl Segmentation {
    /// Segment lengths induced over a series of `n` rows.
    pub fn segment_lengths(&self, n: usize) -> Vec<usize> {
        let mut bounds = vec![1usize];
        bounds.extend_from_slice(&self.change_points);
        bounds.push(n + 1);
        bounds.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Exact minimum of the penalized cost by full O(N^2) dynamic programming,
/// with no pruning. Rejects series longer than [`ORACLE_MAX_LEN`].
pub fn oracle_optimal_segmentation(
    cost: &CostModel,
    penalty: f64,
    min_size: usize,
) -> Result<Segmentation> {
    let n = cost.len();
    if n > ORACLE_MAX_LEN {
        return Err(QcpdError::invalid(format!(
            "oracle capped at N = {ORACLE_MAX_LEN}, got {n}"
        )));
    }
    let min_size = min_size.max(1);
    let mut f = vec![f64::INFINITY; n + 1];
    let mut prev = vec![0usize; n + 1];
    f[0] = -penalty;
    for s in 1..=n {
        for t in 0..s {
            if s - t < min_size {
                continue;
            }
            let v = f[t] + cost.cost(t, s) + penalty;
            if v < f[s] {
                f[s] = v;
                prev[s] = t;
            }
        }
    }
    let mut change_points = Vec::new();
    let mut s = n;
    while s > 0 {
        let t = prev[s];
        if t > 0 {
            change_points.push(t + 1);
        }
        s = t;
    }
    change_points.reverse();
    Ok(Segmentation {
        change_points,
        total_cost: f[n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpd::cost::{Bandwidth, CostKind, CostModel};

    fn model(series: &[Vec<f64>]) -> CostModel {
        CostModel::new(series, CostKind::Rbf, Bandwidth::Fixed(1.0)).unwrap()
    }

    /// Total penalized cost of an explicit segmentation.
    fn eval(cost: &CostModel, breaks: &[usize], penalty: f64) -> f64 {
        let n = cost.len();
        let mut bounds = vec![0usize];
        bounds.extend(breaks.iter().map(|&q| q - 1));
        bounds.push(n);
        bounds
            .windows(2)
            .map(|w| cost.cost(w[0], w[1]))
            .sum::<f64>()
            + penalty * breaks.len() as f64
    }

    #[test]
    fn oracle_beats_every_enumerated_segmentation() {
        let series: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![if i < 6 { 0.0 } else { 5.0 }, (i as f64 * 0.37).sin()])
            .collect();
        let m = model(&series);
        let oracle = oracle_optimal_segmentation(&m, 1.0, 2).unwrap();

        // All segmentations with up to 3 breaks, min segment 2.
        let n = series.len();
        let mut best = eval(&m, &[], 1.0);
        for a in 3..=n {
            best = best.min(eval(&m, &[a], 1.0));
            for b in a + 2..=n {
                best = best.min(eval(&m, &[a, b], 1.0));
                for c in b + 2..=n {
                    best = best.min(eval(&m, &[a, b, c], 1.0));
                }
            }
        }
        assert!(oracle.total_cost <= best + 1e-9);
        assert!((eval(&m, &oracle.change_points, 1.0) - oracle.total_cost).abs() < 1e-9);
    }

    #[test]
    fn constant_series_zero_breaks_zero_cost() {
        let series = vec![vec![2.0]; 15];
        let seg = oracle_optimal_segmentation(&model(&series), 1.0, 2).unwrap();
        assert!(seg.change_points.is_empty());
        assert!(seg.total_cost.abs() < 1e-9);
    }

    #[test]
    fn too_long_series_rejected() {
        let series = vec![vec![0.0]; 31];
        assert!(oracle_optimal_segmentation(&model(&series), 1.0, 2).is_err());
    }

    #[test]
    fn segment_lengths_partition_the_series() {
        let seg = Segmentation {
            change_points: vec![4, 9],
            total_cost: 0.0,
        };
        assert_eq!(seg.segment_lengths(12), vec![3, 5, 4]);
    }
}
