//! PELT: exact penalized segmentation with pruning.
//!
//! Minimizes `sum_i L(segment_i) + lambda * n` over all segmentations. The
//! pruning step discards candidates that can never become optimal again, so
//! the output is identical to the unpruned dynamic program.

use super::cost::CostModel;

/// Exact minimizer of the penalized segmentation cost. Returned points are
/// 1-based month indices of the first row of each new segment.
pub fn detect_pelt(cost: &CostModel, penalty: f64, min_size: usize) -> Vec<usize> {
    let n = cost.len();
    let min_size = min_size.max(1);
    if n < min_size {
        return Vec::new();
    }
    // f[s] = optimal cost of rows 0..s plus one penalty per segment.
    let mut f = vec![f64::INFINITY; n + 1];
    let mut prev = vec![0usize; n + 1];
    f[0] = -penalty;
    let mut candidates: Vec<usize> = vec![0];

    for s in 1..=n {
        let mut best = f64::INFINITY;
        let mut best_t = 0usize;
        for &t in &candidates {
            if s - t < min_size {
                continue;
            }
            let v = f[t] + cost.cost(t, s) + penalty;
            if v < best || (v == best && t < best_t) {
                best = v;
                best_t = t;
            }
        }
        f[s] = best;
        prev[s] = best_t;
        if best.is_finite() {
            candidates.retain(|&t| s - t < min_size || f[t] + cost.cost(t, s) <= f[s]);
        }
        candidates.push(s);
    }

    let mut breaks = Vec::new();
    let mut s = n;
    while s > 0 {
        let t = prev[s];
        if t > 0 {
            breaks.push(t + 1);
        }
        s = t;
    }
    breaks.reverse();
    breaks
}
