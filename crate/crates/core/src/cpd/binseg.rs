//! Binary segmentation: greedy top-down splitting.

use super::cost::CostModel;

/// Greedily picks `n_bkps` splits, each maximizing the cost reduction of the
/// current segmentation. Ties break to the smallest index. Returned points
/// are 1-based month indices of the first row of each new segment.
///
/// A series shorter than `2 * min_size` yields an empty set.
pub fn detect_binseg(cost: &CostModel, n_bkps: usize, min_size: usize) -> Vec<usize> {
    let n = cost.len();
    let min_size = min_size.max(1);
    if n < 2 * min_size || n_bkps == 0 {
        return Vec::new();
    }
    // Half-open 0-based segments.
    let mut segments: Vec<(usize, usize)> = vec![(0, n)];
    let mut breaks: Vec<usize> = Vec::new();

    for _ in 0..n_bkps {
        let mut best: Option<(f64, usize, usize)> = None; // (gain, split, segment idx)
        for (si, &(a, b)) in segments.iter().enumerate() {
            if b - a < 2 * min_size {
                continue;
            }
            let whole = cost.cost(a, b);
            for t in a + min_size..=b - min_size {
                let gain = whole - cost.cost(a, t) - cost.cost(t, b);
                let better = match best {
                    None => true,
                    Some((g, s, _)) => gain > g + 1e-12 || (gain > g - 1e-12 && t < s),
                };
                if better {
                    best = Some((gain, t, si));
                }
            }
        }
        let Some((_, t, si)) = best else { break };
        let (a, b) = segments[si];
        segments[si] = (a, t);
        segments.insert(si + 1, (t, b));
        breaks.push(t + 1); // month index of the new segment's first row
    }
    breaks.sort_unstable();
    breaks
}
