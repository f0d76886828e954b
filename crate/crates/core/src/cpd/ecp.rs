//! E-Divisive: nonparametric divisive change-point estimation based on the
//! energy distance between segments, with a permutation test as the
//! stopping rule.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{QcpdError, Result};

/// Configuration for the E-Divisive detector.
#[derive(Clone, Copy, Debug)]
pub struct EcpConfig {
    /// Minimum gap between successive change points (and to the ends).
    pub min_size: usize,
    /// Number of permutations per split test.
    pub permutations: usize,
    /// Significance level for accepting a split.
    pub significance: f64,
    pub seed: u64,
}

impl Default for EcpConfig {
    fn default() -> Self {
        EcpConfig {
            min_size: 5,
            permutations: 199,
            significance: 0.05,
            seed: 0,
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Scaled between-sample energy statistic for the split X = first m points,
/// Y = rest, over an ordering of row ids. Returns the best (split, Q).
///
/// One left-to-right sweep maintains the cross and within sums, so a full
/// scan is O(L^2) given the distance matrix.
fn best_split(dist: &[Vec<f64>], order: &[usize], min_size: usize) -> Option<(usize, f64)> {
    let len = order.len();
    if len < 2 * min_size {
        return None;
    }
    let mut within_x = 0.0; // pairs inside the first m points
    let mut within_y: f64 = 0.0;
    let mut cross = 0.0;
    for i in 0..len {
        for j in i + 1..len {
            within_y += dist[order[i]][order[j]];
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for m in 1..len {
        // Move element m-1 from Y into X.
        let e = order[m - 1];
        let mut to_left = 0.0;
        for &x in &order[..m - 1] {
            to_left += dist[x][e];
        }
        let mut to_right = 0.0;
        for &y in &order[m..] {
            to_right += dist[e][y];
        }
        within_x += to_left;
        within_y -= to_right;
        cross += to_right - to_left;

        if m < min_size || len - m < min_size {
            continue;
        }
        let mf = m as f64;
        let kf = (len - m) as f64;
        let x_pairs = mf * (mf - 1.0) / 2.0;
        let y_pairs = kf * (kf - 1.0) / 2.0;
        let x_term = if x_pairs > 0.0 {
            within_x / x_pairs
        } else {
            0.0
        };
        let y_term = if y_pairs > 0.0 {
            within_y / y_pairs
        } else {
            0.0
        };
        let e_stat = 2.0 * cross / (mf * kf) - x_term - y_term;
        let q = mf * kf / (mf + kf) * e_stat;
        match best {
            Some((_, bq)) if q <= bq => {}
            _ => best = Some((m, q)),
        }
    }
    best
}

/// Detects change points by recursive bisection with a permutation test.
/// Returned points are 1-based first-row-of-new-segment indices. A series
/// shorter than `2 * min_size` yields an empty set.
pub fn detect_ecp(series: &[Vec<f64>], config: &EcpConfig) -> Result<Vec<usize>> {
    if config.min_size < 2 {
        return Err(QcpdError::invalid("ecp min_size must be at least 2"));
    }
    let n = series.len();
    if n < 2 * config.min_size {
        return Ok(Vec::new());
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(&series[i], &series[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut breaks = Vec::new();
    // Explicit queue keeps the permutation stream deterministic.
    let mut queue: Vec<(usize, usize)> = vec![(0, n)];
    while let Some((a, b)) = queue.pop() {
        if b - a < 2 * config.min_size {
            continue;
        }
        let order: Vec<usize> = (a..b).collect();
        let Some((split, observed)) = best_split(&dist, &order, config.min_size) else {
            continue;
        };
        let mut exceed = 0usize;
        let mut shuffled = order.clone();
        for _ in 0..config.permutations {
            shuffled.shuffle(&mut rng);
            if let Some((_, q)) = best_split(&dist, &shuffled, config.min_size) {
                if q >= observed {
                    exceed += 1;
                }
            }
        }
        let p = (1 + exceed) as f64 / (config.permutations + 1) as f64;
        if p < config.significance {
            let cut = a + split;
            breaks.push(cut + 1);
            // Right side first so the left segment is processed next (pop).
            queue.push((cut, b));
            queue.push((a, cut));
        }
    }
    breaks.sort_unstable();
    Ok(breaks)
}
