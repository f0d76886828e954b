//! Offline multivariate change-point detectors minimizing the penalized
//! segmentation cost: BinSeg, PELT, E-Divisive, plus a brute-force oracle
//! and the evaluation-time HYBRID ensemble.

pub mod binseg;
pub mod cost;
pub mod ecp;
pub mod hybrid;
pub mod oracle;
pub mod pelt;

pub use binseg::detect_binseg;
pub use cost::{median_heuristic_gamma, Bandwidth, CostKind, CostModel};
pub use ecp::{detect_ecp, EcpConfig};
pub use hybrid::{hybrid_report, HybridMode};
pub use oracle::{oracle_optimal_segmentation, Segmentation, ORACLE_MAX_LEN};
pub use pelt::detect_pelt;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Which detector to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    BinSeg,
    Pelt,
    Ecp,
}

impl std::str::FromStr for Algorithm {
    type Err = crate::error::QcpdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binseg" => Ok(Algorithm::BinSeg),
            "pelt" => Ok(Algorithm::Pelt),
            "ecp" => Ok(Algorithm::Ecp),
            other => Err(crate::error::QcpdError::invalid(format!(
                "unknown algorithm {other:?}"
            ))),
        }
    }
}

/// Full detector configuration with the tuned defaults: `n_bkps = 1`,
/// `pen_val = 1`, `min_size = 5` (ECP) / 2 (BinSeg, PELT).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub algorithm: Algorithm,
    pub n_bkps: usize,
    pub penalty: f64,
    pub min_size: usize,
    pub cost: CostKind,
    pub bandwidth: Bandwidth,
    pub permutations: usize,
    pub significance: f64,
    pub seed: u64,
}

impl DetectorConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        DetectorConfig {
            algorithm,
            n_bkps: 1,
            penalty: 1.0,
            min_size: match algorithm {
                Algorithm::Ecp => 5,
                _ => 2,
            },
            cost: CostKind::Rbf,
            bandwidth: Bandwidth::Auto,
            permutations: 199,
            significance: 0.05,
            seed: 0,
        }
    }
}

/// Runs the configured detector on one series. Returned points are 1-based
/// first-row-of-new-segment indices into the series.
pub fn detect(series: &[Vec<f64>], config: &DetectorConfig) -> Result<Vec<usize>> {
    match config.algorithm {
        Algorithm::BinSeg => {
            let cost = CostModel::new(series, config.cost, config.bandwidth)?;
            Ok(detect_binseg(&cost, config.n_bkps, config.min_size))
        }
        Algorithm::Pelt => {
            let cost = CostModel::new(series, config.cost, config.bandwidth)?;
            Ok(detect_pelt(&cost, config.penalty, config.min_size))
        }
        Algorithm::Ecp => detect_ecp(
            series,
            &EcpConfig {
                min_size: config.min_size,
                permutations: config.permutations,
                significance: config.significance,
                seed: config.seed,
            },
        ),
    }
}
