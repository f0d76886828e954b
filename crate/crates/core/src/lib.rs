//! Quality change-point detection for Wikipedia-style revision histories.
//!
//! The crate covers the full pipeline:
//!
//! - [`ingest`]: streaming MediaWiki XML export parsing and JSONL I/O;
//! - [`model`]: revisions, quality-label events, the monthly calendar, and
//!   change-point sets;
//! - [`features`]: the 34-feature monthly series (contribution, activity,
//!   and content groups) plus ablation-group resolution;
//! - [`cpd`]: offline detectors (BinSeg, PELT, E-Divisive), an exact
//!   brute-force oracle, and the best-of-three HYBRID report;
//! - [`evaluation`]: covering, margin-matched precision/recall, and corpus
//!   aggregation;
//! - [`trajectory`]: quality-label trajectory classification and cyclic
//!   switch analysis;
//! - [`harness`]: corpus splits, tuning, ablations, and the synthetic
//!   benchmark generator.

pub mod cpd;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod harness;
pub mod ingest;
pub mod model;
pub mod trajectory;
pub mod wikitext;

pub use cpd::{detect, Algorithm, DetectorConfig};
pub use error::{QcpdError, Result};
pub use evaluation::{ArticleEval, CoveringOp, EvalReport};
pub use features::{ArticleSeries, FEATURE_COUNT};
pub use model::{
    ChangePointSet, MonthCalendar, PageHistory, QualityClass, QualityLabelEvent, RawClass, Revision,
};
