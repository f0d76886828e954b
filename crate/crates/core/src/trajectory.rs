//! Temporal patterns of quality-label sequences: promotion/demotion
//! classification, transition statistics, and cyclic switches.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};
use crate::model::QualityClass;

/// Time-ordered merged quality labels for one article.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityTrajectory {
    pub article_id: String,
    pub labeled: Vec<(DateTime<Utc>, QualityClass)>,
    pub creation_time: DateTime<Utc>,
}

impl QualityTrajectory {
    /// Label sequence with consecutive equal classes collapsed; each run
    /// keeps the timestamp of its first label.
    pub fn deduplicated(&self) -> Vec<(DateTime<Utc>, QualityClass)> {
        let mut out: Vec<(DateTime<Utc>, QualityClass)> = Vec::new();
        for &(t, c) in &self.labeled {
            if out.last().map(|&(_, p)| p) != Some(c) {
                out.push((t, c));
            }
        }
        out
    }
}

/// Temporal pattern of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrajectoryKind {
    OnlyPromotion,
    OnlyDemotion,
    Both,
    NoChange,
}

/// A quality path that returns to its starting class through distinct
/// consecutive intermediate classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicSwitch {
    pub class_sequence: Vec<QualityClass>,
    /// Number of states including both endpoints; always >= 3.
    pub length: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub turnaround_days: f64,
}

/// Aggregate statistics for one (from, to) transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionStat {
    pub from: QualityClass,
    pub to: QualityClass,
    pub hops: u8,
    pub count: usize,
    pub avg_days: f64,
    pub sd_days: f64,
}

/// Classifies a trajectory into exactly one of the four temporal patterns.
pub fn classify_trajectory(t: &QualityTrajectory) -> Result<TrajectoryKind> {
    if t.labeled.is_empty() {
        return Err(QcpdError::invalid("trajectory has no labels"));
    }
    let deduped = t.deduplicated();
    if deduped.len() <= 1 {
        return Ok(TrajectoryKind::NoChange);
    }
    let mut rises = false;
    let mut falls = false;
    for w in deduped.windows(2) {
        if w[1].1 > w[0].1 {
            rises = true;
        } else {
            falls = true;
        }
    }
    Ok(match (rises, falls) {
        (true, false) => TrajectoryKind::OnlyPromotion,
        (false, true) => TrajectoryKind::OnlyDemotion,
        _ => TrajectoryKind::Both,
    })
}

fn days_between(a: DateTime<Utc>, b: DateTime<Utc>) -> f64 {
    (b - a).num_seconds() as f64 / 86_400.0
}

/// Per-(from, to) counts and turnaround statistics over a corpus.
///
/// Every adjacent pair of the deduplicated trajectory contributes one
/// observation, so a multi-hop path like SS => BC => FA counts under both
/// SS->BC and BC->FA. Standard deviation is the population form.
pub fn transition_stats(corpus: &[QualityTrajectory]) -> Vec<TransitionStat> {
    let mut samples: BTreeMap<(u8, u8), Vec<f64>> = BTreeMap::new();
    for t in corpus {
        let deduped = t.deduplicated();
        for w in deduped.windows(2) {
            let key = (w[0].1.rank(), w[1].1.rank());
            samples
                .entry(key)
                .or_default()
                .push(days_between(w[0].0, w[1].0));
        }
    }
    samples
        .into_iter()
        .map(|((from, to), days)| {
            let n = days.len() as f64;
            let mean = days.iter().sum::<f64>() / n;
            let var = days.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
            TransitionStat {
                from: QualityClass::ALL[from as usize],
                to: QualityClass::ALL[to as usize],
                hops: from.abs_diff(to),
                count: days.len(),
                avg_days: mean,
                sd_days: var.sqrt(),
            }
        })
        .collect()
}

/// Enumerates all minimal cycles of the deduplicated trajectory.
///
/// For every start index `i`, the smallest `j > i + 1` with
/// `class_j == class_i` yields one switch of length `j - i + 1`. Adjacent
/// classes are distinct after deduplication, so every reported cycle
/// satisfies the intermediate-distinctness constraint by construction.
pub fn find_cyclic_switches(t: &QualityTrajectory) -> Vec<CyclicSwitch> {
    let deduped = t.deduplicated();
    let mut out = Vec::new();
    for i in 0..deduped.len() {
        if let Some(j) = (i + 2..deduped.len()).find(|&j| deduped[j].1 == deduped[i].1) {
            out.push(CyclicSwitch {
                class_sequence: deduped[i..=j].iter().map(|&(_, c)| c).collect(),
                length: j - i + 1,
                start: deduped[i].0,
                end: deduped[j].0,
                turnaround_days: days_between(deduped[i].0, deduped[j].0),
            });
        }
    }
    out
}

/// Corpus-level switch histograms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchHistograms {
    /// Switch instances per cycle length.
    pub by_length: BTreeMap<usize, usize>,
    /// Number of articles per switch count (articles with zero switches
    /// are not listed).
    pub per_article: BTreeMap<usize, usize>,
    /// Switch instances with turnaround below the rapid threshold.
    pub rapid_count: usize,
    /// Articles owning at least one rapid switch.
    pub rapid_articles: usize,
    pub rapid_threshold_days: f64,
}

pub const RAPID_TURNAROUND_DAYS: f64 = 15.0;

/// Histograms of cyclic switches across a corpus, with the rapid bucket
/// defined by turnaround < 15 days.
pub fn switch_histograms(corpus: &[QualityTrajectory]) -> SwitchHistograms {
    let mut hist = SwitchHistograms {
        rapid_threshold_days: RAPID_TURNAROUND_DAYS,
        ..Default::default()
    };
    for t in corpus {
        let switches = find_cyclic_switches(t);
        if switches.is_empty() {
            continue;
        }
        *hist.per_article.entry(switches.len()).or_default() += 1;
        let mut any_rapid = false;
        for s in &switches {
            *hist.by_length.entry(s.length).or_default() += 1;
            if s.turnaround_days < RAPID_TURNAROUND_DAYS {
                hist.rapid_count += 1;
                any_rapid = true;
            }
        }
        if any_rapid {
            hist.rapid_articles += 1;
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use QualityClass::*;

    fn day(n: i64) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2010, 1, 1, 0, 0, 0).unwrap() + chrono::Duration::days(n)
    }

    fn traj(classes: &[QualityClass]) -> QualityTrajectory {
        traj_at(
            &classes
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as i64 * 100, c))
                .collect::<Vec<_>>(),
        )
    }

    fn traj_at(labels: &[(i64, QualityClass)]) -> QualityTrajectory {
        QualityTrajectory {
            article_id: "t".into(),
            labeled: labels.iter().map(|&(d, c)| (day(d), c)).collect(),
            creation_time: day(0),
        }
    }

    #[test]
    fn promotion_demotion_both_nochange() {
        assert_eq!(
            classify_trajectory(&traj(&[SS, BC, FA])).unwrap(),
            TrajectoryKind::OnlyPromotion
        );
        assert_eq!(
            classify_trajectory(&traj(&[FA, BC])).unwrap(),
            TrajectoryKind::OnlyDemotion
        );
        assert_eq!(
            classify_trajectory(&traj(&[BC, AGA, BC])).unwrap(),
            TrajectoryKind::Both
        );
        assert_eq!(
            classify_trajectory(&traj(&[SS])).unwrap(),
            TrajectoryKind::NoChange
        );
        assert_eq!(
            classify_trajectory(&traj(&[SS, SS, SS])).unwrap(),
            TrajectoryKind::NoChange
        );
    }

    #[test]
    fn empty_trajectory_is_rejected() {
        assert!(classify_trajectory(&traj(&[])).is_err());
    }

    #[test]
    fn single_transition_stats() {
        let stats = transition_stats(&[traj_at(&[(0, SS), (100, BC)])]);
        assert_eq!(stats.len(), 1);
        let s = &stats[0];
        assert_eq!((s.from, s.to, s.hops, s.count), (SS, BC, 1, 1));
        assert!((s.avg_days - 100.0).abs() < 1e-9);
        assert!(s.sd_days.abs() < 1e-9);
    }

    #[test]
    fn multi_hop_path_counts_each_sub_transition() {
        let stats = transition_stats(&[traj_at(&[(0, SS), (100, BC), (160, FA)])]);
        assert_eq!(stats.len(), 2);
        assert!(stats
            .iter()
            .any(|s| s.from == SS && s.to == BC && s.count == 1));
        assert!(stats
            .iter()
            .any(|s| s.from == BC && s.to == FA && s.count == 1 && s.hops == 2));
    }

    #[test]
    fn mean_and_population_sd_across_articles() {
        let stats = transition_stats(&[
            traj_at(&[(0, SS), (100, BC)]),
            traj_at(&[(0, SS), (300, BC)]),
        ]);
        let s = stats.iter().find(|s| s.from == SS && s.to == BC).unwrap();
        assert_eq!(s.count, 2);
        assert!((s.avg_days - 200.0).abs() < 1e-9);
        assert!((s.sd_days - 100.0).abs() < 1e-9);
    }

    #[test]
    fn length_three_switch() {
        let switches = find_cyclic_switches(&traj(&[BC, SS, BC]));
        assert_eq!(switches.len(), 1);
        assert_eq!(switches[0].length, 3);
        assert_eq!(switches[0].class_sequence, vec![BC, SS, BC]);
    }

    #[test]
    fn length_four_switch() {
        let switches = find_cyclic_switches(&traj(&[FA, AGA, BC, FA]));
        assert_eq!(switches.len(), 1);
        assert_eq!(switches[0].length, 4);
    }

    #[test]
    fn no_repeat_no_switch() {
        assert!(find_cyclic_switches(&traj(&[SS, BC, AGA])).is_empty());
    }

    #[test]
    fn overlapping_starts_all_reported() {
        // BC..BC cycle from index 0 and SS..SS cycle from index 1.
        let switches = find_cyclic_switches(&traj(&[BC, SS, BC, SS]));
        assert_eq!(switches.len(), 2);
        assert!(switches.iter().all(|s| s.length == 3));
    }

    #[test]
    fn switch_invariants_hold() {
        let t = traj(&[SS, BC, AGA, BC, SS, FA, SS]);
        for s in find_cyclic_switches(&t) {
            assert_eq!(s.class_sequence.first(), s.class_sequence.last());
            assert!(s.length >= 3);
            assert!(s.class_sequence.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn histograms_count_lengths_and_rapid_bucket() {
        let corpus = vec![
            traj_at(&[(0, BC), (10, SS), (12, BC)]), // length 3, 12 days: rapid
            traj_at(&[(0, FA), (5, AGA), (20, BC), (40, FA)]), // length 4, 40 days
        ];
        let hist = switch_histograms(&corpus);
        assert_eq!(hist.by_length.get(&3), Some(&1));
        assert_eq!(hist.by_length.get(&4), Some(&1));
        assert_eq!(hist.rapid_count, 1);
        assert_eq!(hist.per_article.get(&1), Some(&2));
    }

    #[test]
    fn turnaround_of_exactly_15_days_is_not_rapid() {
        let corpus = vec![traj_at(&[(0, BC), (5, SS), (20, BC)])];
        assert_eq!(switch_histograms(&corpus).rapid_count, 0);
    }

    #[test]
    fn nochange_iff_no_switches_and_no_transitions() {
        let cases = [
            traj(&[SS]),
            traj(&[SS, SS]),
            traj(&[SS, BC]),
            traj(&[BC, SS, BC]),
        ];
        for t in &cases {
            let kind = classify_trajectory(t).unwrap();
            let no_change = kind == TrajectoryKind::NoChange;
            let no_switches = find_cyclic_switches(t).is_empty();
            let no_transitions = transition_stats(std::slice::from_ref(t)).is_empty();
            assert_eq!(no_change, no_transitions);
            if no_change {
                assert!(no_switches);
            }
        }
    }
}
