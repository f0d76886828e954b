//! Randomized invariant checks: each algorithm is compared against an
//! independent brute-force reference or a structural invariant.

use proptest::prelude::*;

use qcpd_core::cpd::{detect_pelt, oracle_optimal_segmentation, Bandwidth, CostKind, CostModel};
use qcpd_core::evaluation::match_true_positives;
use qcpd_core::features::contribution_features;
use qcpd_core::model::{MonthCalendar, PageHistory, PageKind, Revision};
use qcpd_core::trajectory::{find_cyclic_switches, QualityTrajectory};
use qcpd_core::wikitext::parse_wikitext_markers;
use qcpd_core::QualityClass;

use chrono::{DateTime, TimeZone, Utc};

fn series_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    // N <= 30 rows so the oracle applies, up to 3 dimensions.
    (1usize..=3)
        .prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), 4..=30))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// PELT with pruning finds exactly the oracle's optimum.
    #[test]
    fn pelt_matches_exhaustive_dp(series in series_strategy(), pen_idx in 0usize..3) {
        let penalty = [0.5, 1.0, 2.0][pen_idx];
        let cost = CostModel::new(&series, CostKind::Rbf, Bandwidth::Auto).unwrap();
        let pelt = detect_pelt(&cost, penalty, 1);
        let oracle = oracle_optimal_segmentation(&cost, penalty, 1).unwrap();
        prop_assert_eq!(pelt, oracle.change_points);
    }
}

fn day(n: i64) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2010, 1, 1, 0, 0, 0).unwrap() + chrono::Duration::days(n)
}

/// Reference cycle finder by full O(n^3) enumeration: every (i, j) with
/// j >= i + 2, equal endpoint classes, and no intermediate occurrence of
/// the endpoint class.
fn brute_force_cycles(classes: &[QualityClass]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..classes.len() {
        for j in i + 2..classes.len() {
            if classes[j] != classes[i] {
                continue;
            }
            if (i + 1..j).all(|k| classes[k] != classes[i]) {
                out.push((i, j));
            }
        }
    }
    out
}

fn class_strategy() -> impl Strategy<Value = Vec<QualityClass>> {
    prop::collection::vec(0usize..4, 1..=12)
        .prop_map(|ranks| ranks.into_iter().map(|r| QualityClass::ALL[r]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cyclic_switches_match_brute_force(classes in class_strategy()) {
        // Deduplicate adjacent repeats the same way the trajectory does.
        let mut deduped: Vec<QualityClass> = Vec::new();
        for c in &classes {
            if deduped.last() != Some(c) {
                deduped.push(*c);
            }
        }
        let t = QualityTrajectory {
            article_id: "p".into(),
            labeled: classes
                .iter()
                .enumerate()
                .map(|(i, &c)| (day(i as i64 * 30), c))
                .collect(),
            creation_time: day(0),
        };
        let found = find_cyclic_switches(&t);
        let expected = brute_force_cycles(&deduped);
        prop_assert_eq!(found.len(), expected.len());
        for (s, &(i, j)) in found.iter().zip(&expected) {
            prop_assert_eq!(s.length, j - i + 1);
            prop_assert_eq!(s.class_sequence[0], deduped[i]);
            prop_assert_eq!(*s.class_sequence.last().unwrap(), deduped[j]);
        }
    }
}

type RevSpec = (u16, u8, bool);

fn history_from(specs: &[RevSpec], kind: PageKind) -> Vec<Revision> {
    specs
        .iter()
        .map(|&(d, editor, registered)| Revision {
            timestamp: day(d as i64 % 700),
            editor_id: if registered {
                format!("user{}", editor % 8)
            } else {
                format!("10.0.0.{}", editor % 8)
            },
            registered,
            page_kind: kind,
            wikitext: String::new(),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// New registered editors are a subset of distinct registered editors,
    /// on both the talk and main pages, in every month.
    #[test]
    fn new_editors_never_exceed_distinct(
        main in prop::collection::vec(any::<RevSpec>(), 1..40),
        talk in prop::collection::vec(any::<RevSpec>(), 0..40),
    ) {
        let history = PageHistory::new(
            "p",
            history_from(&main, PageKind::Main),
            history_from(&talk, PageKind::Talk),
        )
        .unwrap();
        let cal = MonthCalendar::new(2010, 1, 24).unwrap();
        for month in 1..=cal.n_months {
            let f = contribution_features(&history, &cal, month);
            prop_assert!(f[1] <= f[0], "talk: new {} > distinct {}", f[1], f[0]);
            prop_assert!(f[4] <= f[3], "main: new {} > distinct {}", f[4], f[3]);
            prop_assert!(f.iter().all(|v| *v >= 0.0));
        }
    }
}

/// Maximum bipartite matching size between ground-truth points and
/// predictions within margin, by exhaustive recursion.
fn max_matching(gt: &[usize], pred: &[usize], m: usize, used: &mut Vec<bool>) -> usize {
    let Some((&g, rest)) = gt.split_first() else {
        return 0;
    };
    // Either g stays unmatched...
    let mut best = max_matching(rest, pred, m, used);
    // ...or it takes any admissible unused prediction.
    for (i, &q) in pred.iter().enumerate() {
        if !used[i] && g.abs_diff(q) <= m {
            used[i] = true;
            best = best.max(1 + max_matching(rest, pred, m, used));
            used[i] = false;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Greedy smallest-admissible matching is cardinality-optimal on
    /// interval constraints with sorted ground truth.
    #[test]
    fn greedy_matching_is_maximum(
        gt in prop::collection::btree_set(1usize..80, 0..6),
        pred in prop::collection::btree_set(1usize..80, 0..6),
        margin in 0usize..8,
    ) {
        let gt: Vec<usize> = gt.iter().copied().collect();
        let pred: Vec<usize> = pred.iter().copied().collect();
        let greedy = match_true_positives(&gt, &pred, margin).len();
        let mut used = vec![false; pred.len()];
        let optimal = max_matching(&gt, &pred, margin, &mut used);
        prop_assert_eq!(greedy, optimal, "gt {:?} pred {:?} margin {}", gt, pred, margin);
    }
}

const FRAGMENTS: &[(&str, (usize, usize, usize))] = &[
    // (snippet, (refs, wikilinks, categories))
    ("Plain prose sentence.", (0, 0, 0)),
    ("See [[Paris]] and [[Rome|the capital]].", (0, 2, 0)),
    ("Claim.<ref>Source</ref>", (1, 0, 0)),
    ("Sourced.<ref name=\"a\"/>", (1, 0, 0)),
    ("[[Category:Cities]]", (0, 0, 1)),
    ("{{cite web|url=http://x|title=T}}", (0, 0, 0)),
    ("== Section ==", (0, 0, 0)),
    ("[[File:Photo.jpg|thumb|caption]]", (0, 0, 0)),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Marker counts over a concatenation of known fragments equal the sum
    /// of the fragments' hand-counted refs, wikilinks, and categories.
    #[test]
    fn marker_counts_are_additive_over_fragments(picks in prop::collection::vec(0usize..FRAGMENTS.len(), 0..20)) {
        let text: Vec<&str> = picks.iter().map(|&i| FRAGMENTS[i].0).collect();
        let text = text.join("\n");
        let counts = parse_wikitext_markers(&text);
        let expected = picks.iter().fold((0, 0, 0), |acc, &i| {
            let (r, w, c) = FRAGMENTS[i].1;
            (acc.0 + r, acc.1 + w, acc.2 + c)
        });
        prop_assert_eq!(counts.refs, expected.0);
        prop_assert_eq!(counts.wikilinks, expected.1);
        prop_assert_eq!(counts.categories, expected.2);
        prop_assert_eq!(counts.byte_length, text.len());
    }
}
