//! Canonical data model: revisions, quality labels, class merging, the
//! monthly calendar, and ground-truth change-point construction.

use chrono::{DateTime, Datelike, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{QcpdError, Result};

/// Raw Wikipedia assessment class, before merging.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RawClass {
    FA,
    A,
    GA,
    B,
    C,
    Start,
    Stub,
}

impl RawClass {
    /// Parses a raw class token, case-insensitively.
    pub fn parse(token: &str) -> Result<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "fa" => Ok(RawClass::FA),
            "a" => Ok(RawClass::A),
            "ga" => Ok(RawClass::GA),
            "b" => Ok(RawClass::B),
            "c" => Ok(RawClass::C),
            "start" => Ok(RawClass::Start),
            "stub" => Ok(RawClass::Stub),
            _ => Err(QcpdError::UnknownQualityClass(token.to_string())),
        }
    }
}

/// Merged quality class, totally ordered FA > AGA > BC > SS.
///
/// `Ord` follows quality: `SS < BC < AGA < FA`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QualityClass {
    SS,
    BC,
    AGA,
    FA,
}

impl QualityClass {
    /// Rank in increasing quality: SS=0, BC=1, AGA=2, FA=3.
    pub fn rank(self) -> u8 {
        self as u8
    }

    /// Canonical raw representative of the merged class.
    pub fn canonical_raw(self) -> RawClass {
        match self {
            QualityClass::FA => RawClass::FA,
            QualityClass::AGA => RawClass::GA,
            QualityClass::BC => RawClass::B,
            QualityClass::SS => RawClass::Stub,
        }
    }

    pub const ALL: [QualityClass; 4] = [
        QualityClass::SS,
        QualityClass::BC,
        QualityClass::AGA,
        QualityClass::FA,
    ];
}

impl std::fmt::Display for QualityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            QualityClass::FA => "FA",
            QualityClass::AGA => "AGA",
            QualityClass::BC => "BC",
            QualityClass::SS => "SS",
        };
        f.write_str(s)
    }
}

/// Merges a raw assessment class into the four-class scheme:
/// FA→FA, A/GA→AGA, B/C→BC, Start/Stub→SS.
pub fn merge_quality_class(raw: RawClass) -> QualityClass {
    match raw {
        RawClass::FA => QualityClass::FA,
        RawClass::A | RawClass::GA => QualityClass::AGA,
        RawClass::B | RawClass::C => QualityClass::BC,
        RawClass::Start | RawClass::Stub => QualityClass::SS,
    }
}

/// Which page the revision belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PageKind {
    Main,
    Talk,
}

/// One edit event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Revision {
    pub timestamp: DateTime<Utc>,
    pub editor_id: String,
    pub registered: bool,
    pub page_kind: PageKind,
    pub wikitext: String,
}

/// Full revision history of one article: main page plus its talk page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageHistory {
    pub article_id: String,
    pub main_revisions: Vec<Revision>,
    pub talk_revisions: Vec<Revision>,
    pub creation_time: DateTime<Utc>,
}

impl PageHistory {
    /// Builds a history, sorting both lists by timestamp (stable) and
    /// deriving `creation_time` from the earliest revision.
    pub fn new(
        article_id: impl Into<String>,
        mut main_revisions: Vec<Revision>,
        mut talk_revisions: Vec<Revision>,
    ) -> Result<Self> {
        main_revisions.sort_by_key(|r| r.timestamp);
        talk_revisions.sort_by_key(|r| r.timestamp);
        let creation_time = main_revisions
            .first()
            .map(|r| r.timestamp)
            .into_iter()
            .chain(talk_revisions.first().map(|r| r.timestamp))
            .min()
            .ok_or_else(|| QcpdError::invalid("page history has no revisions"))?;
        Ok(PageHistory {
            article_id: article_id.into(),
            main_revisions,
            talk_revisions,
            creation_time,
        })
    }
}

/// A quality assessment event on the talk page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityLabelEvent {
    pub timestamp: DateTime<Utc>,
    pub raw_class: RawClass,
    pub merged_class: QualityClass,
}

impl QualityLabelEvent {
    pub fn new(timestamp: DateTime<Utc>, raw_class: RawClass) -> Self {
        QualityLabelEvent {
            timestamp,
            raw_class,
            merged_class: merge_quality_class(raw_class),
        }
    }
}

/// Monthly study calendar. Month indices are 1-based, `1..=n_months`.
///
/// The default calendar is 156 months ending 2019-06.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthCalendar {
    pub start_year: i32,
    /// 1-based calendar month of the first study month.
    pub start_month: u32,
    pub n_months: usize,
}

impl Default for MonthCalendar {
    fn default() -> Self {
        // 156 months ending 2019-06.
        MonthCalendar {
            start_year: 2006,
            start_month: 7,
            n_months: 156,
        }
    }
}

impl MonthCalendar {
    pub fn new(start_year: i32, start_month: u32, n_months: usize) -> Result<Self> {
        if !(1..=12).contains(&start_month) {
            return Err(QcpdError::invalid("start month must be in 1..=12"));
        }
        if n_months < 2 {
            return Err(QcpdError::invalid("calendar needs at least 2 months"));
        }
        Ok(MonthCalendar {
            start_year,
            start_month,
            n_months,
        })
    }

    fn absolute_start(&self) -> i64 {
        self.start_year as i64 * 12 + (self.start_month as i64 - 1)
    }

    /// Maps an instant to its 1-based month index, or `None` when it falls
    /// outside the study window.
    pub fn month_index(&self, t: DateTime<Utc>) -> Option<usize> {
        let abs = t.year() as i64 * 12 + (t.month() as i64 - 1);
        let offset = abs - self.absolute_start();
        if offset < 0 || offset >= self.n_months as i64 {
            None
        } else {
            Some(offset as usize + 1)
        }
    }

    /// (year, month) of a 1-based month index.
    pub fn year_month(&self, index: usize) -> (i32, u32) {
        let abs = self.absolute_start() + (index as i64 - 1);
        (abs.div_euclid(12) as i32, abs.rem_euclid(12) as u32 + 1)
    }

    /// Number of days in the calendar month at `index`.
    pub fn days_in_month(&self, index: usize) -> u32 {
        let (y, m) = self.year_month(index);
        let (ny, nm) = if m == 12 { (y + 1, 1) } else { (y, m + 1) };
        let first = Utc.with_ymd_and_hms(y, m, 1, 0, 0, 0).unwrap();
        let next = Utc.with_ymd_and_hms(ny, nm, 1, 0, 0, 0).unwrap();
        (next - first).num_days() as u32
    }
}

/// Strictly increasing month indices at which quality changed.
///
/// The bookends (month 1 and `n_months + 1`) are implicit: they are used for
/// segment construction only and never counted as change points. Every stored
/// point `q` satisfies `1 < q <= n_months`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChangePointSet {
    points: Vec<usize>,
}

impl ChangePointSet {
    pub fn new(points: Vec<usize>, n_months: usize) -> Result<Self> {
        for w in points.windows(2) {
            if w[0] >= w[1] {
                return Err(QcpdError::invalid(
                    "change points must be strictly increasing",
                ));
            }
        }
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            if first <= 1 || last > n_months {
                return Err(QcpdError::invalid(format!(
                    "change points must lie in (1, {n_months}]"
                )));
            }
        }
        Ok(ChangePointSet { points })
    }

    pub fn empty() -> Self {
        ChangePointSet { points: Vec::new() }
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segment boundaries including bookends: `[1, q_1, .., q_n, N+1]`.
    /// Segment `i` spans months `b[i] ..= b[i+1]-1`.
    pub fn boundaries(&self, n_months: usize) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.points.len() + 2);
        b.push(1);
        b.extend_from_slice(&self.points);
        b.push(n_months + 1);
        b
    }
}

/// Picks, for every month of the calendar, the latest revision falling in
/// that month. Equal timestamps keep the later element in input order.
pub fn bin_monthly<'a>(
    revisions: &'a [Revision],
    cal: &MonthCalendar,
) -> Vec<Option<&'a Revision>> {
    let mut out: Vec<Option<&Revision>> = vec![None; cal.n_months];
    for rev in revisions {
        if let Some(idx) = cal.month_index(rev.timestamp) {
            let slot = &mut out[idx - 1];
            match slot {
                Some(prev) if prev.timestamp > rev.timestamp => {}
                _ => *slot = Some(rev),
            }
        }
    }
    out
}

/// Month indices of every merged-class change in a time-ordered label
/// sequence. Multiple changes landing in one month collapse to one point;
/// the first assessment is not a change.
pub fn ground_truth_changepoints(
    events: &[QualityLabelEvent],
    cal: &MonthCalendar,
) -> ChangePointSet {
    let mut points = Vec::new();
    let mut prev_class: Option<QualityClass> = None;
    for ev in events {
        if let Some(prev) = prev_class {
            if prev != ev.merged_class {
                if let Some(idx) = cal.month_index(ev.timestamp) {
                    if idx > 1 && points.last() != Some(&idx) {
                        points.push(idx);
                    }
                }
            }
        }
        prev_class = Some(ev.merged_class);
    }
    ChangePointSet { points }
}

/// One line of the revision JSONL interchange format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub article_id: String,
    pub ts: DateTime<Utc>,
    pub editor: String,
    pub registered: bool,
    pub kind: PageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl RevisionRecord {
    pub fn from_revision(article_id: &str, rev: &Revision) -> Self {
        RevisionRecord {
            article_id: article_id.to_string(),
            ts: rev.timestamp,
            editor: rev.editor_id.clone(),
            registered: rev.registered,
            kind: rev.page_kind,
            text: if rev.wikitext.is_empty() {
                None
            } else {
                Some(rev.wikitext.clone())
            },
        }
    }

    pub fn into_revision(self) -> Revision {
        Revision {
            timestamp: self.ts,
            editor_id: self.editor,
            registered: self.registered,
            page_kind: self.kind,
            wikitext: self.text.unwrap_or_default(),
        }
    }
}

/// One line of the quality-label JSONL interchange format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelRecord {
    pub article_id: String,
    pub ts: DateTime<Utc>,
    pub class: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(y: i32, m: u32, d: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).unwrap()
    }

    fn rev(y: i32, m: u32, d: u32, editor: &str) -> Revision {
        Revision {
            timestamp: ts(y, m, d),
            editor_id: editor.to_string(),
            registered: true,
            page_kind: PageKind::Main,
            wikitext: String::new(),
        }
    }

    #[test]
    fn merging_follows_the_clubbing_scheme() {
        assert_eq!(merge_quality_class(RawClass::FA), QualityClass::FA);
        assert_eq!(merge_quality_class(RawClass::A), QualityClass::AGA);
        assert_eq!(merge_quality_class(RawClass::GA), QualityClass::AGA);
        assert_eq!(merge_quality_class(RawClass::B), QualityClass::BC);
        assert_eq!(merge_quality_class(RawClass::C), QualityClass::BC);
        assert_eq!(merge_quality_class(RawClass::Start), QualityClass::SS);
        assert_eq!(merge_quality_class(RawClass::Stub), QualityClass::SS);
    }

    #[test]
    fn merging_is_idempotent_through_canonical_raw() {
        for class in QualityClass::ALL {
            assert_eq!(merge_quality_class(class.canonical_raw()), class);
        }
    }

    #[test]
    fn quality_order_matches_the_hierarchy() {
        assert!(QualityClass::FA > QualityClass::AGA);
        assert!(QualityClass::AGA > QualityClass::BC);
        assert!(QualityClass::BC > QualityClass::SS);
    }

    #[test]
    fn unknown_raw_label_is_rejected_with_token() {
        let err = RawClass::parse("Featured").unwrap_err();
        assert!(err.to_string().contains("Featured"));
    }

    #[test]
    fn calendar_default_spans_156_months_ending_2019_06() {
        let cal = MonthCalendar::default();
        assert_eq!(cal.month_index(ts(2006, 7, 1)), Some(1));
        assert_eq!(cal.month_index(ts(2019, 6, 30)), Some(156));
        assert_eq!(cal.month_index(ts(2019, 7, 1)), None);
        assert_eq!(cal.month_index(ts(2006, 6, 30)), None);
        assert_eq!(cal.year_month(156), (2019, 6));
    }

    #[test]
    fn bin_monthly_picks_latest_in_month() {
        let cal = MonthCalendar::default();
        let revs = vec![rev(2010, 3, 3, "a"), rev(2010, 3, 27, "b")];
        let binned = bin_monthly(&revs, &cal);
        let idx = cal.month_index(ts(2010, 3, 1)).unwrap();
        assert_eq!(binned[idx - 1].unwrap().editor_id, "b");
        assert!(binned[idx].is_none());
    }

    #[test]
    fn bin_monthly_tie_break_keeps_later_input_element() {
        let cal = MonthCalendar::default();
        let mut a = rev(2010, 3, 3, "first");
        let b = rev(2010, 3, 3, "second");
        a.timestamp = b.timestamp;
        let revs = [a, b];
        let binned = bin_monthly(&revs, &cal);
        let idx = cal.month_index(ts(2010, 3, 1)).unwrap();
        assert_eq!(binned[idx - 1].unwrap().editor_id, "second");
    }

    #[test]
    fn bin_monthly_empty_history_all_absent() {
        let cal = MonthCalendar::default();
        assert!(bin_monthly(&[], &cal).iter().all(Option::is_none));
    }

    #[test]
    fn ground_truth_single_class_change() {
        let cal = MonthCalendar::default();
        let events = vec![
            QualityLabelEvent::new(ts(2008, 1, 5), RawClass::Stub),
            QualityLabelEvent::new(ts(2010, 5, 9), RawClass::B),
            QualityLabelEvent::new(ts(2011, 1, 2), RawClass::C),
        ];
        let gt = ground_truth_changepoints(&events, &cal);
        let expect = cal.month_index(ts(2010, 5, 1)).unwrap();
        assert_eq!(gt.points(), &[expect]);
    }

    #[test]
    fn ground_truth_collapses_same_month_changes() {
        let cal = MonthCalendar::new(2006, 7, 12).unwrap();
        // Both changes land in study month 3 (2006-09).
        let events = vec![
            QualityLabelEvent::new(ts(2006, 9, 2), RawClass::Stub),
            QualityLabelEvent::new(ts(2006, 9, 10), RawClass::B),
            QualityLabelEvent::new(ts(2006, 9, 20), RawClass::GA),
        ];
        let gt = ground_truth_changepoints(&events, &cal);
        assert_eq!(gt.points(), &[3]);
    }

    #[test]
    fn first_assessment_is_not_a_change() {
        let cal = MonthCalendar::default();
        let events = vec![QualityLabelEvent::new(ts(2010, 5, 9), RawClass::FA)];
        assert!(ground_truth_changepoints(&events, &cal).is_empty());
    }

    #[test]
    fn empty_event_list_yields_empty_set() {
        let cal = MonthCalendar::default();
        assert!(ground_truth_changepoints(&[], &cal).is_empty());
    }

    #[test]
    fn changepoint_set_rejects_unsorted_or_out_of_range() {
        assert!(ChangePointSet::new(vec![5, 3], 10).is_err());
        assert!(ChangePointSet::new(vec![1], 10).is_err());
        assert!(ChangePointSet::new(vec![11], 10).is_err());
        assert!(ChangePointSet::new(vec![2, 10], 10).is_ok());
    }

    #[test]
    fn monthly_label_timeline_reconstructs_from_changepoints() {
        let cal = MonthCalendar::new(2006, 7, 24).unwrap();
        let events = vec![
            QualityLabelEvent::new(ts(2006, 8, 2), RawClass::Stub),
            QualityLabelEvent::new(ts(2007, 3, 2), RawClass::B),
            QualityLabelEvent::new(ts(2008, 1, 2), RawClass::GA),
        ];
        let gt = ground_truth_changepoints(&events, &cal);

        // Direct monthly merged-class sequence (carry forward latest label).
        let mut direct = vec![None; cal.n_months];
        for ev in &events {
            let idx = cal.month_index(ev.timestamp).unwrap();
            for slot in direct.iter_mut().skip(idx - 1) {
                *slot = Some(ev.merged_class);
            }
        }

        // Reconstruction from change points + the per-segment class.
        let classes = [QualityClass::SS, QualityClass::BC, QualityClass::AGA];
        let bounds = gt.boundaries(cal.n_months);
        let first_idx = cal.month_index(events[0].timestamp).unwrap();
        for seg in 0..bounds.len() - 1 {
            for m in bounds[seg]..bounds[seg + 1] {
                if m >= first_idx {
                    assert_eq!(direct[m - 1], Some(classes[seg]));
                }
            }
        }
    }
}
