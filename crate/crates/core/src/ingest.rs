//! Ingestion: streaming MediaWiki export XML into page histories, quality
//! label extraction from talk-page banners, and the JSONL interchange
//! formats.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use chrono::{DateTime, Utc};
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::error::{QcpdError, Result};
use crate::model::{
    LabelRecord, PageHistory, PageKind, QualityLabelEvent, RawClass, Revision, RevisionRecord,
};
use crate::wikitext::banner_class;

#[derive(Default)]
struct RevisionDraft {
    timestamp: Option<DateTime<Utc>>,
    username: Option<String>,
    ip: Option<String>,
    text: String,
}

/// Streams a MediaWiki export XML file into page histories. Talk pages
/// (title prefix `Talk:`) are paired with their subject page; the returned
/// histories are keyed by the subject title. Unknown elements are skipped;
/// malformed XML fails with the byte offset.
pub fn parse_mediawiki_xml<R: BufRead>(reader: R) -> Result<Vec<PageHistory>> {
    let mut xml = Reader::from_reader(reader);

    let mut buf = Vec::new();
    let mut path: Vec<String> = Vec::new();
    let mut title = String::new();
    let mut draft = RevisionDraft::default();
    let mut page_revisions: Vec<Revision> = Vec::new();
    // subject title -> (main, talk)
    let mut pages: BTreeMap<String, (Vec<Revision>, Vec<Revision>)> = BTreeMap::new();

    loop {
        let event = xml.read_event_into(&mut buf).map_err(|e| QcpdError::Xml {
            offset: xml.buffer_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if name == "page" {
                    title.clear();
                    page_revisions.clear();
                } else if name == "revision" {
                    draft = RevisionDraft::default();
                }
                path.push(name);
            }
            Event::Empty(_) => {}
            Event::Text(ref t) => {
                let text = t.unescape().map_err(|e| QcpdError::Xml {
                    offset: xml.buffer_position(),
                    message: e.to_string(),
                })?;
                match path.last().map(String::as_str) {
                    Some("title") if path.len() >= 2 => title.push_str(&text),
                    Some("timestamp") if in_revision(&path) => {
                        let parsed = DateTime::parse_from_rfc3339(text.trim()).map_err(|e| {
                            QcpdError::Xml {
                                offset: xml.buffer_position(),
                                message: format!("bad timestamp {:?}: {e}", text.trim()),
                            }
                        })?;
                        draft.timestamp = Some(parsed.with_timezone(&Utc));
                    }
                    Some("username") if in_contributor(&path) => {
                        draft.username = Some(text.trim().to_string());
                    }
                    Some("ip") if in_contributor(&path) => {
                        draft.ip = Some(text.trim().to_string());
                    }
                    Some("text") if in_revision(&path) => draft.text.push_str(&text),
                    _ => {}
                }
            }
            Event::End(ref e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if name == "revision" {
                    if let Some(rev) = finish_revision(std::mem::take(&mut draft), &title) {
                        page_revisions.push(rev);
                    }
                } else if name == "page" && !title.is_empty() {
                    let (subject, is_talk) = split_talk_title(&title);
                    let entry = pages.entry(subject.to_string()).or_default();
                    let target = if is_talk { &mut entry.1 } else { &mut entry.0 };
                    target.append(&mut page_revisions);
                }
                path.pop();
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    pages
        .into_iter()
        .filter(|(_, (main, talk))| !main.is_empty() || !talk.is_empty())
        .map(|(subject, (main, talk))| PageHistory::new(subject, main, talk))
        .collect()
}

fn in_revision(path: &[String]) -> bool {
    path.iter().any(|p| p == "revision")
}

fn in_contributor(path: &[String]) -> bool {
    path.iter().any(|p| p == "contributor")
}

fn split_talk_title(title: &str) -> (&str, bool) {
    match title.strip_prefix("Talk:") {
        Some(subject) => (subject, true),
        None => (title, false),
    }
}

fn finish_revision(draft: RevisionDraft, title: &str) -> Option<Revision> {
    let timestamp = draft.timestamp?;
    let (registered, editor_id) = match (draft.username, draft.ip) {
        (_, Some(ip)) => (false, ip),
        (Some(user), None) => (true, user),
        (None, None) => return None,
    };
    let (_, is_talk) = split_talk_title(title);
    Some(Revision {
        timestamp,
        editor_id,
        registered,
        page_kind: if is_talk {
            PageKind::Talk
        } else {
            PageKind::Main
        },
        wikitext: draft.text,
    })
}

/// Scans talk revisions for assessment-banner `class=` parameters and emits
/// an event whenever the parsed class differs from the previous revision's
/// parsed class. Revisions without a parseable class are ignored.
pub fn extract_quality_labels(talk_revisions: &[Revision]) -> Vec<QualityLabelEvent> {
    let mut events = Vec::new();
    let mut previous: Option<RawClass> = None;
    for rev in talk_revisions {
        if let Some(raw) = banner_class(&rev.wikitext) {
            if previous != Some(raw) {
                events.push(QualityLabelEvent::new(rev.timestamp, raw));
            }
            previous = Some(raw);
        }
    }
    events
}

/// Writes one history as revision JSONL (main then talk, each time-ordered).
pub fn write_revisions_jsonl<W: Write>(w: &mut W, history: &PageHistory) -> Result<()> {
    for rev in history.main_revisions.iter().chain(&history.talk_revisions) {
        let record = RevisionRecord::from_revision(&history.article_id, rev);
        serde_json::to_writer(&mut *w, &record)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads revision JSONL back into per-article histories.
pub fn read_revisions_jsonl<R: BufRead>(r: R) -> Result<Vec<PageHistory>> {
    let mut pages: BTreeMap<String, (Vec<Revision>, Vec<Revision>)> = BTreeMap::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RevisionRecord = serde_json::from_str(&line)?;
        let entry = pages.entry(record.article_id.clone()).or_default();
        let rev = record.into_revision();
        match rev.page_kind {
            PageKind::Main => entry.0.push(rev),
            PageKind::Talk => entry.1.push(rev),
        }
    }
    pages
        .into_iter()
        .map(|(id, (main, talk))| PageHistory::new(id, main, talk))
        .collect()
}

/// Writes quality labels for one article as JSONL.
pub fn write_labels_jsonl<W: Write>(
    w: &mut W,
    article_id: &str,
    events: &[QualityLabelEvent],
) -> Result<()> {
    for ev in events {
        let record = LabelRecord {
            article_id: article_id.to_string(),
            ts: ev.timestamp,
            class: format!("{:?}", ev.raw_class),
        };
        serde_json::to_writer(&mut *w, &record)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads label JSONL into per-article, time-ordered event lists.
pub fn read_labels_jsonl<R: BufRead>(r: R) -> Result<BTreeMap<String, Vec<QualityLabelEvent>>> {
    let mut out: BTreeMap<String, Vec<QualityLabelEvent>> = BTreeMap::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LabelRecord = serde_json::from_str(&line)?;
        let raw = RawClass::parse(&record.class)?;
        out.entry(record.article_id)
            .or_default()
            .push(QualityLabelEvent::new(record.ts, raw));
    }
    for events in out.values_mut() {
        events.sort_by_key(|e| e.timestamp);
    }
    Ok(out)
}
