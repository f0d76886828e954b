//! Wikitext marker extraction and plain-text stripping.
//!
//! This is not a full MediaWiki parser. It counts the structural markers the
//! feature set needs (refs, links, templates, headings) with nesting-aware
//! brace/bracket scanning, and never fails on malformed markup: unbalanced
//! constructs simply do not count.

use serde::{Deserialize, Serialize};

use crate::model::RawClass;

/// Structural marker counts of one revision's wikitext.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerCounts {
    pub refs: usize,
    pub wikilinks: usize,
    pub external_links: usize,
    pub citation_templates: usize,
    pub noncitation_templates: usize,
    pub categories: usize,
    pub images: usize,
    pub level2_headings: usize,
    pub level3plus_headings: usize,
    pub has_infobox: bool,
    pub byte_length: usize,
}

/// Finds the byte offset just past the matching `}}` / `]]` for the opener
/// at `start` (which points at the first byte of the opener).
fn find_matching(bytes: &[u8], start: usize, open: &[u8; 2], close: &[u8; 2]) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = start;
    while i + 1 < bytes.len() {
        if bytes[i] == open[0] && bytes[i + 1] == open[1] {
            depth += 1;
            i += 2;
        } else if bytes[i] == close[0] && bytes[i + 1] == close[1] {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}

fn starts_with_ci(s: &str, prefix: &str) -> bool {
    s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix)
}

/// True for `<ref` openers: `<ref>`, `<ref name=x>`, `<ref/>`.
fn is_ref_open(bytes: &[u8], i: usize) -> bool {
    if i + 4 > bytes.len() || bytes[i] != b'<' {
        return false;
    }
    if !bytes[i + 1..i + 4].eq_ignore_ascii_case(b"ref") {
        return false;
    }
    matches!(
        bytes.get(i + 4),
        Some(b'>') | Some(b' ') | Some(b'/') | Some(b'\t') | Some(b'\n')
    )
}

/// Splits template or link body on top-level `|`.
fn split_top_level(body: &str) -> Vec<&str> {
    let bytes = body.as_bytes();
    let mut parts = Vec::new();
    let mut depth_brace = 0usize;
    let mut depth_bracket = 0usize;
    let mut start = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'{' if bytes.get(i + 1) == Some(&b'{') => {
                depth_brace += 1;
                i += 2;
            }
            b'}' if bytes.get(i + 1) == Some(&b'}') => {
                depth_brace = depth_brace.saturating_sub(1);
                i += 2;
            }
            b'[' if bytes.get(i + 1) == Some(&b'[') => {
                depth_bracket += 1;
                i += 2;
            }
            b']' if bytes.get(i + 1) == Some(&b']') => {
                depth_bracket = depth_bracket.saturating_sub(1);
                i += 2;
            }
            b'|' if depth_brace == 0 && depth_bracket == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
                i += 1;
            }
            _ => i += 1,
        }
    }
    parts.push(&body[start..]);
    parts
}

fn classify_template(inner: &str, counts: &mut MarkerCounts) {
    let name = split_top_level(inner)[0].trim();
    if starts_with_ci(name, "infobox") {
        // Counted under has_infobox only, not as a non-citation template.
        counts.has_infobox = true;
    } else if starts_with_ci(name, "cite") || starts_with_ci(name, "citation") {
        counts.citation_templates += 1;
    } else {
        counts.noncitation_templates += 1;
    }
}

fn classify_link(inner: &str, counts: &mut MarkerCounts) {
    let target = split_top_level(inner)[0].trim();
    let lower = target.to_ascii_lowercase();
    if lower.starts_with("category:") {
        counts.categories += 1;
    } else if lower.starts_with("file:") || lower.starts_with("image:") {
        counts.images += 1;
    } else if target.contains(':') && !target.starts_with(':') {
        // Other namespace prefix (Talk:, Wikipedia:, interwiki, ...).
    } else {
        counts.wikilinks += 1;
    }
}

fn count_headings(text: &str, counts: &mut MarkerCounts) {
    for line in text.lines() {
        let line = line.trim();
        if line.len() < 4 || !line.starts_with("==") || !line.ends_with("==") {
            continue;
        }
        let level = line.bytes().take_while(|&b| b == b'=').count();
        let trailing = line.bytes().rev().take_while(|&b| b == b'=').count();
        if level + trailing >= line.len() {
            continue; // all '=' characters, not a heading
        }
        match level.min(trailing) {
            0 | 1 => {}
            2 => counts.level2_headings += 1,
            _ => counts.level3plus_headings += 1,
        }
    }
}

/// Counts structural markers in raw wikitext. Never fails: unbalanced
/// braces or brackets count completed constructs only.
pub fn parse_wikitext_markers(text: &str) -> MarkerCounts {
    let mut counts = MarkerCounts {
        byte_length: text.len(),
        ..Default::default()
    };
    let bytes = text.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i] == b'{' && bytes.get(i + 1) == Some(&b'{') {
            match find_matching(bytes, i, b"{{", b"}}") {
                Some(end) => {
                    classify_template(&text[i + 2..end - 2], &mut counts);
                    i = end;
                }
                None => i += 2,
            }
        } else if bytes[i] == b'[' && bytes.get(i + 1) == Some(&b'[') {
            match find_matching(bytes, i, b"[[", b"]]") {
                Some(end) => {
                    classify_link(&text[i + 2..end - 2], &mut counts);
                    i = end;
                }
                None => i += 2,
            }
        } else if bytes[i] == b'[' && bytes.get(i + 1).is_some_and(|&b| b != b'[') {
            if let Some(rel) = text[i + 1..].find(']') {
                let inner = &text[i + 1..i + 1 + rel];
                if inner.starts_with("http://")
                    || inner.starts_with("https://")
                    || inner.starts_with("//")
                {
                    counts.external_links += 1;
                    i = i + 1 + rel + 1;
                    continue;
                }
            }
            i += 1;
        } else if is_ref_open(bytes, i) {
            counts.refs += 1;
            i += 4;
        } else {
            i += 1;
        }
    }
    count_headings(text, &mut counts);
    counts
}

/// Strips wikitext down to display text for readability scoring.
///
/// Templates, refs, other tags, heading lines, and category/file links are
/// removed; wikilinks keep their display text; external links keep the label.
pub fn plain_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.len() >= 4 && trimmed.starts_with("==") && trimmed.ends_with("==") {
            continue;
        }
        strip_line(line, &mut out);
        out.push('\n');
    }
    out
}

fn strip_line(line: &str, out: &mut String) {
    let bytes = line.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i] == b'{' && bytes.get(i + 1) == Some(&b'{') {
            match find_matching(bytes, i, b"{{", b"}}") {
                Some(end) => i = end,
                None => i = bytes.len(),
            }
        } else if bytes[i] == b'[' && bytes.get(i + 1) == Some(&b'[') {
            match find_matching(bytes, i, b"[[", b"]]") {
                Some(end) => {
                    let inner = &line[i + 2..end - 2];
                    let parts = split_top_level(inner);
                    let target = parts[0].trim().to_ascii_lowercase();
                    let namespaced = target.contains(':');
                    if !namespaced {
                        out.push_str(parts.last().unwrap().trim());
                    }
                    i = end;
                }
                None => i = bytes.len(),
            }
        } else if bytes[i] == b'[' {
            if let Some(rel) = line[i + 1..].find(']') {
                let inner = &line[i + 1..i + 1 + rel];
                if inner.starts_with("http") || inner.starts_with("//") {
                    if let Some(space) = inner.find(' ') {
                        out.push_str(inner[space + 1..].trim());
                    }
                    i = i + 1 + rel + 1;
                    continue;
                }
            }
            out.push('[');
            i += 1;
        } else if is_ref_open(bytes, i) {
            // Skip to </ref> or a self-closing />.
            let rest = &line[i..];
            let close = rest
                .as_bytes()
                .windows(6)
                .position(|w| w.eq_ignore_ascii_case(b"</ref>"));
            let self_close = rest.find("/>");
            let open_end = rest.find('>');
            match (close, self_close, open_end) {
                (_, Some(s), Some(o)) if s + 1 == o => i += o + 1,
                (Some(c), _, _) => i += c + 6,
                _ => i = bytes.len(),
            }
        } else if bytes[i] == b'<' {
            match line[i..].find('>') {
                Some(rel) => i += rel + 1,
                None => {
                    out.push('<');
                    i += 1;
                }
            }
        } else if bytes[i] == b'\'' && bytes.get(i + 1) == Some(&b'\'') {
            while i < bytes.len() && bytes[i] == b'\'' {
                i += 1;
            }
        } else {
            let ch = line[i..].chars().next().unwrap();
            out.push(ch);
            i += ch.len_utf8();
        }
    }
}

/// First parseable `class=` parameter among the text's top-level templates,
/// in document order. This is how assessment banners on talk pages carry
/// quality labels.
pub fn banner_class(text: &str) -> Option<RawClass> {
    let bytes = text.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i] == b'{' && bytes.get(i + 1) == Some(&b'{') {
            match find_matching(bytes, i, b"{{", b"}}") {
                Some(end) => {
                    let inner = &text[i + 2..end - 2];
                    for part in split_top_level(inner).into_iter().skip(1) {
                        if let Some((key, value)) = part.split_once('=') {
                            if key.trim().eq_ignore_ascii_case("class") {
                                if let Ok(raw) = RawClass::parse(value) {
                                    return Some(raw);
                                }
                            }
                        }
                    }
                    i = end;
                }
                None => i += 2,
            }
        } else {
            i += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_fixture_counts() {
        let c = parse_wikitext_markers("== History ==\n[[Paris]] <ref>x</ref> {{cite web}}");
        assert_eq!(c.level2_headings, 1);
        assert_eq!(c.wikilinks, 1);
        assert_eq!(c.refs, 1);
        assert_eq!(c.citation_templates, 1);
        assert_eq!(c.noncitation_templates, 0);
    }

    #[test]
    fn empty_text_all_zero() {
        let c = parse_wikitext_markers("");
        assert_eq!(c, MarkerCounts::default());
        assert!(!c.has_infobox);
    }

    #[test]
    fn infobox_and_category() {
        let c = parse_wikitext_markers("{{Infobox person|name=X}}[[Category:People]]");
        assert!(c.has_infobox);
        assert_eq!(c.categories, 1);
        assert_eq!(c.noncitation_templates, 0);
        assert_eq!(c.wikilinks, 0);
    }

    #[test]
    fn nested_templates_count_once() {
        let c = parse_wikitext_markers("{{outer|a={{inner}}|b=2}}");
        assert_eq!(c.noncitation_templates, 1);
    }

    #[test]
    fn files_images_and_namespaced_links() {
        let c = parse_wikitext_markers(
            "[[File:A.png|thumb]] [[Image:B.jpg]] [[Wikipedia:MOS]] [[Paris|the city]]",
        );
        assert_eq!(c.images, 2);
        assert_eq!(c.wikilinks, 1);
        assert_eq!(c.categories, 0);
    }

    #[test]
    fn heading_levels() {
        let c = parse_wikitext_markers("== A ==\n=== B ===\n==== C ====\n= D =\n");
        assert_eq!(c.level2_headings, 1);
        assert_eq!(c.level3plus_headings, 2);
    }

    #[test]
    fn self_closing_and_named_refs() {
        let c = parse_wikitext_markers("<ref name=a/> text <ref name=\"b\">x</ref> <REF>y</REF>");
        assert_eq!(c.refs, 3);
    }

    #[test]
    fn unbalanced_braces_never_fail() {
        let c = parse_wikitext_markers("{{cite web|title=x [[Link]] == H ==");
        assert_eq!(c.citation_templates, 0);
        assert_eq!(c.wikilinks, 1);
    }

    #[test]
    fn byte_length_is_utf8_bytes() {
        assert_eq!(parse_wikitext_markers("héllo").byte_length, 6);
    }

    #[test]
    fn external_links_counted() {
        let c = parse_wikitext_markers("[https://example.org Site] [not a link]");
        assert_eq!(c.external_links, 1);
    }

    #[test]
    fn plain_text_keeps_display_text() {
        let p = plain_text("== History ==\nThe [[Paris|city]] was {{cite web}} great.<ref>x</ref>");
        assert!(p.contains("The city was  great."));
        assert!(!p.contains("History"));
        assert!(!p.contains("cite"));
    }

    #[test]
    fn plain_text_drops_file_and_category_links() {
        let p = plain_text("[[File:A.png|thumb|caption]] [[Category:X]] kept");
        assert!(p.contains("kept"));
        assert!(!p.contains("caption"));
        assert!(!p.contains("Category"));
    }

    #[test]
    fn banner_class_parses_case_and_spaces() {
        assert_eq!(
            banner_class("{{WikiProject France|class=GA|importance=high}}"),
            Some(RawClass::GA)
        );
        assert_eq!(
            banner_class("{{WikiProject X|class = start}}"),
            Some(RawClass::Start)
        );
        assert_eq!(banner_class("{{WikiProject X|importance=low}}"), None);
        assert_eq!(banner_class("no templates here"), None);
    }

    #[test]
    fn banner_class_first_in_document_order() {
        let text = "{{WikiProject A|class=B}}{{WikiProject C|class=FA}}";
        assert_eq!(banner_class(text), Some(RawClass::B));
    }

    #[test]
    fn banner_unparseable_class_is_skipped() {
        assert_eq!(
            banner_class("{{WikiProject A|class=Unknown}}{{WikiProject B|class=C}}"),
            Some(RawClass::C)
        );
    }
}
