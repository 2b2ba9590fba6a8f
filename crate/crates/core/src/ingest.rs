//! Raw journal documents to clean paged text.
//!
//! HTML page breaks follow a marker convention, since the source markup
//! has no page structure of its own:
//!
//! * a comment `<!-- page N -->` starts journal page `N`;
//! * a comment `<!-- pagebreak -->`, or any element whose `class` contains
//!   `page-break`, starts the next page. Such an element may carry
//!   `data-page="N"` to number it explicitly.
//!
//! A marker seen before any text renumbers the first page instead of
//! opening a new one. Documents without markers are a single page 1.
//!
//! Plain-text sources separate pages with form feeds (`\x0C`) and are
//! numbered from 1.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;
use thiserror::Error;

use crate::grammar::Grammar;
use crate::model::{DebateMeta, Page};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("invalid {encoding} byte sequence at offset {offset}")]
    Encoding { encoding: &'static str, offset: usize },
    #[error("page marker {found} does not follow page {current}")]
    PageOrder { current: u32, found: u32 },
    #[error("document kind does not match the operation")]
    WrongKind,
}

impl IngestError {
    pub fn rule(&self) -> &'static str {
        match self {
            IngestError::Encoding { .. } => "encoding",
            IngestError::PageOrder { .. } => "page-order",
            IngestError::WrongKind => "wrong-kind",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    #[default]
    Utf8,
    /// ISO-8859-1; every byte maps to the code point of the same value.
    Latin1,
}

impl Encoding {
    pub fn decode(self, bytes: &[u8]) -> Result<String, IngestError> {
        match self {
            Encoding::Utf8 => {
                let (bom, body) = match bytes.strip_prefix(b"\xEF\xBB\xBF") {
                    Some(rest) => (3, rest),
                    None => (0, bytes),
                };
                std::str::from_utf8(body)
                    .map(str::to_string)
                    .map_err(|e| IngestError::Encoding {
                        encoding: "utf-8",
                        offset: bom + e.valid_up_to(),
                    })
            }
            Encoding::Latin1 => Ok(bytes.iter().map(|&b| b as char).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Html,
    PagedText,
}

impl SourceKind {
    /// From a file extension: `html`/`htm` or `txt`.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "html" | "htm" => Some(SourceKind::Html),
            "txt" => Some(SourceKind::PagedText),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub meta: DebateMeta,
    pub body: Vec<u8>,
    pub encoding: Encoding,
    pub kind: SourceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PagedText {
    pub meta: DebateMeta,
    pub pages: Vec<Page>,
}

/// Decodes and splits a document into pages according to its kind.
pub fn ingest(doc: &RawDocument) -> Result<PagedText, IngestError> {
    match doc.kind {
        SourceKind::Html => strip_html(doc),
        SourceKind::PagedText => split_paged_text(doc),
    }
}

pub fn split_paged_text(doc: &RawDocument) -> Result<PagedText, IngestError> {
    if doc.kind != SourceKind::PagedText {
        return Err(IngestError::WrongKind);
    }
    let text = doc.encoding.decode(&doc.body)?;
    let mut chunks: Vec<&str> = text.split('\x0C').collect();
    if chunks.len() > 1 && chunks.last().is_some_and(|c| c.trim().is_empty()) {
        chunks.pop();
    }
    let pages = chunks
        .iter()
        .enumerate()
        .map(|(i, chunk)| Page {
            number: i as u32 + 1,
            lines: chunk
                .strip_prefix('\n')
                .unwrap_or(chunk)
                .lines()
                .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
                .collect(),
        })
        .collect();
    Ok(PagedText {
        meta: doc.meta.clone(),
        pages,
    })
}

const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "dd", "div", "dl", "dt",
    "footer", "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "li",
    "main", "nav", "ol", "p", "pre", "section", "table", "tbody", "td", "th", "thead",
    "title", "tr", "ul",
];

static COMMENT_MARKER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*page(?:[-_ ]?break)?(?:\s*[:=]?\s*(\d+))?\s*$").expect("valid regex")
});
static CLASS_ATTR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)\bclass\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>]+))"#).expect("valid regex")
});
static DATA_PAGE_ATTR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)\bdata-page\s*=\s*["']?(\d+)"#).expect("valid regex")
});

struct PageBuilder {
    pages: Vec<Page>,
    current: Page,
    pending: String,
    seen_text: bool,
}

impl PageBuilder {
    fn new() -> Self {
        PageBuilder {
            pages: Vec::new(),
            current: Page { number: 1, lines: Vec::new() },
            pending: String::new(),
            seen_text: false,
        }
    }

    fn push_text(&mut self, raw: &str) {
        self.pending.push_str(raw);
    }

    fn break_line(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let decoded = html_escape::decode_html_entities(&self.pending);
        let line = decoded.split_whitespace().collect::<Vec<_>>().join(" ");
        self.pending.clear();
        if !line.is_empty() {
            self.current.lines.push(line);
            self.seen_text = true;
        }
    }

    fn page_break(&mut self, number: Option<u32>) -> Result<(), IngestError> {
        self.break_line();
        if !self.seen_text && self.pages.is_empty() {
            if let Some(n) = number.filter(|n| *n >= 1) {
                self.current.number = n;
            }
            return Ok(());
        }
        let next = number.unwrap_or(self.current.number + 1);
        if next <= self.current.number {
            return Err(IngestError::PageOrder {
                current: self.current.number,
                found: next,
            });
        }
        let done = std::mem::replace(&mut self.current, Page { number: next, lines: Vec::new() });
        self.pages.push(done);
        Ok(())
    }

    fn finish(mut self) -> Vec<Page> {
        self.break_line();
        self.pages.push(self.current);
        self.pages
    }
}

/// Finds the end of a tag starting at `start` (which points at `<`),
/// honouring quoted attribute values. Returns the index just past `>`.
fn tag_end(s: &str, start: usize) -> usize {
    let bytes = s.as_bytes();
    let mut quote: Option<u8> = None;
    let mut i = start + 1;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => return i + 1,
            None => {}
        }
        i += 1;
    }
    bytes.len()
}

/// Removes markup, decodes character entities and turns block boundaries
/// into line breaks.
pub fn strip_html(doc: &RawDocument) -> Result<PagedText, IngestError> {
    if doc.kind != SourceKind::Html {
        return Err(IngestError::WrongKind);
    }
    let html = doc.encoding.decode(&doc.body)?;
    Ok(PagedText {
        meta: doc.meta.clone(),
        pages: strip_html_str(&html)?,
    })
}

pub fn strip_html_str(html: &str) -> Result<Vec<Page>, IngestError> {
    let mut b = PageBuilder::new();
    let mut i = 0;
    while i < html.len() {
        let rest = &html[i..];
        let Some(lt) = rest.find('<') else {
            b.push_text(rest);
            break;
        };
        b.push_text(&rest[..lt]);
        i += lt;
        let rest = &html[i..];

        if let Some(body) = rest.strip_prefix("<!--") {
            let end = body.find("-->").map_or(html.len(), |e| i + 4 + e + 3);
            let comment = &body[..body.find("-->").unwrap_or(body.len())];
            if let Some(caps) = COMMENT_MARKER.captures(comment) {
                b.page_break(caps.get(1).and_then(|m| m.as_str().parse().ok()))?;
            }
            i = end;
            continue;
        }

        let after = rest[1..].chars().next();
        let is_tag = matches!(after, Some(c) if c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?');
        if !is_tag {
            // a stray '<' that opens no tag is text
            b.push_text("<");
            i += 1;
            continue;
        }
        let end = tag_end(html, i);
        let tag = &html[i + 1..end.saturating_sub(1).max(i + 1)];
        i = end;
        if tag.starts_with('!') || tag.starts_with('?') {
            continue;
        }
        let closing = tag.starts_with('/');
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();

        if !closing && (matches!(name.as_str(), "script" | "style" | "title")) {
            let close = format!("</{name}");
            let lower = html[i..].to_ascii_lowercase();
            i = match lower.find(&close) {
                Some(p) => tag_end(html, i + p),
                None => html.len(),
            };
            continue;
        }

        if !closing {
            let is_marker = CLASS_ATTR.captures(tag).is_some_and(|c| {
                let v = c.get(1).or(c.get(2)).or(c.get(3)).map_or("", |m| m.as_str());
                v.split_whitespace().any(|cls| {
                    cls.eq_ignore_ascii_case("page-break") || cls.eq_ignore_ascii_case("pagebreak")
                })
            });
            if is_marker {
                let n = DATA_PAGE_ATTR
                    .captures(tag)
                    .and_then(|c| c[1].parse().ok());
                b.page_break(n)?;
                continue;
            }
        }
        if BLOCK_TAGS.contains(&name.as_str()) {
            b.break_line();
        }
    }
    Ok(b.finish())
}

/// Drops the leading header block of every page: blank lines and lines
/// matching the header grammar, up to the first line that is neither.
/// Speaker lines always stop the scan. Idempotent.
pub fn clean_headers(pt: &PagedText, grammar: &Grammar) -> PagedText {
    let pages = pt
        .pages
        .iter()
        .map(|page| {
            let mut cut = 0;
            let mut matched = false;
            for line in &page.lines {
                if grammar.is_speaker_line(line) {
                    break;
                }
                if line.trim().is_empty() {
                    cut += 1;
                } else if grammar.is_header(line) {
                    cut += 1;
                    matched = true;
                } else {
                    break;
                }
            }
            let lines = if matched {
                page.lines[cut..].to_vec()
            } else {
                page.lines.clone()
            };
            Page {
                number: page.number,
                lines,
            }
        })
        .collect();
    PagedText {
        meta: pt.meta.clone(),
        pages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn meta() -> DebateMeta {
        DebateMeta::r3(1, 1, 1, NaiveDate::from_ymd_opt(1976, 6, 3).unwrap())
    }

    fn html(body: &str) -> RawDocument {
        RawDocument {
            meta: meta(),
            body: body.as_bytes().to_vec(),
            encoding: Encoding::Utf8,
            kind: SourceKind::Html,
        }
    }

    fn lines(pt: &PagedText) -> Vec<(u32, Vec<String>)> {
        pt.pages.iter().map(|p| (p.number, p.lines.clone())).collect()
    }

    #[test]
    fn strips_tags() {
        let pt = strip_html(&html("<p>Dou a palavra ao senhor Alberto Alves</p>")).unwrap();
        assert_eq!(lines(&pt), vec![(1, vec!["Dou a palavra ao senhor Alberto Alves".to_string()])]);
    }

    #[test]
    fn decodes_entities() {
        let pt = strip_html(&html("Tom &amp; Jerry")).unwrap();
        assert_eq!(pt.pages[0].lines, ["Tom & Jerry"]);
        let pt = strip_html(&html("<p>A Sr.&ordf; Deputada &lt;b&gt; &#8212; ok</p>")).unwrap();
        assert_eq!(pt.pages[0].lines, ["A Sr.ª Deputada <b> — ok"]);
    }

    #[test]
    fn page_break_markers() {
        let pt = strip_html(&html("<p>um</p><hr class=\"page-break\"/><p>dois</p>")).unwrap();
        assert_eq!(lines(&pt), vec![(1, vec!["um".into()]), (2, vec!["dois".into()])]);

        let pt = strip_html(&html("<!-- page 12 --><p>um</p><!-- page 13 --><p>dois</p><!--pagebreak--><p>tres</p>")).unwrap();
        let numbers: Vec<u32> = pt.pages.iter().map(|p| p.number).collect();
        assert_eq!(numbers, [12, 13, 14]);

        let pt = strip_html(&html("<p>a</p><div class='x page-break' data-page=\"7\"></div><p>b</p>")).unwrap();
        assert_eq!(pt.pages[1].number, 7);

        let err = strip_html(&html("<!-- page 5 -->a<!-- page 3 -->b")).unwrap_err();
        assert_eq!(err, IngestError::PageOrder { current: 5, found: 3 });
    }

    #[test]
    fn skips_scripts_comments_and_keeps_stray_lt() {
        let pt = strip_html(&html(
            "<html><head><style>p { x: 1 }</style><script>if (a < b) {}</script></head><body><!-- nota --><p>1 < 2 e 3 > 2</p><br>x</body></html>",
        ))
        .unwrap();
        assert_eq!(pt.pages[0].lines, ["1 < 2 e 3 > 2", "x"]);
    }

    #[test]
    fn quoted_gt_in_attribute() {
        let pt = strip_html(&html("<p title=\"a > b\">texto</p>")).unwrap();
        assert_eq!(pt.pages[0].lines, ["texto"]);
    }

    #[test]
    fn encoding_errors_carry_offset() {
        let mut doc = html("abc");
        doc.body = b"ab\xFFcd".to_vec();
        assert_eq!(
            strip_html(&doc).unwrap_err(),
            IngestError::Encoding { encoding: "utf-8", offset: 2 }
        );
        doc.encoding = Encoding::Latin1;
        doc.body = b"Assembleia da Rep\xFAblica".to_vec();
        assert_eq!(strip_html(&doc).unwrap().pages[0].lines, ["Assembleia da República"]);
    }

    #[test]
    fn paged_text_splits_on_form_feed() {
        let doc = RawDocument {
            meta: meta(),
            body: b"a\r\nb\n\x0C\nc\n\x0C\n".to_vec(),
            encoding: Encoding::Utf8,
            kind: SourceKind::PagedText,
        };
        let pt = ingest(&doc).unwrap();
        assert_eq!(lines(&pt), vec![(1, vec!["a".into(), "b".into()]), (2, vec!["c".into()])]);
        assert_eq!(strip_html(&doc).unwrap_err(), IngestError::WrongKind);
    }

    fn paged(pages: &[&[&str]]) -> PagedText {
        PagedText {
            meta: meta(),
            pages: pages
                .iter()
                .enumerate()
                .map(|(i, ls)| Page { number: i as u32 + 1, lines: ls.iter().map(|s| s.to_string()).collect() })
                .collect(),
        }
    }

    #[test]
    fn header_fixture() {
        let g = Grammar::new(&Config::default()).unwrap();
        let pt = paged(&[&[
            "I SÉRIE — NÚMERO 23",
            "14",
            "O Sr. Presidente: — Tem a palavra o Sr. Deputado.",
            "14",
        ]]);
        let cleaned = clean_headers(&pt, &g);
        // hand-annotated: the two banner lines are header, the rest is body
        assert_eq!(cleaned.pages[0].lines, ["O Sr. Presidente: — Tem a palavra o Sr. Deputado.", "14"]);
        assert_eq!(clean_headers(&cleaned, &g), cleaned);
    }

    #[test]
    fn headerless_page_is_unchanged() {
        let g = Grammar::new(&Config::default()).unwrap();
        let pt = paged(&[&["", "texto corrido", "I SÉRIE — NÚMERO 2"]]);
        assert_eq!(clean_headers(&pt, &g), pt);
    }

    fn tag_wrap(lines: &[String], tags: &[u8]) -> String {
        let mut out = String::from("<html><body>");
        for (i, line) in lines.iter().enumerate() {
            let escaped = html_escape::encode_text(line);
            let t = tags[i % tags.len()];
            match t % 4 {
                0 => out.push_str(&format!("<p>{escaped}</p>")),
                1 => out.push_str(&format!("<div class=\"c{t}\"><span>{escaped}</span></div>")),
                2 => out.push_str(&format!("{escaped}<br/>")),
                _ => out.push_str(&format!("<p><b>{escaped}</b>\n</p>")),
            }
        }
        out.push_str("</body></html>");
        out
    }

    proptest! {
        #[test]
        fn stripping_recovers_plain_text(
            words in proptest::collection::vec(
                proptest::collection::vec("[A-Za-zçãé0-9<>&\"'.,;:—-]{1,8}", 1..6), 1..8),
            tags in proptest::collection::vec(any::<u8>(), 1..5),
        ) {
            let lines: Vec<String> = words.iter().map(|w| w.join(" ")).collect();
            let pages = strip_html_str(&tag_wrap(&lines, &tags)).unwrap();
            prop_assert_eq!(pages.len(), 1);
            prop_assert_eq!(&pages[0].lines, &lines);
        }

        #[test]
        fn header_cleaning_is_idempotent_and_keeps_speaker_lines(
            picks in proptest::collection::vec(0usize..7, 0..12)
        ) {
            let pool = [
                "I SÉRIE — NÚMERO 3", "27", "", "texto", "O Sr. Presidente: — Sim.",
                "3 DE JUNHO DE 1976", "Aplausos.",
            ];
            let ls: Vec<&str> = picks.iter().map(|i| pool[*i]).collect();
            let g = Grammar::new(&Config::default()).unwrap();
            let pt = paged(&[&ls]);
            let once = clean_headers(&pt, &g);
            prop_assert_eq!(clean_headers(&once, &g), once.clone());
            let speakers_before = ls.iter().filter(|l| g.is_speaker_line(l)).count();
            let speakers_after = once.pages[0].lines.iter().filter(|l| g.is_speaker_line(l)).count();
            prop_assert_eq!(speakers_before, speakers_after);
        }
    }
}
