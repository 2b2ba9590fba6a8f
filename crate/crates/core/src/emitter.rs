//! XML serialization of annotated debates, and the matching reader.
//!
//! Output shape (4-space profile):
//!
//! ```text
//! <?xml version="1.0" encoding="UTF-8"?>
//! <debate period="r3" legislature="1" session="1" number="1" date="1976-06-03">
//!     <page number="1">
//!         <utterance page-start="1" speaker-string="O Sr. Presidente" speaker-role="president" order="1">…</utterance>
//!         <utterance page-start="1" speaker-id="123" speaker-name="Alberto Alves" speaker-party="AB" speaker-string="O Sr. Alberto Alves (AB)" order="2">…</utterance>
//!     </page>
//! </debate>
//! ```
//!
//! Ambiguous speakers additionally carry `candidates-count` and
//! `speaker-candidates="id:score id:score"` unless the profile is strict, in
//! which case they are written like unresolved speakers.

use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use crate::config::EmitterConfig;
use crate::model::{
    validate_debate, AnnotatedDebate, Candidate, DebateMeta, DebatePage, SpeakerId, SpeakerRef,
    Utterance, Violation, PRESIDENT_ROLE,
};
use crate::xmltree::{self, escape_attr, escape_text, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XmlProfile {
    pub indent: usize,
    pub declaration: bool,
    pub strict: bool,
}

impl Default for XmlProfile {
    fn default() -> Self {
        XmlProfile {
            indent: 4,
            declaration: true,
            strict: false,
        }
    }
}

impl XmlProfile {
    pub fn from_config(cfg: &EmitterConfig, strict: bool) -> Self {
        XmlProfile {
            indent: cfg.indent,
            declaration: cfg.xml_declaration,
            strict,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmitError {
    #[error("debate is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path} (line {line}): {message}")]
pub struct SchemaError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

fn attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    escape_attr(value, out);
    out.push('"');
}

fn write_utterance(out: &mut String, u: &Utterance, profile: &XmlProfile) {
    out.push_str("<utterance");
    attr(out, "page-start", &u.page_start.to_string());
    if let SpeakerRef::Resolved {
        speaker_id,
        speaker_name,
        speaker_party,
    } = &u.speaker
    {
        attr(out, "speaker-id", speaker_id.as_str());
        attr(out, "speaker-name", speaker_name);
        if let Some(p) = speaker_party {
            attr(out, "speaker-party", p);
        }
    }
    attr(out, "speaker-string", &u.speaker_string);
    match &u.speaker {
        SpeakerRef::President => attr(out, "speaker-role", PRESIDENT_ROLE),
        SpeakerRef::Ambiguous { candidates } if !profile.strict => {
            let list = candidates.candidates();
            attr(out, "candidates-count", &list.len().to_string());
            let joined = list
                .iter()
                .map(|c| format!("{}:{}", c.speaker_id, c.score))
                .collect::<Vec<_>>()
                .join(" ");
            attr(out, "speaker-candidates", &joined);
        }
        _ => {}
    }
    attr(out, "order", &u.order.to_string());
    out.push('>');
    escape_text(&u.text, out);
    out.push_str("</utterance>\n");
}

/// Serializes a valid debate. Equal debates give byte-identical output.
pub fn emit_debate_xml(d: &AnnotatedDebate, profile: &XmlProfile) -> Result<String, EmitError> {
    let violations = validate_debate(d);
    if !violations.is_empty() {
        return Err(EmitError::Invalid(violations));
    }
    let pad = " ".repeat(profile.indent);
    let mut out = String::with_capacity(256 + d.utterance_count() * 256);
    if profile.declaration {
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    }
    let m = &d.meta;
    out.push_str("<debate");
    attr(&mut out, "period", &m.period);
    attr(&mut out, "legislature", &m.legislature.to_string());
    attr(&mut out, "session", &m.session.to_string());
    attr(&mut out, "number", &m.number.to_string());
    attr(&mut out, "date", &m.date.format("%Y-%m-%d").to_string());
    out.push_str(">\n");
    for page in &d.pages {
        let _ = writeln!(out, "{pad}<page number=\"{}\">", page.number);
        for u in &page.utterances {
            out.push_str(&pad);
            out.push_str(&pad);
            write_utterance(&mut out, u, profile);
        }
        let _ = writeln!(out, "{pad}</page>");
    }
    out.push_str("</debate>\n");
    Ok(out)
}

const DEBATE_ATTRS: &[&str] = &["period", "legislature", "session", "number", "date"];
const PAGE_ATTRS: &[&str] = &["number"];
const UTTERANCE_ATTRS: &[&str] = &[
    "page-start",
    "speaker-id",
    "speaker-name",
    "speaker-party",
    "speaker-string",
    "speaker-role",
    "candidates-count",
    "speaker-candidates",
    "order",
];

struct Reader<'w> {
    strict: bool,
    warnings: &'w mut Vec<String>,
}

impl Reader<'_> {
    fn err(path: &str, el: &Element, message: impl Into<String>) -> SchemaError {
        SchemaError {
            path: path.to_string(),
            line: el.line,
            message: message.into(),
        }
    }

    fn check_attrs(&mut self, path: &str, el: &Element, known: &[&str]) -> Result<(), SchemaError> {
        for (k, _) in &el.attrs {
            if !known.contains(&k.as_str()) {
                if self.strict {
                    return Err(Self::err(path, el, format!("unknown attribute '{k}'")));
                }
                self.warnings
                    .push(format!("{path} (line {}): unknown attribute '{k}' ignored", el.line));
            }
        }
        Ok(())
    }

    fn required<'e>(path: &str, el: &'e Element, name: &str) -> Result<&'e str, SchemaError> {
        el.attr(name)
            .ok_or_else(|| Self::err(path, el, format!("missing attribute '{name}'")))
    }

    fn number(path: &str, el: &Element, name: &str) -> Result<u32, SchemaError> {
        let v = Self::required(path, el, name)?;
        v.parse::<u32>()
            .map_err(|_| Self::err(path, el, format!("attribute '{name}' is not a number: '{v}'")))
    }

    fn utterance(&mut self, path: &str, el: &Element) -> Result<Utterance, SchemaError> {
        self.check_attrs(path, el, UTTERANCE_ATTRS)?;
        if el.elements().next().is_some() {
            return Err(Self::err(path, el, "utterance holds child elements"));
        }
        let page_start = Self::number(path, el, "page-start")?;
        let order = Self::number(path, el, "order")?;
        let speaker_string = Self::required(path, el, "speaker-string")?.to_string();
        let id = el.attr("speaker-id");
        let role = el.attr("speaker-role");
        let speaker = match (id, role) {
            (Some(_), Some(_)) => {
                return Err(Self::err(path, el, "speaker-id and speaker-role are exclusive"))
            }
            (None, Some(r)) if r == PRESIDENT_ROLE => SpeakerRef::President,
            (None, Some(r)) => return Err(Self::err(path, el, format!("unknown speaker-role '{r}'"))),
            (Some(id), None) => {
                let name = Self::required(path, el, "speaker-name")?;
                SpeakerRef::resolved(
                    SpeakerId::new(id),
                    name,
                    el.attr("speaker-party").map(str::to_string),
                )
            }
            (None, None) => {
                for a in ["speaker-name", "speaker-party"] {
                    if el.attr(a).is_some() {
                        return Err(Self::err(path, el, format!("'{a}' requires speaker-id")));
                    }
                }
                match el.attr("speaker-candidates") {
                    Some(list) => self.candidates(path, el, list)?,
                    None => {
                        if el.attr("candidates-count").is_some() {
                            self.warnings.push(format!(
                                "{path} (line {}): candidates-count without speaker-candidates",
                                el.line
                            ));
                        }
                        SpeakerRef::Unresolved
                    }
                }
            }
        };
        Ok(Utterance {
            order,
            page_start,
            speaker_string,
            speaker,
            text: el.text(),
        })
    }

    fn candidates(&mut self, path: &str, el: &Element, list: &str) -> Result<SpeakerRef, SchemaError> {
        let mut cands = Vec::new();
        for item in list.split_whitespace() {
            let (id, score) = item
                .rsplit_once(':')
                .ok_or_else(|| Self::err(path, el, format!("bad candidate '{item}'")))?;
            let score: f64 = score
                .parse()
                .map_err(|_| Self::err(path, el, format!("bad candidate score '{item}'")))?;
            cands.push(Candidate {
                speaker_id: SpeakerId::new(id),
                score,
            });
        }
        if let Some(n) = el.attr("candidates-count") {
            if n.parse::<usize>().ok() != Some(cands.len()) {
                return Err(Self::err(path, el, "candidates-count disagrees with speaker-candidates"));
            }
        }
        SpeakerRef::ambiguous(cands).map_err(|e| Self::err(path, el, e.to_string()))
    }
}

/// Reads a debate document. In strict mode unknown attributes are errors;
/// otherwise they are returned as warnings.
pub fn parse_debate_xml(
    bytes: &[u8],
    strict: bool,
) -> Result<(AnnotatedDebate, Vec<String>), SchemaError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SchemaError {
        path: "/".into(),
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count(),
        message: format!("invalid UTF-8 at byte {}", e.valid_up_to()),
    })?;
    let root = xmltree::parse(text).map_err(|e| SchemaError {
        path: "/".into(),
        line: e.line,
        message: e.message,
    })?;
    let mut warnings = Vec::new();
    let mut r = Reader {
        strict,
        warnings: &mut warnings,
    };
    if root.name != "debate" {
        return Err(Reader::err("/", &root, format!("root must be <debate>, found <{}>", root.name)));
    }
    let path = "/debate";
    r.check_attrs(path, &root, DEBATE_ATTRS)?;
    if root.has_stray_text() {
        return Err(Reader::err(path, &root, "unexpected text"));
    }
    let date_str = Reader::required(path, &root, "date")?;
    let meta = DebateMeta {
        period: Reader::required(path, &root, "period")?.to_string(),
        legislature: Reader::number(path, &root, "legislature")?,
        session: Reader::number(path, &root, "session")?,
        number: Reader::number(path, &root, "number")?,
        date: NaiveDate::parse_from_str(date_str, "%Y-%m-%d")
            .map_err(|_| Reader::err(path, &root, format!("bad date '{date_str}'")))?,
    };
    let mut pages = Vec::new();
    for (pi, page) in root.elements().enumerate() {
        let ppath = format!("{path}/page[{}]", pi + 1);
        if page.name != "page" {
            return Err(Reader::err(&ppath, page, format!("expected <page>, found <{}>", page.name)));
        }
        r.check_attrs(&ppath, page, PAGE_ATTRS)?;
        if page.has_stray_text() {
            return Err(Reader::err(&ppath, page, "unexpected text"));
        }
        let number = Reader::number(&ppath, page, "number")?;
        let mut utterances = Vec::new();
        for (ui, u) in page.elements().enumerate() {
            let upath = format!("{ppath}/utterance[{}]", ui + 1);
            if u.name != "utterance" {
                return Err(Reader::err(&upath, u, format!("expected <utterance>, found <{}>", u.name)));
            }
            utterances.push(r.utterance(&upath, u)?);
        }
        pages.push(DebatePage { number, utterances });
    }
    Ok((AnnotatedDebate { meta, pages }, warnings))
}
