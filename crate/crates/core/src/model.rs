//! Domain types shared by every stage of the annotation pipeline.
//!
//! Nothing here performs I/O. Values are plain data and can be sent across
//! worker threads freely.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Historic series code used for every debate of the Third Republic.
pub const PERIOD_R3: &str = "r3";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("ambiguous speaker needs at least two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("ambiguous speaker needs a tie at the top score")]
    NoTopTie,
    #[error("candidate score {0} is not a finite value")]
    BadScore(f64),
    #[error("unknown gender '{0}'")]
    UnknownGender(String),
    #[error("unknown role '{0}'")]
    UnknownRole(String),
    #[error("malformed document id '{0}'")]
    BadDocumentId(String),
}

/// Identity of one parliamentary sitting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DebateMeta {
    pub period: String,
    pub legislature: u32,
    pub session: u32,
    pub number: u32,
    /// Sitting date, not the publication date of the journal.
    pub date: NaiveDate,
}

impl DebateMeta {
    pub fn r3(legislature: u32, session: u32, number: u32, date: NaiveDate) -> Self {
        DebateMeta {
            period: PERIOD_R3.to_string(),
            legislature,
            session,
            number,
            date,
        }
    }

    /// Stem used for input and output file names:
    /// `r3-L{legislature}-S{session}-N{number}-{YYYY-MM-DD}`.
    pub fn document_id(&self) -> String {
        format!(
            "{}-L{}-S{}-N{}-{}",
            self.period,
            self.legislature,
            self.session,
            self.number,
            self.date.format("%Y-%m-%d")
        )
    }

    /// Inverse of [`DebateMeta::document_id`].
    pub fn from_document_id(id: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::BadDocumentId(id.to_string());
        let mut parts = id.splitn(5, '-');
        let period = parts.next().filter(|p| !p.is_empty()).ok_or_else(bad)?;
        let mut numbered = |prefix: char| -> Result<u32, ModelError> {
            parts
                .next()
                .and_then(|p| p.strip_prefix(prefix))
                .and_then(|p| p.parse::<u32>().ok())
                .ok_or_else(bad)
        };
        let legislature = numbered('L')?;
        let session = numbered('S')?;
        let number = numbered('N')?;
        let date = parts
            .next()
            .and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
            .ok_or_else(bad)?;
        Ok(DebateMeta {
            period: period.to_string(),
            legislature,
            session,
            number,
            date,
        })
    }
}

/// One journal page of cleaned text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub number: u32,
    pub lines: Vec<String>,
}

/// Registry identifier. Numeric ids order numerically, everything else
/// lexically after them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeakerId(pub String);

impl SpeakerId {
    pub fn new(id: impl Into<String>) -> Self {
        SpeakerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Ord for SpeakerId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0.parse::<u64>(), other.0.parse::<u64>()) {
            (Ok(a), Ok(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            (Err(_), Err(_)) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for SpeakerId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SpeakerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Resolved,
    President,
    Unresolved,
    Ambiguous,
}

impl Status {
    pub const ALL: [Status; 4] = [
        Status::Resolved,
        Status::President,
        Status::Unresolved,
        Status::Ambiguous,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Resolved => "resolved",
            Status::President => "president",
            Status::Unresolved => "unresolved",
            Status::Ambiguous => "ambiguous",
        }
    }
}

/// A scored registry candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub speaker_id: SpeakerId,
    pub score: f64,
}

/// Tied candidates for an ambiguous speaker. Always holds at least two
/// entries, sorted by descending score, the first two sharing the top score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Candidate>", into = "Vec<Candidate>")]
pub struct Ambiguity(Vec<Candidate>);

impl Ambiguity {
    pub fn new(mut candidates: Vec<Candidate>) -> Result<Self, ModelError> {
        if candidates.len() < 2 {
            return Err(ModelError::TooFewCandidates(candidates.len()));
        }
        if let Some(c) = candidates.iter().find(|c| !c.score.is_finite()) {
            return Err(ModelError::BadScore(c.score));
        }
        candidates.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.speaker_id.cmp(&b.speaker_id))
        });
        if candidates[0].score != candidates[1].score {
            return Err(ModelError::NoTopTie);
        }
        Ok(Ambiguity(candidates))
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.0
    }
}

impl TryFrom<Vec<Candidate>> for Ambiguity {
    type Error = ModelError;

    fn try_from(value: Vec<Candidate>) -> Result<Self, Self::Error> {
        Ambiguity::new(value)
    }
}

impl From<Ambiguity> for Vec<Candidate> {
    fn from(value: Ambiguity) -> Self {
        value.0
    }
}

/// Resolution outcome for one speaker string. The variants make the
/// field-presence rules structural: only resolved speakers carry an id and
/// name, only the president carries the role tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SpeakerRef {
    Resolved {
        speaker_id: SpeakerId,
        speaker_name: String,
        speaker_party: Option<String>,
    },
    President,
    Unresolved,
    Ambiguous { candidates: Ambiguity },
}

/// The only role tag the annotation scheme knows.
pub const PRESIDENT_ROLE: &str = "president";

impl SpeakerRef {
    pub fn resolved(
        speaker_id: SpeakerId,
        speaker_name: impl Into<String>,
        speaker_party: Option<String>,
    ) -> Self {
        SpeakerRef::Resolved {
            speaker_id,
            speaker_name: speaker_name.into(),
            speaker_party: speaker_party.filter(|p| !p.is_empty()),
        }
    }

    pub fn ambiguous(candidates: Vec<Candidate>) -> Result<Self, ModelError> {
        Ambiguity::new(candidates).map(|candidates| SpeakerRef::Ambiguous { candidates })
    }

    pub fn status(&self) -> Status {
        match self {
            SpeakerRef::Resolved { .. } => Status::Resolved,
            SpeakerRef::President => Status::President,
            SpeakerRef::Unresolved => Status::Unresolved,
            SpeakerRef::Ambiguous { .. } => Status::Ambiguous,
        }
    }

    pub fn speaker_id(&self) -> Option<&SpeakerId> {
        match self {
            SpeakerRef::Resolved { speaker_id, .. } => Some(speaker_id),
            _ => None,
        }
    }

    pub fn speaker_name(&self) -> Option<&str> {
        match self {
            SpeakerRef::Resolved { speaker_name, .. } => Some(speaker_name),
            _ => None,
        }
    }

    pub fn speaker_party(&self) -> Option<&str> {
        match self {
            SpeakerRef::Resolved { speaker_party, .. } => speaker_party.as_deref(),
            _ => None,
        }
    }

    pub fn speaker_role(&self) -> Option<&'static str> {
        match self {
            SpeakerRef::President => Some(PRESIDENT_ROLE),
            _ => None,
        }
    }

    pub fn candidates(&self) -> Option<&[Candidate]> {
        match self {
            SpeakerRef::Ambiguous { candidates } => Some(candidates.candidates()),
            _ => None,
        }
    }
}

/// One attributed speech act.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub order: u32,
    pub page_start: u32,
    pub speaker_string: String,
    pub speaker: SpeakerRef,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Masculine,
    Feminine,
    #[default]
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Masculine => "masculine",
            Gender::Feminine => "feminine",
            Gender::Unknown => "unknown",
        }
    }
}

impl FromStr for Gender {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "masculine" => Ok(Gender::Masculine),
            "feminine" => Ok(Gender::Feminine),
            "unknown" | "" => Ok(Gender::Unknown),
            other => Err(ModelError::UnknownGender(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "MP")]
    Mp,
    #[serde(rename = "government")]
    Government,
    #[serde(rename = "president-of-assembly")]
    PresidentOfAssembly,
    #[serde(rename = "secretary")]
    Secretary,
    #[serde(rename = "guest")]
    Guest,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Mp => "MP",
            Role::Government => "government",
            Role::PresidentOfAssembly => "president-of-assembly",
            Role::Secretary => "secretary",
            Role::Guest => "guest",
        }
    }
}

impl FromStr for Role {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "MP" => Ok(Role::Mp),
            "government" => Ok(Role::Government),
            "president-of-assembly" => Ok(Role::PresidentOfAssembly),
            "secretary" => Ok(Role::Secretary),
            "guest" => Ok(Role::Guest),
            other => Err(ModelError::UnknownRole(other.to_string())),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A term of office covering a contiguous range of legislative sessions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mandate {
    pub legislature: u32,
    pub session_from: u32,
    pub session_to: u32,
    pub party: String,
    pub role: Role,
    /// Cabinet post held, for government mandates.
    pub cabinet: Option<String>,
}

impl Mandate {
    pub fn covers(&self, legislature: u32, session: u32) -> bool {
        self.legislature == legislature && (self.session_from..=self.session_to).contains(&session)
    }
}

/// Registry entry for a Member of Parliament or of Government.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MPRecord {
    pub speaker_id: SpeakerId,
    pub full_name: String,
    pub short_name: String,
    pub gender: Gender,
    /// Sorted and free of duplicates.
    pub mandates: Vec<Mandate>,
}

impl MPRecord {
    pub fn mandates_in(&self, legislature: u32, session: u32) -> impl Iterator<Item = &Mandate> {
        self.mandates
            .iter()
            .filter(move |m| m.covers(legislature, session))
    }

    /// Most recent cabinet post held, if any.
    pub fn cabinet_name(&self) -> Option<&str> {
        self.mandates
            .iter()
            .rev()
            .find_map(|m| m.cabinet.as_deref())
    }
}

/// The utterances that start on one journal page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebatePage {
    pub number: u32,
    pub utterances: Vec<Utterance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDebate {
    pub meta: DebateMeta,
    pub pages: Vec<DebatePage>,
}

impl AnnotatedDebate {
    /// Groups utterances under the page they start on. Input order is kept.
    pub fn from_utterances(meta: DebateMeta, utterances: Vec<Utterance>) -> Self {
        let mut pages: Vec<DebatePage> = Vec::new();
        for u in utterances {
            match pages.last_mut() {
                Some(p) if p.number == u.page_start => p.utterances.push(u),
                _ => pages.push(DebatePage {
                    number: u.page_start,
                    utterances: vec![u],
                }),
            }
        }
        AnnotatedDebate { meta, pages }
    }

    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.pages.iter().flat_map(|p| p.utterances.iter())
    }

    pub fn utterance_count(&self) -> usize {
        self.pages.iter().map(|p| p.utterances.len()).sum()
    }
}

/// One broken invariant, located by a path such as `debate/page[2]/utterance[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, rule: &str, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            rule: rule.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}", self.path, self.rule, self.message)
    }
}

/// Characters that cannot appear in an XML 1.0 document.
pub fn is_xml_char(c: char) -> bool {
    matches!(c,
        '\u{9}' | '\u{A}' | '\u{D}'
        | '\u{20}'..='\u{D7FF}'
        | '\u{E000}'..='\u{FFFD}'
        | '\u{10000}'..='\u{10FFFF}')
}

/// Reports every invariant violation of `d`. An empty list means the debate
/// is well-formed and can be emitted.
pub fn validate_debate(d: &AnnotatedDebate) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = &d.meta;
    if m.period.trim().is_empty() {
        out.push(Violation::new("debate", "meta-period", "period is empty"));
    } else if !m.period.chars().all(is_xml_char) {
        out.push(Violation::new("debate", "invalid-char", "period holds a non-XML character"));
    }
    for (name, value) in [
        ("legislature", m.legislature),
        ("session", m.session),
        ("number", m.number),
    ] {
        if value < 1 {
            out.push(Violation::new(
                "debate",
                &format!("meta-{name}"),
                format!("{name} must be at least 1"),
            ));
        }
    }

    let page_numbers: BTreeSet<u32> = d.pages.iter().map(|p| p.number).collect();
    let mut prev_page: Option<u32> = None;
    let mut prev_order = 0u32;
    for (pi, page) in d.pages.iter().enumerate() {
        let ppath = format!("debate/page[{}]", pi + 1);
        if page.number < 1 {
            out.push(Violation::new(&ppath, "page-number", "page number must be at least 1"));
        }
        if let Some(prev) = prev_page {
            if page.number <= prev {
                out.push(Violation::new(
                    &ppath,
                    "page-order",
                    format!("page {} follows page {}", page.number, prev),
                ));
            }
        }
        prev_page = Some(page.number);
        if page.utterances.is_empty() {
            out.push(Violation::new(&ppath, "empty-page", "page holds no utterance"));
        }
        for (ui, u) in page.utterances.iter().enumerate() {
            let upath = format!("{ppath}/utterance[{}]", ui + 1);
            let expected = prev_order + 1;
            if u.order > expected {
                out.push(Violation::new(
                    &upath,
                    "order-gap",
                    format!("expected order {expected}, found {}", u.order),
                ));
            } else if u.order < expected {
                out.push(Violation::new(
                    &upath,
                    "order-sequence",
                    format!("order {} does not follow {}", u.order, prev_order),
                ));
            }
            prev_order = u.order;

            if !page_numbers.contains(&u.page_start) {
                out.push(Violation::new(
                    &upath,
                    "dangling-page",
                    format!("page-start {} names no page of this debate", u.page_start),
                ));
            } else if u.page_start != page.number {
                out.push(Violation::new(
                    &upath,
                    "page-mismatch",
                    format!("page-start {} inside page {}", u.page_start, page.number),
                ));
            }
            if u.text.trim().is_empty() {
                out.push(Violation::new(&upath, "empty-text", "utterance text is empty"));
            }
            if u.speaker_string.trim().is_empty() {
                out.push(Violation::new(
                    &upath,
                    "empty-speaker-string",
                    "speaker string is empty",
                ));
            }
            let strings = [Some(u.text.as_str()), Some(u.speaker_string.as_str()), u.speaker.speaker_name(), u.speaker.speaker_party(), u.speaker.speaker_id().map(|s| s.as_str())];
            if strings.iter().flatten().any(|s| !s.chars().all(is_xml_char)) {
                out.push(Violation::new(&upath, "invalid-char", "text holds a non-XML character"));
            }
            let ids = u
                .speaker
                .speaker_id()
                .into_iter()
                .chain(u.speaker.candidates().unwrap_or(&[]).iter().map(|c| &c.speaker_id));
            for id in ids {
                if id.as_str().is_empty() || id.as_str().chars().any(char::is_whitespace) {
                    out.push(Violation::new(
                        &upath,
                        "bad-speaker-id",
                        format!("speaker id '{id}' is empty or holds whitespace"),
                    ));
                }
            }
        }
    }
    out
}
