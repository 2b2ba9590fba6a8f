//! Biographic registry of MPs and Government members.
//!
//! Two interchange formats feed one canonical record schema:
//!
//! * CSV, UTF-8, comma separated, header row required, columns
//!   `speaker_id,full_name,short_name,gender,legislature,session_from,session_to,party,role,cabinet_name`.
//!   One row per mandate; rows sharing a `speaker_id` merge into one record.
//! * XML, UTF-8, root `<registry>` holding one `<person id=… gender=…>` per
//!   person with `<full-name>`, `<short-name>` and one or more
//!   `<mandate legislature=… session-from=… session-to=… party=… role=… [cabinet=…]/>`.
//!
//! Once loaded the registry is read-only and shared across annotation workers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Gender, MPRecord, Mandate, Role, SpeakerId};
use crate::names::normalize_name;
use crate::xmltree::{self, escape_attr, escape_text, Element};

pub const CSV_COLUMNS: [&str; 10] = [
    "speaker_id",
    "full_name",
    "short_name",
    "gender",
    "legislature",
    "session_from",
    "session_to",
    "party",
    "role",
    "cabinet_name",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("{location}: inverted-session-range ({from} > {to})")]
    InvertedSessionRange { location: String, from: u32, to: u32 },
    #[error("{path} (line {line}): {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },
    #[error("conflicting {field} for speaker {speaker_id}: '{existing}' vs '{incoming}'")]
    Conflict {
        speaker_id: String,
        field: &'static str,
        existing: String,
        incoming: String,
    },
}

impl RegistryError {
    pub fn rule(&self) -> &'static str {
        match self {
            RegistryError::MalformedRow { .. } => "malformed-row",
            RegistryError::InvertedSessionRange { .. } => "inverted-session-range",
            RegistryError::Schema { .. } => "schema",
            RegistryError::Conflict { .. } => "conflict",
        }
    }
}

/// Records parsed from one file, not yet merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegistryDelta {
    pub records: Vec<MPRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeSummary {
    pub new_records: usize,
    pub new_mandates: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    records: BTreeMap<SpeakerId, MPRecord>,
    name_index: BTreeMap<String, BTreeSet<SpeakerId>>,
}

/// Folds `incoming` into `slot`, failing on identity conflicts.
fn merge_record(slot: &mut MPRecord, incoming: MPRecord) -> Result<usize, RegistryError> {
    let conflict = |field, existing: &str, incoming: &str| RegistryError::Conflict {
        speaker_id: slot.speaker_id.to_string(),
        field,
        existing: existing.to_string(),
        incoming: incoming.to_string(),
    };
    if slot.full_name != incoming.full_name {
        return Err(conflict("full_name", &slot.full_name, &incoming.full_name));
    }
    if slot.short_name != incoming.short_name {
        return Err(conflict("short_name", &slot.short_name, &incoming.short_name));
    }
    match (slot.gender, incoming.gender) {
        (a, b) if a == b => {}
        (Gender::Unknown, g) => slot.gender = g,
        (_, Gender::Unknown) => {}
        (a, b) => return Err(conflict("gender", a.as_str(), b.as_str())),
    }
    let before = slot.mandates.len();
    slot.mandates.extend(incoming.mandates);
    slot.mandates.sort();
    slot.mandates.dedup();
    Ok(slot.mandates.len() - before)
}

fn merge_into(
    records: &mut BTreeMap<SpeakerId, MPRecord>,
    incoming: MPRecord,
) -> Result<MergeSummary, RegistryError> {
    match records.get_mut(&incoming.speaker_id) {
        Some(slot) => Ok(MergeSummary {
            new_records: 0,
            new_mandates: merge_record(slot, incoming)?,
        }),
        None => {
            let mut rec = incoming;
            rec.mandates.sort();
            rec.mandates.dedup();
            let n = rec.mandates.len();
            records.insert(rec.speaker_id.clone(), rec);
            Ok(MergeSummary {
                new_records: 1,
                new_mandates: n,
            })
        }
    }
}

fn parse_u32(field: &str, value: &str, line: u64) -> Result<u32, RegistryError> {
    let v: u32 = value.trim().parse().map_err(|_| RegistryError::MalformedRow {
        line,
        message: format!("{field} '{value}' is not a positive integer"),
    })?;
    if v == 0 {
        return Err(RegistryError::MalformedRow {
            line,
            message: format!("{field} must be at least 1"),
        });
    }
    Ok(v)
}

fn non_empty(value: Option<String>) -> Option<String> {
    value.map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
}

/// Parses the CSV interchange format.
pub fn parse_registry_csv(text: &str) -> Result<RegistryDelta, RegistryError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| RegistryError::MalformedRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let mut col = [0usize; CSV_COLUMNS.len()];
    for (i, name) in CSV_COLUMNS.iter().enumerate() {
        col[i] = headers
            .iter()
            .position(|h| h.trim() == *name)
            .ok_or_else(|| RegistryError::MalformedRow {
                line: 1,
                message: format!("missing column '{name}'"),
            })?;
    }

    let mut records: BTreeMap<SpeakerId, MPRecord> = BTreeMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| RegistryError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let get = |i: usize| row.get(col[i]).unwrap_or("").trim();
        let malformed = |message: String| RegistryError::MalformedRow { line, message };

        let id = get(0);
        let full_name = get(1);
        if id.is_empty() {
            return Err(malformed("empty speaker_id".into()));
        }
        if full_name.is_empty() {
            return Err(malformed("empty full_name".into()));
        }
        let short_name = match get(2) {
            "" => full_name,
            s => s,
        };
        let gender: Gender = get(3).parse().map_err(|e: crate::model::ModelError| malformed(e.to_string()))?;
        let legislature = parse_u32("legislature", get(4), line)?;
        let session_from = parse_u32("session_from", get(5), line)?;
        let session_to = parse_u32("session_to", get(6), line)?;
        if session_from > session_to {
            return Err(RegistryError::InvertedSessionRange {
                location: format!("line {line}"),
                from: session_from,
                to: session_to,
            });
        }
        let role: Role = get(8).parse().map_err(|e: crate::model::ModelError| malformed(e.to_string()))?;
        let rec = MPRecord {
            speaker_id: SpeakerId::new(id),
            full_name: full_name.to_string(),
            short_name: short_name.to_string(),
            gender,
            mandates: vec![Mandate {
                legislature,
                session_from,
                session_to,
                party: get(7).to_string(),
                role,
                cabinet: non_empty(Some(get(9).to_string())),
            }],
        };
        merge_into(&mut records, rec)?;
    }
    Ok(RegistryDelta {
        records: records.into_values().collect(),
    })
}

fn schema(path: &str, el: &Element, message: impl Into<String>) -> RegistryError {
    RegistryError::Schema {
        path: path.to_string(),
        line: el.line,
        message: message.into(),
    }
}

fn required<'a>(path: &str, el: &'a Element, name: &str) -> Result<&'a str, RegistryError> {
    el.attr(name)
        .ok_or_else(|| schema(path, el, format!("missing attribute '{name}'")))
}

fn attr_u32(path: &str, el: &Element, name: &str) -> Result<u32, RegistryError> {
    let v = required(path, el, name)?;
    match v.trim().parse::<u32>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(schema(path, el, format!("attribute '{name}' must be a positive integer, got '{v}'"))),
    }
}

fn check_attrs(path: &str, el: &Element, allowed: &[&str]) -> Result<(), RegistryError> {
    match el.attrs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(schema(path, el, format!("unexpected attribute '{k}'"))),
        None => Ok(()),
    }
}

/// Parses the XML interchange format.
pub fn parse_registry_xml(text: &str) -> Result<RegistryDelta, RegistryError> {
    let root = xmltree::parse(text).map_err(|e| RegistryError::Schema {
        path: "/".into(),
        line: e.line,
        message: e.message,
    })?;
    if root.name != "registry" {
        return Err(schema("/", &root, format!("root must be <registry>, found <{}>", root.name)));
    }
    if root.has_stray_text() {
        return Err(schema("/registry", &root, "unexpected text"));
    }
    let mut records: BTreeMap<SpeakerId, MPRecord> = BTreeMap::new();
    for (pi, person) in root.elements().enumerate() {
        let ppath = format!("/registry/{}[{}]", person.name, pi + 1);
        if person.name != "person" {
            return Err(schema(&ppath, person, "expected <person>"));
        }
        check_attrs(&ppath, person, &["id", "gender"])?;
        if person.has_stray_text() {
            return Err(schema(&ppath, person, "unexpected text"));
        }
        let id = required(&ppath, person, "id")?.trim();
        if id.is_empty() {
            return Err(schema(&ppath, person, "empty id"));
        }
        let gender: Gender = person
            .attr("gender")
            .unwrap_or("unknown")
            .parse()
            .map_err(|e: crate::model::ModelError| schema(&ppath, person, e.to_string()))?;

        let mut full_name = None;
        let mut short_name = None;
        let mut mandates = Vec::new();
        for (ci, child) in person.elements().enumerate() {
            let cpath = format!("{ppath}/{}[{}]", child.name, ci + 1);
            match child.name.as_str() {
                "full-name" | "short-name" => {
                    check_attrs(&cpath, child, &[])?;
                    if child.elements().next().is_some() {
                        return Err(schema(&cpath, child, "unexpected child element"));
                    }
                    let slot = if child.name == "full-name" { &mut full_name } else { &mut short_name };
                    if slot.is_some() {
                        return Err(schema(&cpath, child, "duplicate element"));
                    }
                    *slot = Some(child.text().trim().to_string());
                }
                "mandate" => {
                    check_attrs(
                        &cpath,
                        child,
                        &["legislature", "session-from", "session-to", "party", "role", "cabinet"],
                    )?;
                    let legislature = attr_u32(&cpath, child, "legislature")?;
                    let session_from = attr_u32(&cpath, child, "session-from")?;
                    let session_to = attr_u32(&cpath, child, "session-to")?;
                    if session_from > session_to {
                        return Err(RegistryError::InvertedSessionRange {
                            location: cpath,
                            from: session_from,
                            to: session_to,
                        });
                    }
                    let role: Role = required(&cpath, child, "role")?
                        .parse()
                        .map_err(|e: crate::model::ModelError| schema(&cpath, child, e.to_string()))?;
                    mandates.push(Mandate {
                        legislature,
                        session_from,
                        session_to,
                        party: child.attr("party").unwrap_or("").trim().to_string(),
                        role,
                        cabinet: non_empty(child.attr("cabinet").map(str::to_string)),
                    });
                }
                other => return Err(schema(&cpath, child, format!("unexpected element <{other}>"))),
            }
        }
        let full_name = full_name
            .filter(|n| !n.is_empty())
            .ok_or_else(|| schema(&ppath, person, "missing <full-name>"))?;
        let short_name = short_name.filter(|n| !n.is_empty()).unwrap_or_else(|| full_name.clone());
        if mandates.is_empty() {
            return Err(schema(&ppath, person, "person has no <mandate>"));
        }
        merge_into(
            &mut records,
            MPRecord {
                speaker_id: SpeakerId::new(id),
                full_name,
                short_name,
                gender,
                mandates,
            },
        )?;
    }
    Ok(RegistryDelta {
        records: records.into_values().collect(),
    })
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Merges a parsed delta. All-or-nothing: on conflict the registry is
    /// left unchanged.
    pub fn merge(&mut self, delta: RegistryDelta) -> Result<MergeSummary, RegistryError> {
        let mut records = self.records.clone();
        let mut summary = MergeSummary::default();
        for rec in delta.records {
            let s = merge_into(&mut records, rec)?;
            summary.new_records += s.new_records;
            summary.new_mandates += s.new_mandates;
        }
        self.records = records;
        self.rebuild_index();
        Ok(summary)
    }

    pub fn load_csv(&mut self, text: &str) -> Result<MergeSummary, RegistryError> {
        self.merge(parse_registry_csv(text)?)
    }

    pub fn load_xml(&mut self, text: &str) -> Result<MergeSummary, RegistryError> {
        self.merge(parse_registry_xml(text)?)
    }

    fn rebuild_index(&mut self) {
        self.name_index.clear();
        for rec in self.records.values() {
            for name in [&rec.full_name, &rec.short_name] {
                self.name_index
                    .entry(normalize_name(name))
                    .or_default()
                    .insert(rec.speaker_id.clone());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &SpeakerId) -> Option<&MPRecord> {
        self.records.get(id)
    }

    /// Records in speaker-id order.
    pub fn records(&self) -> impl Iterator<Item = &MPRecord> {
        self.records.values()
    }

    /// Ids whose full or short name normalizes to the same key as `name`.
    pub fn lookup_name(&self, name: &str) -> Option<&BTreeSet<SpeakerId>> {
        self.name_index.get(&normalize_name(name))
    }

    /// Everyone holding a mandate that covers `(legislature, session)`,
    /// optionally restricted to mandates of one role. Ordered by speaker id.
    pub fn candidates_for_session(
        &self,
        legislature: u32,
        session: u32,
        role: Option<Role>,
    ) -> Vec<&MPRecord> {
        self.records
            .values()
            .filter(|r| {
                r.mandates_in(legislature, session)
                    .any(|m| role.is_none_or(|role| m.role == role))
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in self.records.values() {
            for m in &r.mandates {
                w.write_record([
                    r.speaker_id.as_str(),
                    &r.full_name,
                    &r.short_name,
                    r.gender.as_str(),
                    &m.legislature.to_string(),
                    &m.session_from.to_string(),
                    &m.session_to.to_string(),
                    &m.party,
                    m.role.as_str(),
                    m.cabinet.as_deref().unwrap_or(""),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_xml(&self) -> String {
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<registry>\n");
        for r in self.records.values() {
            out.push_str("    <person id=\"");
            escape_attr(r.speaker_id.as_str(), &mut out);
            let _ = write!(out, "\" gender=\"{}\">\n        <full-name>", r.gender.as_str());
            escape_text(&r.full_name, &mut out);
            out.push_str("</full-name>\n        <short-name>");
            escape_text(&r.short_name, &mut out);
            out.push_str("</short-name>\n");
            for m in &r.mandates {
                let _ = write!(
                    out,
                    "        <mandate legislature=\"{}\" session-from=\"{}\" session-to=\"{}\" party=\"",
                    m.legislature, m.session_from, m.session_to
                );
                escape_attr(&m.party, &mut out);
                let _ = write!(out, "\" role=\"{}\"", m.role.as_str());
                if let Some(c) = &m.cabinet {
                    out.push_str(" cabinet=\"");
                    escape_attr(c, &mut out);
                    out.push('"');
                }
                out.push_str("/>\n");
            }
            out.push_str("    </person>\n");
        }
        out.push_str("</registry>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "speaker_id,full_name,short_name,gender,legislature,session_from,session_to,party,role,cabinet_name\n";

    fn csv(rows: &[&str]) -> String {
        let mut s = HEADER.to_string();
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn single_row() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&["1,Alberto Alves,Alberto Alves,masculine,1,1,4,AB,MP,"])).unwrap();
        assert_eq!(reg.len(), 1);
        let rec = reg.get(&SpeakerId::new("1")).unwrap();
        assert_eq!(rec.mandates.len(), 1);
        assert_eq!(rec.mandates[0].party, "AB");
        assert_eq!(rec.mandates[0].role, Role::Mp);
    }

    #[test]
    fn rows_merge_by_identity() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&[
            "1,Alberto Alves,Alberto Alves,masculine,1,1,4,AB,MP,",
            "1,Alberto Alves,Alberto Alves,masculine,2,1,4,AB,MP,",
        ]))
        .unwrap();
        assert_eq!(reg.len(), 1);
        assert_eq!(reg.get(&SpeakerId::new("1")).unwrap().mandates.len(), 2);
    }

    #[test]
    fn inverted_session_range() {
        let err = parse_registry_csv(&csv(&["1,A B,A B,masculine,1,3,2,AB,MP,"])).unwrap_err();
        assert_eq!(err.rule(), "inverted-session-range");
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn malformed_rows_carry_line_numbers() {
        let err = parse_registry_csv(&csv(&[
            "1,A B,A B,masculine,1,1,2,AB,MP,",
            "2,C D,C D,masculine,x,1,2,AB,MP,",
        ]))
        .unwrap_err();
        assert_eq!(err, RegistryError::MalformedRow { line: 3, message: "legislature 'x' is not a positive integer".into() });
        assert!(parse_registry_csv("speaker_id,full_name\n1,A\n").is_err());
        assert_eq!(parse_registry_csv(&csv(&["1,A B,A B,robot,1,1,2,AB,MP,"])).unwrap_err().rule(), "malformed-row");
    }

    #[test]
    fn conflicting_full_name() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&["1,Alberto Alves,Alberto Alves,masculine,1,1,4,AB,MP,"])).unwrap();
        let before = reg.clone();
        let err = reg
            .load_csv(&csv(&["1,Alberto Alvez,Alberto Alves,masculine,2,1,4,AB,MP,"]))
            .unwrap_err();
        assert_eq!(err.rule(), "conflict");
        assert_eq!(reg, before);
    }

    const XML_ONE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<registry>
    <person id="1" gender="masculine">
        <full-name>Alberto Alves</full-name>
        <short-name>Alberto Alves</short-name>
        <mandate legislature="1" session-from="1" session-to="4" party="AB" role="MP"/>
    </person>
</registry>
"#;

    #[test]
    fn minimal_xml() {
        let mut reg = Registry::new();
        reg.load_xml(XML_ONE).unwrap();
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn xml_government_member() {
        let doc = r#"<registry><person id="9" gender="feminine"><full-name>Maria Lurdes Pintasilgo</full-name>
            <mandate legislature="1" session-from="3" session-to="4" party="" role="government" cabinet="Ministra dos Assuntos Sociais"/></person></registry>"#;
        let mut reg = Registry::new();
        reg.load_xml(doc).unwrap();
        let rec = reg.get(&SpeakerId::new("9")).unwrap();
        assert_eq!(rec.mandates[0].role, Role::Government);
        assert_eq!(rec.cabinet_name(), Some("Ministra dos Assuntos Sociais"));
        assert_eq!(rec.short_name, rec.full_name);
        assert_eq!(reg.candidates_for_session(1, 3, Some(Role::Government)).len(), 1);
    }

    #[test]
    fn xml_schema_errors_name_the_element() {
        let doc = r#"<registry><person id="1"><full-name>A</full-name>
            <mandate legislature="1" session-from="1" party="X" role="MP"/></person></registry>"#;
        match parse_registry_xml(doc).unwrap_err() {
            RegistryError::Schema { path, line, .. } => {
                assert_eq!(path, "/registry/person[1]/mandate[2]");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_registry_xml("<people/>").is_err());
        assert!(parse_registry_xml(r#"<registry><person id="1" x="2"/></registry>"#).is_err());
        assert!(parse_registry_xml(r#"<registry><person id="1"><full-name>A</full-name></person></registry>"#).is_err());
    }

    #[test]
    fn csv_and_xml_merge_into_one_record() {
        let csv_doc = csv(&["1,Alberto Alves,Alberto Alves,masculine,2,1,2,AB,MP,"]);
        let mut merged = Registry::new();
        merged.load_csv(&csv_doc).unwrap();
        merged.load_xml(XML_ONE).unwrap();

        // oracle: ingest separately, union mandates
        let a = parse_registry_csv(&csv_doc).unwrap().records;
        let b = parse_registry_xml(XML_ONE).unwrap().records;
        let mut union: Vec<Mandate> = a[0].mandates.iter().chain(&b[0].mandates).cloned().collect();
        union.sort();
        union.dedup();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.get(&SpeakerId::new("1")).unwrap().mandates, union);
    }

    #[test]
    fn writers_round_trip() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&[
            "1,Alberto Alves,Alberto Alves,masculine,1,1,4,AB,MP,",
            "2,\"Silva, Ana\",Ana Silva,feminine,1,1,1,,government,Ministra & Co",
        ]))
        .unwrap();
        let mut from_csv = Registry::new();
        from_csv.load_csv(&reg.to_csv()).unwrap();
        let mut from_xml = Registry::new();
        from_xml.load_xml(&reg.to_xml()).unwrap();
        assert_eq!(from_csv, reg);
        assert_eq!(from_xml, reg);
    }

    #[test]
    fn name_index_covers_both_names() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&["7,José Manuel Durão Barroso,Durão Barroso,masculine,5,1,4,PSD,MP,"])).unwrap();
        assert!(reg.lookup_name("O Sr. Durão Barroso (PSD)").unwrap().contains(&SpeakerId::new("7")));
        assert!(reg.lookup_name("jose manuel durao barroso").is_some());
    }

    #[test]
    fn candidate_queries() {
        let mut reg = Registry::new();
        reg.load_csv(&csv(&[
            "1,A A,A A,masculine,1,1,2,X,MP,",
            "2,B B,B B,feminine,1,1,1,Y,MP,",
            "3,C C,C C,masculine,2,1,4,X,MP,",
        ]))
        .unwrap();
        let ids: Vec<&str> = reg.candidates_for_session(1, 1, None).iter().map(|r| r.speaker_id.as_str()).collect();
        assert_eq!(ids, ["1", "2"]);
        assert!(reg.candidates_for_session(1, 1, Some(Role::Government)).is_empty());
        assert!(reg.candidates_for_session(9, 1, None).is_empty());
    }

    fn arb_rows() -> impl Strategy<Value = Vec<(u8, u32, u32, u32, u8)>> {
        proptest::collection::vec((0u8..12, 1u32..4, 1u32..4, 0u32..3, 0u8..3), 0..30)
    }

    fn rows_to_csv(rows: &[(u8, u32, u32, u32, u8)]) -> String {
        let mut s = HEADER.to_string();
        for (id, leg, from, span, role) in rows {
            let role = ["MP", "government", "secretary"][*role as usize];
            s.push_str(&format!("{id},Person {id},Person {id},unknown,{leg},{from},{},P{},{role},\n", from + span, id % 3));
        }
        s
    }

    proptest! {
        #[test]
        fn candidates_equal_brute_force(rows in arb_rows(), leg in 1u32..4, ses in 1u32..6, role in proptest::option::of(0u8..3)) {
            let text = rows_to_csv(&rows);
            let mut reg = Registry::new();
            reg.load_csv(&text).unwrap();
            let role = role.map(|r| [Role::Mp, Role::Government, Role::Secretary][r as usize]);
            let got: Vec<String> = reg.candidates_for_session(leg, ses, role).iter().map(|r| r.speaker_id.to_string()).collect();

            let mut expected: Vec<u8> = rows
                .iter()
                .filter(|(_, l, from, span, r)| {
                    let r = [Role::Mp, Role::Government, Role::Secretary][*r as usize];
                    *l == leg && *from <= ses && ses <= from + span && role.is_none_or(|x| x == r)
                })
                .map(|row| row.0)
                .collect();
            expected.sort_unstable();
            expected.dedup();
            let expected: Vec<String> = expected.iter().map(|i| i.to_string()).collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn loading_twice_is_idempotent(rows in arb_rows()) {
            let text = rows_to_csv(&rows);
            let mut reg = Registry::new();
            reg.load_csv(&text).unwrap();
            let once = reg.clone();
            let second = reg.load_csv(&text).unwrap();
            prop_assert_eq!(second, MergeSummary::default());
            prop_assert_eq!(reg, once);
        }
    }
}
