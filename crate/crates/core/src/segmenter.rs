//! Finds the debate body in cleaned text and cuts it into raw utterances.
//!
//! Stages, in order: locate the opening line, drop standalone asides, cut
//! at the closing time expression, then split on speaker lines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::Grammar;
use crate::ingest::PagedText;
use crate::model::DebateMeta;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentError {
    #[error("no-debate-found: no opening formula and no speaker line")]
    NoDebateFound,
    #[error("no-utterances: the debate body holds no speaker line")]
    NoUtterances,
}

impl SegmentError {
    pub fn rule(&self) -> &'static str {
        match self {
            SegmentError::NoDebateFound => "no-debate-found",
            SegmentError::NoUtterances => "no-utterances",
        }
    }
}

/// Non-fatal finding recorded while processing a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Warning {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

/// One text line with the journal page it sits on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyLine {
    pub page: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawUtterance {
    pub order: u32,
    pub page_start: u32,
    pub speaker_string: String,
    pub text: String,
}

/// Half-open line range `[start, end)` of the debate body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionEnd {
    pub end: usize,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmented {
    pub meta: DebateMeta,
    pub utterances: Vec<RawUtterance>,
    pub asides_removed: usize,
    pub warnings: Vec<Warning>,
}

pub fn flatten(pt: &PagedText) -> Vec<BodyLine> {
    pt.pages
        .iter()
        .flat_map(|p| {
            p.lines.iter().map(move |l| BodyLine {
                page: p.number,
                text: l.clone(),
            })
        })
        .collect()
}

/// Start is the first opening-formula line, else the first speaker line.
/// The provisional end is the end of the document.
pub fn detect_debate_bounds(lines: &[BodyLine], g: &Grammar) -> Result<Bounds, SegmentError> {
    let start = lines
        .iter()
        .position(|l| g.is_opening(&l.text))
        .or_else(|| lines.iter().position(|l| g.is_speaker_line(&l.text)))
        .ok_or(SegmentError::NoDebateFound)?;
    Ok(Bounds {
        start,
        end: lines.len(),
    })
}

/// Removes standalone aside lines. Returns the kept lines and the number
/// removed.
pub fn clean_asides(lines: &[BodyLine], g: &Grammar) -> (Vec<BodyLine>, usize) {
    let kept: Vec<BodyLine> = lines
        .iter()
        .filter(|l| !g.is_aside(&l.text))
        .cloned()
        .collect();
    let removed = lines.len() - kept.len();
    (kept, removed)
}

/// Position of the last closing time expression, scanning backwards. The
/// body ends just before it. Without a match the body runs to the end.
pub fn detect_session_end(lines: &[BodyLine], g: &Grammar) -> SessionEnd {
    match lines.iter().rposition(|l| g.is_session_end(&l.text)) {
        Some(end) => SessionEnd { end, found: true },
        None => SessionEnd {
            end: lines.len(),
            found: false,
        },
    }
}

/// Splits the bounded body into utterances. Each speaker line opens one;
/// following lines up to the next speaker line are appended with single
/// spaces. Text ahead of the first speaker line and utterances left without
/// text are dropped with a warning.
pub fn tag_utterances(
    lines: &[BodyLine],
    g: &Grammar,
) -> Result<(Vec<RawUtterance>, Vec<Warning>), SegmentError> {
    let mut out: Vec<RawUtterance> = Vec::new();
    let mut warnings = Vec::new();
    let mut current: Option<RawUtterance> = None;
    let mut orphan_lines = 0usize;
    let mut empty = 0usize;

    let mut flush = |cur: Option<RawUtterance>, out: &mut Vec<RawUtterance>| {
        if let Some(mut u) = cur {
            if u.text.is_empty() {
                empty += 1;
            } else {
                u.order = out.len() as u32 + 1;
                out.push(u);
            }
        }
    };

    for line in lines {
        if let Some((speaker, text)) = g.speaker_line(&line.text) {
            flush(current.take(), &mut out);
            current = Some(RawUtterance {
                order: 0,
                page_start: line.page,
                speaker_string: speaker.to_string(),
                text: text.trim().to_string(),
            });
            continue;
        }
        let t = line.text.trim();
        if t.is_empty() {
            continue;
        }
        match current.as_mut() {
            Some(u) => {
                if !u.text.is_empty() {
                    u.text.push(' ');
                }
                u.text.push_str(t);
            }
            None => orphan_lines += 1,
        }
    }
    flush(current.take(), &mut out);

    if orphan_lines > 0 {
        warnings.push(Warning::new(
            "orphan-text",
            format!("{orphan_lines} line(s) before the first speaker line were skipped"),
        ));
    }
    if empty > 0 {
        warnings.push(Warning::new(
            "empty-utterance",
            format!("{empty} speaker line(s) without text were dropped"),
        ));
    }
    if out.is_empty() {
        return Err(SegmentError::NoUtterances);
    }
    Ok((out, warnings))
}

/// Runs the whole segmentation chain over header-cleaned text.
pub fn segment(pt: &PagedText, g: &Grammar) -> Result<Segmented, SegmentError> {
    let lines = flatten(pt);
    let bounds = detect_debate_bounds(&lines, g)?;
    let (body, asides_removed) = clean_asides(&lines[bounds.start..bounds.end], g);
    let end = detect_session_end(&body, g);
    let mut warnings = Vec::new();
    if !end.found {
        warnings.push(Warning::new(
            "no-session-end",
            "no closing time expression; the body runs to the end of the document",
        ));
    }
    let (utterances, w) = tag_utterances(&body[..end.end], g)?;
    warnings.extend(w);
    if asides_removed > 0 {
        tracing::debug!(document = %pt.meta.document_id(), asides_removed, "asides dropped");
    }
    Ok(Segmented {
        meta: pt.meta.clone(),
        utterances,
        asides_removed,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::model::Page;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn g() -> Grammar {
        Grammar::new(&Config::default()).unwrap()
    }

    fn body(lines: &[&str]) -> Vec<BodyLine> {
        lines
            .iter()
            .map(|l| BodyLine { page: 1, text: l.to_string() })
            .collect()
    }

    #[test]
    fn opening_formula_starts_body() {
        let lines = body(&[
            "SUMÁRIO",
            "O Sr. Presidente declarou aberta a sessão às 15 horas.",
            "Estavam presentes os seguintes Srs. Deputados:",
            "Alberto Alves.",
            "O Sr. Presidente: — Srs. Deputados, está aberta a sessão.",
            "O Sr. Alberto Alves (AB): — Blah",
        ]);
        // hand-annotated: the fifth line (index 4) is the opening
        assert_eq!(detect_debate_bounds(&lines, &g()).unwrap(), Bounds { start: 4, end: 6 });
    }

    #[test]
    fn falls_back_to_first_speaker_line() {
        let lines = body(&["Preâmbulo.", "O Sr. Alberto Alves (AB): — Blah", "O Sr. Presidente: — Obrigado."]);
        assert_eq!(detect_debate_bounds(&lines, &g()).unwrap().start, 1);
    }

    #[test]
    fn summary_only_document() {
        let lines = body(&["SUMÁRIO", "Foram aprovados vários votos."]);
        assert_eq!(detect_debate_bounds(&lines, &g()), Err(SegmentError::NoDebateFound));
    }

    #[test]
    fn asides_removed_by_line() {
        let lines = body(&[
            "O Sr. A B (X): — Texto.",
            "Aplausos do PS.",
            "Risos.",
            "continua com aplausos da bancada.",
        ]);
        let (kept, removed) = clean_asides(&lines, &g());
        assert_eq!(removed, 2);
        let texts: Vec<&str> = kept.iter().map(|l| l.text.as_str()).collect();
        assert_eq!(texts, ["O Sr. A B (X): — Texto.", "continua com aplausos da bancada."]);
        assert_eq!(clean_asides(&kept, &g()).0, kept);
    }

    #[test]
    fn session_end_truncates_at_last_time_line() {
        let lines = body(&[
            "O Sr. A B (X): — Eram 18 horas.",
            "Eram 17 horas.",
            "O Sr. Presidente: — Está encerrada a sessão.",
            "Eram 18 horas e 30 minutos.",
            "Entraram durante a sessão os seguintes Srs. Deputados:",
        ]);
        assert_eq!(detect_session_end(&lines, &g()), SessionEnd { end: 3, found: true });
        let none = body(&["O Sr. A B (X): — nada."]);
        assert_eq!(detect_session_end(&none, &g()), SessionEnd { end: 1, found: false });
    }

    #[test]
    fn tags_listing_line() {
        let (u, w) = tag_utterances(&body(&["O Sr. Alberto Alves (AB): — Blah"]), &g()).unwrap();
        assert!(w.is_empty());
        assert_eq!(
            u,
            vec![RawUtterance {
                order: 1,
                page_start: 1,
                speaker_string: "O Sr. Alberto Alves (AB)".into(),
                text: "Blah".into()
            }]
        );
    }

    #[test]
    fn continuation_across_pages_keeps_page_start() {
        let lines = vec![
            BodyLine { page: 3, text: "O Sr. A B (X): — Começo".into() },
            BodyLine { page: 4, text: "e fim.".into() },
            BodyLine { page: 4, text: "O Sr. Presidente: — Obrigado.".into() },
        ];
        let (u, _) = tag_utterances(&lines, &g()).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!((u[0].order, u[0].page_start, u[0].text.as_str()), (1, 3, "Começo e fim."));
        assert_eq!((u[1].order, u[1].page_start), (2, 4));
    }

    #[test]
    fn empty_and_orphan_text_warn() {
        let (u, w) = tag_utterances(
            &body(&["texto solto", "O Sr. Presidente: —", "O Sr. A B (X): — ok", "", "mais"]),
            &g(),
        )
        .unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].order, 1);
        assert_eq!(u[0].text, "ok mais");
        let codes: Vec<&str> = w.iter().map(|w| w.code.as_str()).collect();
        assert_eq!(codes, ["orphan-text", "empty-utterance"]);
        assert_eq!(tag_utterances(&body(&["nada"]), &g()), Err(SegmentError::NoUtterances));
    }

    #[test]
    fn segment_reports_missing_session_end() {
        let pt = PagedText {
            meta: DebateMeta::r3(1, 1, 1, NaiveDate::from_ymd_opt(1976, 6, 3).unwrap()),
            pages: vec![Page { number: 1, lines: vec!["O Sr. Presidente: — Srs. Deputados, está aberta a sessão.".into()] }],
        };
        let s = segment(&pt, &g()).unwrap();
        assert_eq!(s.utterances.len(), 1);
        assert_eq!(s.warnings[0].code, "no-session-end");
    }

    proptest! {
        #[test]
        fn tagging_invariants(picks in proptest::collection::vec((0usize..6, 1u32..3), 1..30)) {
            let pool = [
                "O Sr. Alberto Alves (AB): — primeira parte",
                "A Sr.ª Ana Gomes (PS):— outra",
                "continuação simples",
                "",
                "mais: texto com dois pontos",
                "O Sr. Presidente: -",
            ];
            let mut page = 1;
            let lines: Vec<BodyLine> = picks
                .iter()
                .map(|(i, step)| {
                    if *step == 2 { page += 1; }
                    BodyLine { page, text: pool[*i].to_string() }
                })
                .collect();
            let g = g();
            if let Ok((us, _)) = tag_utterances(&lines, &g) {
                let all: String = lines.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join(" ");
                for (i, u) in us.iter().enumerate() {
                    prop_assert_eq!(u.order as usize, i + 1);
                    prop_assert!(!u.speaker_string.contains(':'));
                    prop_assert_eq!(u.speaker_string.trim(), u.speaker_string.as_str());
                    prop_assert!(!u.text.trim().is_empty());
                    if i > 0 { prop_assert!(us[i - 1].page_start <= u.page_start); }
                }
                // subsequence check: every text word appears in order in the input
                let mut rest = all.as_str();
                for w in us.iter().flat_map(|u| u.text.split(' ')) {
                    let p = rest.find(w);
                    prop_assert!(p.is_some(), "word {w} not found in order");
                    rest = &rest[p.unwrap() + w.len()..];
                }
            }
        }
    }
}
