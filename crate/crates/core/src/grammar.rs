//! Compiled line grammars: page headers, speaker lines, asides, session
//! opening and closing.

use regex::Regex;

use crate::config::{Config, ConfigError};

#[derive(Debug, Clone)]
pub struct Grammar {
    headers: Vec<Regex>,
    opening: Vec<Regex>,
    session_end: Vec<Regex>,
    speaker: Regex,
    aside: Option<Regex>,
    max_speaker_len: usize,
}

fn compile(patterns: &[String]) -> Result<Vec<Regex>, ConfigError> {
    patterns
        .iter()
        .map(|p| {
            Regex::new(p).map_err(|source| ConfigError::Pattern {
                pattern: p.clone(),
                source,
            })
        })
        .collect()
}

fn alternation(words: &[String]) -> String {
    let mut words: Vec<&String> = words.iter().collect();
    // longest first so `–` never shadows a longer variant sharing a prefix
    words.sort_by_key(|w| std::cmp::Reverse(w.len()));
    words
        .iter()
        .map(|w| regex::escape(w))
        .collect::<Vec<_>>()
        .join("|")
}

impl Grammar {
    pub fn new(cfg: &Config) -> Result<Self, ConfigError> {
        let seg = &cfg.segmenter;
        let spaces = seg.max_dash_spacing;
        let speaker = format!(
            r"^\s*(?P<speaker>[^:\s][^:]*?)\s*:[ \t\u{{A0}}]{{0,{spaces}}}(?:{})[ \t\u{{A0}}]{{0,{spaces}}}(?P<text>.*?)\s*$",
            alternation(&seg.dash_variants)
        );
        let speaker = Regex::new(&speaker).map_err(|source| ConfigError::Pattern {
            pattern: speaker.clone(),
            source,
        })?;
        let aside = if seg.aside_lexicon.is_empty() {
            None
        } else {
            let p = format!(
                r"^\(?\s*(?:{})\b.*\.\s*\)?\.?$",
                alternation(&seg.aside_lexicon)
            );
            Some(Regex::new(&p).map_err(|source| ConfigError::Pattern { pattern: p, source })?)
        };
        Ok(Grammar {
            headers: compile(&cfg.headers.patterns)?,
            opening: compile(&seg.opening_patterns)?,
            session_end: compile(&seg.session_end_patterns)?,
            speaker,
            aside,
            max_speaker_len: seg.max_speaker_len,
        })
    }

    /// Splits a speaker line into `(speaker_string, text)`. The speaker part
    /// must start with an uppercase letter, stay within the length limit and
    /// not end in a digit, which keeps clock times and enumerations out.
    pub fn speaker_line<'a>(&self, line: &'a str) -> Option<(&'a str, &'a str)> {
        let caps = self.speaker.captures(line)?;
        let speaker = caps.name("speaker")?.as_str().trim();
        let first = speaker.chars().next()?;
        if !first.is_uppercase() {
            return None;
        }
        if speaker.chars().count() > self.max_speaker_len {
            return None;
        }
        if speaker.chars().last().is_some_and(|c| c.is_ascii_digit()) {
            return None;
        }
        Some((speaker, caps.name("text").map_or("", |m| m.as_str())))
    }

    pub fn is_speaker_line(&self, line: &str) -> bool {
        self.speaker_line(line).is_some()
    }

    pub fn is_header(&self, line: &str) -> bool {
        let t = line.trim();
        !t.is_empty() && self.headers.iter().any(|r| r.is_match(t))
    }

    pub fn is_opening(&self, line: &str) -> bool {
        self.opening.iter().any(|r| r.is_match(line))
    }

    pub fn is_session_end(&self, line: &str) -> bool {
        let t = line.trim();
        self.session_end.iter().any(|r| r.is_match(t))
    }

    /// Standalone aside line. Speaker lines never count as asides.
    pub fn is_aside(&self, line: &str) -> bool {
        let t = line.trim();
        match &self.aside {
            Some(r) => r.is_match(t) && !self.is_speaker_line(t),
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Grammar {
        Grammar::new(&Config::default()).unwrap()
    }

    #[test]
    fn speaker_line_variants() {
        let g = g();
        assert_eq!(
            g.speaker_line("O Sr. Alberto Alves (AB): — Blah"),
            Some(("O Sr. Alberto Alves (AB)", "Blah"))
        );
        for line in [
            "O Sr. Presidente: - Tem a palavra.",
            "O Sr. Presidente:- Tem a palavra.",
            "O Sr. Presidente :  –  Tem a palavra.",
            "O Sr. Presidente: —Tem a palavra.",
        ] {
            assert_eq!(g.speaker_line(line), Some(("O Sr. Presidente", "Tem a palavra.")), "{line}");
        }
        assert!(g.speaker_line("O Sr. Presidente:    — três espaços").is_none());
        assert!(g.speaker_line("O Sr. Presidente — sem dois pontos").is_none());
        assert!(g.speaker_line("às 15: — horas").is_none());
        assert!(g.speaker_line("Artigo 5: — texto").is_none());
        let long = format!("O Sr. {}: — x", "A".repeat(130));
        assert!(g.speaker_line(&long).is_none());
        assert_eq!(g.speaker_line("A Sr.ª Presidente: —"), Some(("A Sr.ª Presidente", "")));
    }

    #[test]
    fn asides() {
        let g = g();
        for line in ["Aplausos do PS.", "Risos.", "(Protestos do PCP.)", "(Aplausos do PSD e do CDS-PP).", "Pausa."] {
            assert!(g.is_aside(line), "{line}");
        }
        for line in [
            "Os aplausos do PS foram longos.",
            "Aplausos sem ponto",
            "Vozes do PSD: — Muito bem.",
            "Riso amarelo.",
        ] {
            assert!(!g.is_aside(line), "{line}");
        }
    }

    #[test]
    fn session_end_grammar() {
        let g = g();
        for line in ["Eram 18 horas.", "Eram 18 horas e 30 minutos.", "Era 1 hora e 1 minuto.", "(Eram 19 horas e 5 minutos.)"] {
            assert!(g.is_session_end(line), "{line}");
        }
        for line in ["Eram 18 horas quando entrou.", "O Sr. X: — Eram 18 horas.", "eram dezoito horas."] {
            assert!(!g.is_session_end(line), "{line}");
        }
    }

    #[test]
    fn headers_and_opening() {
        let g = g();
        for line in ["I SÉRIE — NÚMERO 23", "I Série - Número 4", "14", "3 DE JUNHO DE 1976", "DIÁRIO DA ASSEMBLEIA DA REPÚBLICA"] {
            assert!(g.is_header(line), "{line}");
        }
        assert!(!g.is_header("O Sr. Presidente: — Srs. Deputados"));
        assert!(!g.is_header(""));
        assert!(g.is_opening("O Sr. Presidente: — Srs. Deputados, está aberta a sessão."));
        assert!(!g.is_opening("O Sr. Presidente declarou aberta a sessão às 15 horas."));
    }
}
