//! Name folding and edit-distance similarity used for speaker matching.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Honorific prefixes, already folded. Longer forms come first so that
/// `a sra.` wins over `a sr.`.
const HONORIFICS: &[&str] = &[
    "a senhora",
    "o senhor",
    "as sr.as",
    "os srs.",
    "a sr.a",
    "a sra.",
    "a sr.",
    "o sr.",
    "sr.a",
    "sra.",
    "sr.",
];

/// Lowercases, strips diacritics (compatibility decomposition, so `ª`
/// becomes `a`) and collapses whitespace runs to single spaces.
pub fn fold(s: &str) -> String {
    let lowered: String = s
        .nfkd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect();
    collapse_whitespace(&lowered)
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits a trailing parenthesized group off `s`: `"Ana Lopes (PS)"` gives
/// `("Ana Lopes", Some("PS"))`. Unbalanced input is returned untouched.
pub fn split_trailing_parens(s: &str) -> (&str, Option<&str>) {
    let t = s.trim_end();
    if !t.ends_with(')') {
        return (s.trim(), None);
    }
    let mut depth = 0usize;
    for (i, c) in t.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' => {
                depth -= 1;
                if depth == 0 {
                    let inner = &t[i + 1..t.len() - 1];
                    return (t[..i].trim(), Some(inner.trim()));
                }
            }
            _ => {}
        }
    }
    (s.trim(), None)
}

/// Removes one leading honorific from an already folded string.
fn strip_one_honorific(folded: &str) -> Option<&str> {
    HONORIFICS.iter().find_map(|h| {
        let rest = folded.strip_prefix(h)?;
        if rest.is_empty() || rest.starts_with(' ') {
            Some(rest.trim_start())
        } else {
            None
        }
    })
}

/// Key used for the registry index and for fuzzy comparison: folded, with
/// honorifics and a trailing parenthesized party removed. Idempotent.
pub fn normalize_name(s: &str) -> String {
    let mut cur = fold(s);
    loop {
        let (base, paren) = split_trailing_parens(&cur);
        let base = strip_one_honorific(base).unwrap_or(base);
        if paren.is_none() && base.len() == cur.len() {
            return cur;
        }
        cur = base.trim().to_string();
    }
}

/// Leading honorific of a raw speaker string, if any.
pub fn has_honorific(s: &str) -> bool {
    strip_one_honorific(&fold(s)).is_some()
}

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (above + 1).min(row[j] + 1).min(diag + cost);
            diag = above;
        }
    }
    row[b.len()]
}

/// `1 - distance / max(len)`, in `[0, 1]`.
pub fn similarity_chars(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    similarity_chars(&a, &b)
}

/// Upper bound of [`similarity_chars`] from lengths alone.
pub fn similarity_bound(len_a: usize, len_b: usize) -> f64 {
    let longest = len_a.max(len_b);
    if longest == 0 {
        return 1.0;
    }
    1.0 - len_a.abs_diff(len_b) as f64 / longest as f64
}
