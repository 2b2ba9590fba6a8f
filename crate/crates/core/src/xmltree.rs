//! Minimal element tree over quick-xml, shared by the registry and debate
//! readers. Keeps line numbers so schema errors can point at the source.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct XmlSyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    pub line: usize,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// Concatenated character data of direct text children.
    pub fn text(&self) -> String {
        self.children
            .iter()
            .filter_map(|n| match n {
                Node::Text(t) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect()
    }

    /// True when some direct text child holds more than whitespace.
    pub fn has_stray_text(&self) -> bool {
        self.children
            .iter()
            .any(|n| matches!(n, Node::Text(t) if !t.trim().is_empty()))
    }
}

fn line_at(src: &str, pos: usize) -> usize {
    let pos = pos.min(src.len());
    src.as_bytes()[..pos].iter().filter(|b| **b == b'\n').count() + 1
}

fn open(e: &BytesStart<'_>, line: usize) -> Result<Element, XmlSyntaxError> {
    let err = |message: String| XmlSyntaxError { line, message };
    let name = std::str::from_utf8(e.name().as_ref())
        .map_err(|e| err(e.to_string()))?
        .to_string();
    let mut attrs = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(|e| err(e.to_string()))?;
        let key = std::str::from_utf8(a.key.as_ref())
            .map_err(|e| err(e.to_string()))?
            .to_string();
        if attrs.iter().any(|(k, _)| *k == key) {
            return Err(err(format!("duplicate attribute '{key}'")));
        }
        let value = a.unescape_value().map_err(|e| err(e.to_string()))?;
        attrs.push((key, value.into_owned()));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
        line,
    })
}

/// Parses a whole document and returns its root element.
pub fn parse(src: &str) -> Result<Element, XmlSyntaxError> {
    let mut reader = Reader::from_str(src);
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    loop {
        let pos = reader.buffer_position() as usize;
        let line = line_at(src, pos);
        let err = |message: String| XmlSyntaxError { line, message };
        let event = reader
            .read_event()
            .map_err(|e| XmlSyntaxError {
                line: line_at(src, reader.buffer_position() as usize),
                message: e.to_string(),
            })?;
        match event {
            Event::Start(e) => stack.push(open(&e, line)?),
            Event::Empty(e) => {
                let el = open(&e, line)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(err("content after the root element".into())),
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| err("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None if root.is_none() => root = Some(el),
                    None => return Err(err("content after the root element".into())),
                }
            }
            Event::Text(t) => {
                let text = t.unescape().map_err(|e| err(e.to_string()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(text.into_owned())),
                    None if text.trim().is_empty() => {}
                    None => return Err(err("text outside the root element".into())),
                }
            }
            Event::CData(t) => {
                let text = String::from_utf8(t.into_inner().into_owned())
                    .map_err(|e| err(e.to_string()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(text)),
                    None => return Err(err("CDATA outside the root element".into())),
                }
            }
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(XmlSyntaxError {
            line: line_at(src, src.len()),
            message: format!("unclosed element <{}>", stack[stack.len() - 1].name),
        });
    }
    root.ok_or(XmlSyntaxError {
        line: 1,
        message: "document has no root element".into(),
    })
}

/// Escapes character data.
pub fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

/// Escapes an attribute value for double-quoted output.
pub fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_tree_with_lines() {
        let doc = "<?xml version=\"1.0\"?>\n<a x=\"1\">\n  <b>t &amp; u</b>\n  <c/>\n</a>\n";
        let root = parse(doc).unwrap();
        assert_eq!(root.name, "a");
        assert_eq!(root.attr("x"), Some("1"));
        let kids: Vec<_> = root.elements().collect();
        assert_eq!(kids.len(), 2);
        assert_eq!(kids[0].text(), "t & u");
        assert_eq!(kids[0].line, 3);
        assert_eq!(kids[1].line, 4);
        assert!(!root.has_stray_text());
    }

    #[test]
    fn reports_syntax_errors() {
        assert!(parse("<a><b></a>").is_err());
        assert!(parse("<a>").is_err());
        assert!(parse("").is_err());
        assert!(parse("<a x=\"1\" x=\"2\"/>").is_err());
        assert!(parse("<a/><b/>").is_err());
    }

    #[test]
    fn escapes_round_trip() {
        let raw = "a<b>&\"c\"\r\n\td";
        let mut attr = String::new();
        escape_attr(raw, &mut attr);
        let mut text = String::new();
        escape_text(raw, &mut text);
        let doc = format!("<e v=\"{attr}\">{text}</e>");
        let root = parse(&doc).unwrap();
        assert_eq!(root.attr("v"), Some(raw));
        assert_eq!(root.text(), raw);
    }
}
