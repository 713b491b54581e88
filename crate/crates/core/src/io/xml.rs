//! Strict XML reading into a minimal element tree, and canonical writing.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Element>,
}

impl Element {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn required(&self, key: &str) -> Result<&str> {
        self.attr(key).ok_or_else(|| {
            Error::Schema(format!("<{}> is missing attribute `{key}`", self.name))
        })
    }

    /// Rejects attributes outside `allowed`.
    pub fn allow_attrs(&self, allowed: &[&str]) -> Result<()> {
        match self.attrs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::Schema(format!(
                "unknown attribute `{k}` on <{}>",
                self.name
            ))),
            None => Ok(()),
        }
    }

    pub fn expect_name(&self, name: &str) -> Result<()> {
        if self.name == name {
            Ok(())
        } else {
            Err(Error::Schema(format!(
                "expected <{name}>, found <{}>",
                self.name
            )))
        }
    }

    pub fn expect_leaf(&self) -> Result<()> {
        match self.children.first() {
            Some(child) => Err(Error::Schema(format!(
                "unexpected <{}> inside <{}>",
                child.name, self.name
            ))),
            None => Ok(()),
        }
    }

    pub fn unexpected_child(&self, child: &Element) -> Error {
        Error::Schema(format!(
            "unexpected <{}> inside <{}>",
            child.name, self.name
        ))
    }
}

fn syntax(reader: &Reader<&[u8]>, what: impl std::fmt::Display) -> Error {
    Error::Syntax(format!("{what} (at byte {})", reader.buffer_position()))
}

fn open(reader: &Reader<&[u8]>, start: &BytesStart<'_>) -> Result<Element> {
    let name = std::str::from_utf8(start.name().as_ref())
        .map_err(|e| syntax(reader, e))?
        .to_owned();
    let mut attrs = Vec::new();
    for attr in start.attributes().with_checks(true) {
        let attr = attr.map_err(|e| syntax(reader, e))?;
        let key = std::str::from_utf8(attr.key.as_ref())
            .map_err(|e| syntax(reader, e))?
            .to_owned();
        let value = attr.unescape_value().map_err(|e| syntax(reader, e))?;
        attrs.push((key, value.into_owned()));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

/// Parses a UTF-8 document into its root element.
///
/// Malformed input yields [`Error::Syntax`]. Character data inside elements
/// is not part of any schema here, so non-blank text is a schema error.
pub(crate) fn parse(bytes: &[u8]) -> Result<Element> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Syntax(format!("input is not UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    loop {
        let event = reader.read_event().map_err(|e| syntax(&reader, e))?;
        match event {
            Event::Decl(decl) => {
                if root.is_some() || !stack.is_empty() {
                    return Err(syntax(&reader, "misplaced XML declaration"));
                }
                if let Some(enc) = decl.encoding() {
                    let enc = enc.map_err(|e| syntax(&reader, e))?;
                    if !enc.eq_ignore_ascii_case(b"utf-8") {
                        return Err(syntax(&reader, "only UTF-8 documents are supported"));
                    }
                }
            }
            Event::Start(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(syntax(&reader, "content after the root element"));
                }
                let element = open(&reader, &start)?;
                stack.push(element);
            }
            Event::Empty(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err(syntax(&reader, "content after the root element"));
                }
                let element = open(&reader, &start)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(element),
                    None => root = Some(element),
                }
            }
            Event::End(_) => {
                let element = stack
                    .pop()
                    .ok_or_else(|| syntax(&reader, "unmatched end tag"))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(element),
                    None => root = Some(element),
                }
            }
            Event::Text(t) => {
                let raw = t.decode().map_err(|e| syntax(&reader, e))?;
                if !raw.trim().is_empty() {
                    if stack.is_empty() {
                        return Err(syntax(&reader, "text outside the root element"));
                    }
                    return Err(Error::Schema(format!(
                        "unexpected text inside <{}>",
                        stack.last().map(|e| e.name.as_str()).unwrap_or_default()
                    )));
                }
            }
            Event::GeneralRef(_) => {
                if stack.is_empty() {
                    return Err(syntax(&reader, "reference outside the root element"));
                }
                return Err(Error::Schema(format!(
                    "unexpected text inside <{}>",
                    stack.last().map(|e| e.name.as_str()).unwrap_or_default()
                )));
            }
            Event::CData(c) => {
                if stack.is_empty() {
                    return Err(syntax(&reader, "CDATA outside the root element"));
                }
                if !c.iter().all(u8::is_ascii_whitespace) {
                    return Err(Error::Schema("unexpected CDATA content".into()));
                }
            }
            Event::DocType(_) => {
                return Err(Error::Schema("document type declarations are not supported".into()))
            }
            Event::Comment(_) | Event::PI(_) => {}
            Event::Eof => break,
        }
    }

    if let Some(open) = stack.last() {
        return Err(Error::Syntax(format!("unclosed element <{}>", open.name)));
    }
    root.ok_or_else(|| Error::Syntax("document has no root element".into()))
}

/// Escapes an attribute value so that parsing returns it unchanged.
fn escape_attr(value: &str, out: &mut String) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

/// Canonical writer: XML declaration, two-space indent, LF line endings,
/// attributes in the order given.
pub(crate) struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    pub fn new() -> Self {
        Self {
            out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            depth: 0,
        }
    }

    fn tag(&mut self, name: &str, attrs: &[(&str, &str)], empty: bool) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            escape_attr(v, &mut self.out);
            self.out.push('"');
        }
        self.out.push_str(if empty { "/>\n" } else { ">\n" });
    }

    pub fn open(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.tag(name, attrs, false);
        self.depth += 1;
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.tag(name, attrs, true);
    }

    pub fn close(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub fn finish(self) -> String {
        self.out
    }
}
