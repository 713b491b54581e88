use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::Target;
use crate::trace::{Edge, Element, ModelDocument};

use super::xml::{self, Writer};

/// Accepts canonical ids, plus the dotted variant form `V.4` for `V4`.
fn parse_tag(raw: &str) -> Result<Target> {
    if let Ok(target) = raw.parse() {
        return Ok(target);
    }
    raw.strip_prefix("V.")
        .and_then(|rest| format!("V{rest}").parse::<crate::model::VariantId>().ok())
        .map(Target::Variant)
        .ok_or_else(|| Error::Schema(format!("malformed tag `{raw}`")))
}

pub fn parse_model_document(bytes: &[u8]) -> Result<ModelDocument> {
    let root = xml::parse(bytes)?;
    root.expect_name("modelDoc")?;
    root.allow_attrs(&["name", "kind"])?;
    let mut doc = ModelDocument {
        name: root.required("name")?.to_owned(),
        kind: root.required("kind")?.to_owned(),
        elements: Vec::new(),
        edges: Vec::new(),
    };
    let mut ids = HashSet::new();
    for child in &root.children {
        child.expect_leaf()?;
        match child.name.as_str() {
            "element" => {
                child.allow_attrs(&["id", "kind", "label", "stereotype", "tag"])?;
                let id = child.required("id")?.to_owned();
                if !ids.insert(id.clone()) {
                    return Err(Error::Schema(format!("element id `{id}` used twice")));
                }
                doc.elements.push(Element {
                    id,
                    kind: child.required("kind")?.to_owned(),
                    label: child.required("label")?.to_owned(),
                    stereotype: child.attr("stereotype").map(str::to_owned),
                    tag: child.attr("tag").map(parse_tag).transpose()?,
                });
            }
            "edge" => {
                child.allow_attrs(&["from", "to"])?;
                doc.edges.push(Edge::new(child.required("from")?, child.required("to")?));
            }
            _ => return Err(root.unexpected_child(child)),
        }
    }
    if let Some(edge) = doc.edges.iter().find(|e| !ids.contains(&e.from) || !ids.contains(&e.to)) {
        return Err(Error::Schema(format!(
            "edge {} -> {} names a missing element",
            edge.from, edge.to
        )));
    }
    Ok(doc)
}

pub fn serialize_model_document(doc: &ModelDocument) -> String {
    let mut w = Writer::new();
    let head = [("name", doc.name.as_str()), ("kind", doc.kind.as_str())];
    if doc.elements.is_empty() && doc.edges.is_empty() {
        w.empty("modelDoc", &head);
        return w.finish();
    }
    w.open("modelDoc", &head);
    for e in &doc.elements {
        let tag = e.tag.map(|t| t.to_string());
        let mut attrs = vec![("id", e.id.as_str()), ("kind", e.kind.as_str()), ("label", e.label.as_str())];
        if let Some(s) = &e.stereotype {
            attrs.push(("stereotype", s));
        }
        if let Some(t) = &tag {
            attrs.push(("tag", t));
        }
        w.empty("element", &attrs);
    }
    for edge in &doc.edges {
        w.empty("edge", &[("from", &edge.from), ("to", &edge.to)]);
    }
    w.close("modelDoc");
    w.finish()
}
