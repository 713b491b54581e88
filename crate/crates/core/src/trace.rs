//! Traceability between variants and tagged elements of model documents.
//!
//! A [`ModelDocument`] is a generic element graph (an activity diagram, a
//! class diagram, ...). Elements stereotyped `variant` carry a tag naming
//! the variant or value they realize; customizing a document for a product
//! drops the elements whose tag the product does not select.

use std::collections::{HashMap, HashSet};

use crate::configure::{Configuration, Selection};
use crate::diag::{Code, Diagnostic};
use crate::error::{Error, Result};
use crate::model::{FamilyModel, Target};

/// Stereotype marking an element as variant-specific.
pub const VARIANT_STEREOTYPE: &str = "variant";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: String,
    pub kind: String,
    pub label: String,
    pub stereotype: Option<String>,
    pub tag: Option<Target>,
}

impl Element {
    pub fn new(id: impl Into<String>, kind: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            label: label.into(),
            stereotype: None,
            tag: None,
        }
    }

    /// Marks the element `<<variant>>` and tags it.
    pub fn tagged(mut self, tag: Target) -> Self {
        self.stereotype = Some(VARIANT_STEREOTYPE.into());
        self.tag = Some(tag);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

impl Edge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub name: String,
    pub kind: String,
    pub elements: Vec<Element>,
    pub edges: Vec<Edge>,
}

impl ModelDocument {
    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Element ids reachable from `start` along edges, `start` included.
    pub fn reachable_from(&self, start: &str) -> HashSet<String> {
        let mut seen = HashSet::from([start.to_owned()]);
        let mut stack = vec![start.to_owned()];
        while let Some(node) = stack.pop() {
            for edge in self.edges.iter().filter(|e| e.from == node) {
                if seen.insert(edge.to.clone()) {
                    stack.push(edge.to.clone());
                }
            }
        }
        seen
    }
}

/// Finds tags without a model target and variant elements without tags.
pub fn check_traces(doc: &ModelDocument, model: &FamilyModel) -> Vec<Diagnostic> {
    let mut found = Vec::new();
    for element in &doc.elements {
        match element.tag {
            Some(tag) if !model.contains(tag) => found.push(Diagnostic::new(
                Code::DanglingTrace,
                &element.id,
                format!("tag {tag} has no counterpart in the model"),
            )),
            None if element.stereotype.as_deref() == Some(VARIANT_STEREOTYPE) => {
                found.push(Diagnostic::new(
                    Code::UntaggedVariantElement,
                    &element.id,
                    "variant element carries no tag",
                ))
            }
            _ => {}
        }
    }
    found
}

/// Location of an element across a set of documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementRef {
    pub document: String,
    pub element: String,
}

/// Elements realizing `id`. A variant query also matches elements tagged
/// with any of its values.
pub fn trace_forward(model: &FamilyModel, id: Target, docs: &[ModelDocument]) -> Result<Vec<ElementRef>> {
    if !model.contains(id) {
        return Err(Error::UnknownId(id.to_string()));
    }
    let matches = |tag: Target| match id {
        Target::Variant(v) => tag.variant() == v,
        Target::Value(_) => tag == id,
    };
    Ok(docs
        .iter()
        .flat_map(|doc| {
            doc.elements
                .iter()
                .filter(move |e| e.tag.is_some_and(matches))
                .map(move |e| ElementRef {
                    document: doc.name.clone(),
                    element: e.id.clone(),
                })
        })
        .collect())
}

/// The tag of the first element named `element` in `docs`.
pub fn trace_backward(docs: &[ModelDocument], element: &str) -> Result<Option<Target>> {
    docs.iter()
        .find_map(|doc| doc.element(element))
        .map(|e| e.tag)
        .ok_or_else(|| Error::UnknownId(element.to_owned()))
}

/// Derives the document of one product.
///
/// Elements tagged with an excluded variant or an unselected value are
/// removed together with their edges. A removed element with exactly one
/// incoming and one outgoing edge is bridged: its predecessor is connected
/// to the next surviving element down the chain. Other removals just drop
/// their edges.
pub fn customize_document(
    doc: &ModelDocument,
    model: &FamilyModel,
    config: &Configuration,
) -> Result<ModelDocument> {
    let problems = check_traces(doc, model);
    if !problems.is_empty() {
        return Err(Error::DanglingTrace(problems));
    }
    let missing: Vec<String> = model
        .variants
        .iter()
        .filter(|v| !config.states.contains_key(&v.id))
        .map(|v| v.id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteConfiguration(missing));
    }

    let removed: HashSet<&str> = doc
        .elements
        .iter()
        .filter(|e| match e.tag {
            None => false,
            Some(Target::Variant(v)) => !config.states.get(&v).is_some_and(Selection::is_included),
            Some(Target::Value(x)) => !config.states.get(&x.variant()).is_some_and(|s| s.selects(x)),
        })
        .map(|e| e.id.as_str())
        .collect();

    let mut incoming: HashMap<&str, usize> = HashMap::new();
    let mut outgoing: HashMap<&str, Vec<&str>> = HashMap::new();
    for edge in &doc.edges {
        *incoming.entry(edge.to.as_str()).or_default() += 1;
        outgoing.entry(edge.from.as_str()).or_default().push(edge.to.as_str());
    }
    let pass_through = |id: &str| {
        incoming.get(id) == Some(&1) && outgoing.get(id).is_some_and(|o| o.len() == 1)
    };
    // Follows removed pass-through elements to the first survivor.
    let bridge = |start: &str| -> Option<String> {
        let mut node = start.to_owned();
        let mut visited = HashSet::new();
        while removed.contains(node.as_str()) {
            if !pass_through(&node) || !visited.insert(node.clone()) {
                return None;
            }
            node = outgoing[node.as_str()][0].to_owned();
        }
        Some(node)
    };

    let mut edges: Vec<Edge> = Vec::new();
    for edge in &doc.edges {
        if removed.contains(edge.from.as_str()) {
            continue;
        }
        if let Some(to) = bridge(&edge.to) {
            let candidate = Edge::new(edge.from.clone(), to);
            if !edges.contains(&candidate) {
                edges.push(candidate);
            }
        }
    }

    Ok(ModelDocument {
        name: doc.name.clone(),
        kind: doc.kind.clone(),
        elements: doc
            .elements
            .iter()
            .filter(|e| !removed.contains(e.id.as_str()))
            .cloned()
            .collect(),
        edges,
    })
}

/// Graphviz rendering; variant elements are drawn dashed with their tag.
pub fn document_dot(doc: &ModelDocument) -> String {
    let mut out = format!("digraph \"{}\" {{\n", doc.name.replace('"', "\\\""));
    for e in &doc.elements {
        let label = match e.tag {
            Some(tag) => format!("{}\\n{{{tag}}}", e.label),
            None => e.label.clone(),
        };
        let style = if e.tag.is_some() { ", style=dashed" } else { "" };
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\"{style}];\n",
            e.id,
            label.replace('"', "\\\"")
        ));
    }
    for edge in &doc.edges {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", edge.from, edge.to));
    }
    out.push_str("}\n");
    out
}

/// Plain listing: one line per element, then one per edge.
pub fn document_text(doc: &ModelDocument) -> String {
    let mut out = format!("{} ({})\n", doc.name, doc.kind);
    for e in &doc.elements {
        match e.tag {
            Some(tag) => out.push_str(&format!("  {} [{}] {} {{{tag}}}\n", e.id, e.kind, e.label)),
            None => out.push_str(&format!("  {} [{}] {}\n", e.id, e.kind, e.label)),
        }
    }
    for edge in &doc.edges {
        out.push_str(&format!("  {} -> {}\n", edge.from, edge.to));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::hall_booking;

    fn t(s: &str) -> Target {
        s.parse().unwrap()
    }

    fn notification_doc() -> ModelDocument {
        ModelDocument {
            name: "reserve".into(),
            kind: "activity".into(),
            elements: vec![
                Element::new("start", "initial", "Start"),
                Element::new("book", "action", "Book hall"),
                Element::new("notify", "action", "Notification").tagged(t("V4")),
                Element::new("fax", "action", "Send fax").tagged(t("V4.1")),
                Element::new("mail", "action", "Send email").tagged(t("V4.2")),
                Element::new("paper", "action", "Print confirmation").tagged(t("V4.3")),
                Element::new("end", "final", "End"),
            ],
            edges: vec![
                Edge::new("start", "book"),
                Edge::new("book", "notify"),
                Edge::new("notify", "fax"),
                Edge::new("notify", "mail"),
                Edge::new("notify", "paper"),
                Edge::new("fax", "end"),
                Edge::new("mail", "end"),
                Edge::new("paper", "end"),
            ],
        }
    }

    fn printed_paper_only() -> Configuration {
        let mut c = Configuration::new("Academic")
            .with("V4".parse().unwrap(), Selection::Included([t("V4.3")].iter().map(|x| match x {
                Target::Value(v) => *v,
                Target::Variant(_) => unreachable!(),
            }).collect()));
        c.extend_excluded(&hall_booking());
        c
    }

    #[test]
    fn notification_traces_resolve() {
        assert!(check_traces(&notification_doc(), &hall_booking()).is_empty());
    }

    #[test]
    fn dangling_and_untagged() {
        let mut doc = notification_doc();
        doc.elements[1].tag = Some(t("V9"));
        doc.elements[2].tag = None;
        let codes: Vec<_> = check_traces(&doc, &hall_booking()).into_iter().map(|d| (d.subject, d.code)).collect();
        assert_eq!(
            codes,
            [("book".into(), Code::DanglingTrace), ("notify".into(), Code::UntaggedVariantElement)]
        );
    }

    #[test]
    fn forward_and_backward() {
        let docs = [notification_doc()];
        let model = hall_booking();
        let fwd: Vec<String> = trace_forward(&model, t("V4"), &docs).unwrap().into_iter().map(|r| r.element).collect();
        assert_eq!(fwd, ["notify", "fax", "mail", "paper"]);
        let fwd: Vec<String> = trace_forward(&model, t("V4.1"), &docs).unwrap().into_iter().map(|r| r.element).collect();
        assert_eq!(fwd, ["fax"]);
        assert_eq!(trace_backward(&docs, "notify").unwrap(), Some(t("V4")));
        assert_eq!(trace_backward(&docs, "book").unwrap(), None);
        assert!(trace_backward(&docs, "nope").is_err());
        assert!(trace_forward(&model, t("V9"), &docs).is_err());
    }

    #[test]
    fn printed_paper_keeps_only_its_branch() {
        let out = customize_document(&notification_doc(), &hall_booking(), &printed_paper_only()).unwrap();
        let ids: Vec<&str> = out.elements.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["start", "book", "notify", "paper", "end"]);
        assert!(out.reachable_from("start").contains("end"));
    }

    #[test]
    fn pass_through_chain_is_bridged() {
        let doc = ModelDocument {
            name: "chain".into(),
            kind: "activity".into(),
            elements: vec![
                Element::new("a", "action", "a"),
                Element::new("r1", "action", "r1").tagged(t("V4.1")),
                Element::new("r2", "action", "r2").tagged(t("V4.2")),
                Element::new("b", "action", "b"),
            ],
            edges: vec![Edge::new("a", "r1"), Edge::new("r1", "r2"), Edge::new("r2", "b")],
        };
        let out = customize_document(&doc, &hall_booking(), &printed_paper_only()).unwrap();
        assert_eq!(out.edges, [Edge::new("a", "b")]);
    }

    #[test]
    fn full_selection_is_identity() {
        let mut config = Configuration::new("NonAcademic");
        for v in hall_booking().variants {
            config.states.insert(v.id, Selection::Included(v.values.iter().map(|x| x.id).collect()));
        }
        let doc = notification_doc();
        assert_eq!(customize_document(&doc, &hall_booking(), &config).unwrap(), doc);
    }

    #[test]
    fn incomplete_configuration() {
        let config = Configuration::new("Academic");
        assert!(matches!(
            customize_document(&notification_doc(), &hall_booking(), &config),
            Err(Error::IncompleteConfiguration(_))
        ));
    }
}
