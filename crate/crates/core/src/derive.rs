//! Decision tables and feature trees derived from a variant model.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::configure::Requirements;
use crate::error::{Error, Result};
use crate::io::xml::Writer;
use crate::model::{validate_model, FamilyModel, Relation, Target, ValueId, Variant, VariantId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub id: ValueId,
    pub name: String,
}

/// One question of the decision table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionEntry {
    pub variant: VariantId,
    pub name: String,
    pub description: String,
    /// Targets that must hold before the question becomes relevant.
    pub guard: Vec<Target>,
    pub choices: Vec<Choice>,
    pub trace: VariantId,
    pub children: Vec<DecisionEntry>,
}

impl DecisionEntry {
    fn from_variant(variant: &Variant) -> Self {
        Self {
            variant: variant.id,
            name: variant.name.clone(),
            description: variant.question.clone(),
            guard: variant.depends_on.clone(),
            choices: variant
                .values
                .iter()
                .map(|v| Choice {
                    id: v.id,
                    name: v.name.clone(),
                })
                .collect(),
            trace: variant.id,
            children: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub entries: Vec<DecisionEntry>,
}

impl DecisionTable {
    /// Entries in depth-first order.
    pub fn flatten(&self) -> Vec<&DecisionEntry> {
        fn walk<'a>(entries: &'a [DecisionEntry], out: &mut Vec<&'a DecisionEntry>) {
            for e in entries {
                out.push(e);
                walk(&e.children, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.entries, &mut out);
        out
    }

    pub fn find(&self, variant: VariantId) -> Option<&DecisionEntry> {
        self.flatten().into_iter().find(|e| e.variant == variant)
    }

    /// The parent of each non-root entry.
    pub fn parents(&self) -> HashMap<VariantId, VariantId> {
        self.flatten()
            .into_iter()
            .flat_map(|e| e.children.iter().map(move |c| (c.variant, e.variant)))
            .collect()
    }

    /// Keeps the entries accepted by `keep`; children of dropped entries
    /// move up to the nearest kept ancestor, in place of the dropped entry.
    pub fn retain(&self, keep: impl Fn(&DecisionEntry) -> bool) -> DecisionTable {
        fn walk(entries: &[DecisionEntry], keep: &dyn Fn(&DecisionEntry) -> bool) -> Vec<DecisionEntry> {
            let mut out = Vec::new();
            for e in entries {
                let children = walk(&e.children, keep);
                if keep(e) {
                    out.push(DecisionEntry {
                        children,
                        ..e.clone()
                    });
                } else {
                    out.extend(children);
                }
            }
            out
        }
        DecisionTable {
            entries: walk(&self.entries, &keep),
        }
    }
}

fn require_valid(model: &FamilyModel) -> Result<()> {
    let diagnostics = validate_model(model);
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidModel(diagnostics))
    }
}

/// Builds the decision table of a valid model.
///
/// Variants without dependencies are roots, in model order. Every other
/// variant sits under the owner of its first dependency target and keeps
/// all its targets as the guard.
pub fn derive_decision_table(model: &FamilyModel) -> Result<DecisionTable> {
    require_valid(model)?;
    let mut children: HashMap<VariantId, Vec<&Variant>> = HashMap::new();
    let mut roots = Vec::new();
    for variant in &model.variants {
        match variant.depends_on.first() {
            Some(first) => children.entry(first.variant()).or_default().push(variant),
            None => roots.push(variant),
        }
    }
    // Acyclic by validation, so the recursion terminates.
    fn build(variant: &Variant, children: &HashMap<VariantId, Vec<&Variant>>) -> DecisionEntry {
        let mut entry = DecisionEntry::from_variant(variant);
        entry.children = children
            .get(&variant.id)
            .into_iter()
            .flatten()
            .map(|c| build(c, children))
            .collect();
        entry
    }
    Ok(DecisionTable {
        entries: roots.into_iter().map(|r| build(r, &children)).collect(),
    })
}

/// Restricts a table to the decisions still open after customization.
///
/// Entries of variants missing from `customized` are dropped, as are the
/// variants resolved by a pin. Choices are refreshed from the customized
/// model.
pub fn reduce_decision_table(
    table: &DecisionTable,
    customized: &FamilyModel,
    reqs: &Requirements,
) -> Result<DecisionTable> {
    let listed: HashSet<VariantId> = table.flatten().iter().map(|e| e.variant).collect();
    let missing: Vec<String> = customized
        .variants
        .iter()
        .filter(|v| !listed.contains(&v.id))
        .map(|v| v.id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MismatchedModel(missing.join(", ")));
    }

    // Pinned variants were collapsed to their demanded values: resolved.
    let resolved: BTreeSet<VariantId> = reqs.pins.iter().map(|p| p.variant()).collect();

    let mut reduced = table.retain(|e| customized.variant(e.variant).is_some() && !resolved.contains(&e.variant));
    refresh(&mut reduced.entries, customized);
    Ok(reduced)
}

fn refresh(entries: &mut [DecisionEntry], model: &FamilyModel) {
    for entry in entries {
        if let Some(variant) = model.variant(entry.variant) {
            entry.choices = DecisionEntry::from_variant(variant).choices;
        }
        refresh(&mut entry.children, model);
    }
}

/// Indented text: two spaces per level, guards as `[when V1.2]`.
pub fn decision_table_text(table: &DecisionTable) -> String {
    fn walk(entries: &[DecisionEntry], depth: usize, out: &mut String) {
        for e in entries {
            let indent = "  ".repeat(depth);
            let choices: Vec<String> = e.choices.iter().map(|c| format!("{} {}", c.id, c.name)).collect();
            out.push_str(&format!("{indent}{} {}", e.variant, e.name));
            if !e.guard.is_empty() {
                let guard: Vec<String> = e.guard.iter().map(ToString::to_string).collect();
                out.push_str(&format!(" [when {}]", guard.join(", ")));
            }
            out.push_str(&format!(": {} {{{}}}", e.description, choices.join("; ")));
            out.push_str(&format!(" -> {}\n", e.trace));
            walk(&e.children, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(&table.entries, 0, &mut out);
    out
}

pub fn decision_table_xml(table: &DecisionTable) -> String {
    fn walk(entries: &[DecisionEntry], w: &mut Writer) {
        for e in entries {
            let variant = e.variant.to_string();
            let trace = e.trace.to_string();
            w.open(
                "decision",
                &[
                    ("variant", &variant),
                    ("name", &e.name),
                    ("description", &e.description),
                    ("trace", &trace),
                ],
            );
            for g in &e.guard {
                w.empty("guard", &[("ref", &g.to_string())]);
            }
            for c in &e.choices {
                w.empty("choice", &[("id", &c.id.to_string()), ("name", &c.name)]);
            }
            walk(&e.children, w);
            w.close("decision");
        }
    }
    let mut w = Writer::new();
    if table.entries.is_empty() {
        w.empty("decisionTable", &[]);
    } else {
        w.open("decisionTable", &[]);
        walk(&table.entries, &mut w);
        w.close("decisionTable");
    }
    w.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum FeatureKind {
    Mandatory,
    Optional,
    AlternativeGroup,
    OrGroup,
    Leaf,
}

impl FeatureKind {
    pub fn token(self) -> &'static str {
        match self {
            FeatureKind::Mandatory => "MANDATORY",
            FeatureKind::Optional => "OPTIONAL",
            FeatureKind::AlternativeGroup => "ALTERNATIVE-GROUP",
            FeatureKind::OrGroup => "OR-GROUP",
            FeatureKind::Leaf => "LEAF",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureNode {
    pub name: String,
    pub kind: FeatureKind,
    pub children: Vec<FeatureNode>,
}

impl FeatureNode {
    fn new(name: impl Into<String>, kind: FeatureKind, children: Vec<FeatureNode>) -> Self {
        Self {
            name: name.into(),
            kind,
            children,
        }
    }
}

/// Feature tree: the family is the mandatory root, each variant a
/// feature whose values hang off a group named after its relation. A
/// variant with a single value gets the leaf directly.
pub fn export_feature_tree(model: &FamilyModel) -> Result<FeatureNode> {
    require_valid(model)?;
    let features = model
        .variants
        .iter()
        .map(|variant| {
            let leaves: Vec<FeatureNode> = variant
                .values
                .iter()
                .map(|v| FeatureNode::new(&v.name, FeatureKind::Leaf, Vec::new()))
                .collect();
            let children = if leaves.len() < 2 {
                leaves
            } else {
                let kind = match variant.relation {
                    Relation::Alternative => FeatureKind::AlternativeGroup,
                    Relation::Or => FeatureKind::OrGroup,
                };
                vec![FeatureNode::new(variant.relation.to_string(), kind, leaves)]
            };
            let kind = if variant.mandatory {
                FeatureKind::Mandatory
            } else {
                FeatureKind::Optional
            };
            FeatureNode::new(&variant.name, kind, children)
        })
        .collect();
    Ok(FeatureNode::new(&model.name, FeatureKind::Mandatory, features))
}

pub fn feature_tree_text(root: &FeatureNode) -> String {
    fn walk(node: &FeatureNode, depth: usize, out: &mut String) {
        out.push_str(&format!("{}{} [{}]\n", "  ".repeat(depth), node.name, node.kind.token()));
        for c in &node.children {
            walk(c, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(root, 0, &mut out);
    out
}

pub fn feature_tree_dot(root: &FeatureNode) -> String {
    fn walk(node: &FeatureNode, id: &mut usize, out: &mut String) -> usize {
        let me = *id;
        *id += 1;
        let shape = match node.kind {
            FeatureKind::AlternativeGroup | FeatureKind::OrGroup => "diamond",
            FeatureKind::Leaf => "ellipse",
            _ => "box",
        };
        out.push_str(&format!(
            "  n{me} [label=\"{}\\n{}\", shape={shape}];\n",
            node.name.replace('"', "\\\""),
            node.kind.token()
        ));
        for c in &node.children {
            let child = walk(c, id, out);
            let style = match node.kind {
                FeatureKind::Mandatory if c.kind == FeatureKind::Optional => " [style=dashed]",
                _ => "",
            };
            out.push_str(&format!("  n{me} -> n{child}{style};\n"));
        }
        me
    }
    let mut out = String::from("digraph features {\n");
    walk(root, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

pub fn feature_tree_xml(root: &FeatureNode) -> String {
    fn walk(node: &FeatureNode, w: &mut Writer) {
        let attrs = [("name", node.name.as_str()), ("kind", node.kind.token())];
        if node.children.is_empty() {
            w.empty("feature", &attrs);
        } else {
            w.open("feature", &attrs);
            for c in &node.children {
                walk(c, w);
            }
            w.close("feature");
        }
    }
    let mut w = Writer::new();
    walk(root, &mut w);
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configure::apply_requirements;
    use crate::fixtures::hall_booking;

    fn v(s: &str) -> VariantId {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Target {
        s.parse().unwrap()
    }

    fn ids(entries: &[DecisionEntry]) -> Vec<String> {
        entries.iter().map(|e| e.variant.to_string()).collect()
    }

    #[test]
    fn hall_booking_table() {
        let table = derive_decision_table(&hall_booking()).unwrap();
        assert_eq!(ids(&table.entries), ["V1", "V2", "V4"]);
        let v1 = &table.entries[0];
        assert_eq!(v1.description, "What is the reservation mode?");
        assert_eq!(v1.trace, v("V1"));
        assert_eq!(ids(&v1.children), ["V3"]);
        assert_eq!(v1.children[0].guard, [t("V1.2")]);
        let names: Vec<&str> = v1.children[0].choices.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["Multiple Room", "Multiple Time"]);
        let v2 = &table.entries[1];
        assert_eq!(ids(&v2.children), ["V5"]);
        assert_eq!(v2.children[0].guard, [t("V2.3"), t("V1.2")]);
        assert_eq!(table.flatten().len(), 5);
    }

    #[test]
    fn independent_variants_are_all_roots() {
        let mut model = hall_booking();
        model.variants.retain(|x| x.depends_on.is_empty());
        let table = derive_decision_table(&model).unwrap();
        assert_eq!(ids(&table.entries), ["V1", "V2", "V4"]);
        assert!(table.entries.iter().all(|e| e.children.is_empty()));
    }

    #[test]
    fn invalid_model_is_refused() {
        let mut model = hall_booking();
        model.variants[0].depends_on.push(t("V9"));
        assert!(matches!(derive_decision_table(&model), Err(Error::InvalidModel(_))));
        assert!(matches!(export_feature_tree(&model), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn reduced_for_printed_paper() {
        let reqs = Requirements::new("Academic").pin("V4.3".parse().unwrap());
        let custom = apply_requirements(&hall_booking(), &reqs).unwrap();
        let table = derive_decision_table(&hall_booking()).unwrap();
        let open = reduce_decision_table(&table, &custom.model, &reqs).unwrap();
        assert_eq!(ids(&open.entries), ["V1"]);
        assert_eq!(ids(&open.entries[0].children), ["V3"]);
        assert_eq!(
            decision_table_text(&open),
            "V1 Reservation Mode: What is the reservation mode? {V1.1 Single; V1.2 Block} -> V1\n  \
             V3 Block Reservation [when V1.2]: What is the type of block reservation? {V3.1 Multiple Room; V3.2 Multiple Time} -> V3\n"
        );
    }

    #[test]
    fn reduce_without_requirements_is_identity() {
        let reqs = Requirements::new("NonAcademic");
        let table = derive_decision_table(&hall_booking()).unwrap();
        assert_eq!(reduce_decision_table(&table, &hall_booking(), &reqs).unwrap(), table);
    }

    #[test]
    fn pinning_every_variant_leaves_nothing_open() {
        let reqs = ["V1.2", "V2.3", "V3.1", "V4.1", "V5.1"]
            .iter()
            .fold(Requirements::new("NonAcademic"), |r, p| r.pin(p.parse().unwrap()));
        let custom = apply_requirements(&hall_booking(), &reqs).unwrap();
        let table = derive_decision_table(&hall_booking()).unwrap();
        assert!(reduce_decision_table(&table, &custom.model, &reqs).unwrap().entries.is_empty());
    }

    #[test]
    fn removed_parent_lifts_children() {
        let table = derive_decision_table(&hall_booking()).unwrap();
        let lifted = table.retain(|e| e.variant != v("V1"));
        assert_eq!(ids(&lifted.entries), ["V3", "V2", "V4"]);
    }

    #[test]
    fn reduce_rejects_foreign_model() {
        let mut table = derive_decision_table(&hall_booking()).unwrap();
        table.entries.pop();
        let err = reduce_decision_table(&table, &hall_booking(), &Requirements::new("NonAcademic")).unwrap_err();
        assert!(matches!(err, Error::MismatchedModel(_)));
    }

    #[test]
    fn feature_tree_groups() {
        let tree = export_feature_tree(&hall_booking()).unwrap();
        assert_eq!(tree.kind, FeatureKind::Mandatory);
        let mode = &tree.children[0];
        assert_eq!((mode.name.as_str(), mode.kind), ("Reservation Mode", FeatureKind::Optional));
        assert_eq!(mode.children[0].kind, FeatureKind::AlternativeGroup);
        let leaves: Vec<&str> = mode.children[0].children.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(leaves, ["Single", "Block"]);
        assert_eq!(tree.children[2].children[0].kind, FeatureKind::OrGroup);
    }

    #[test]
    fn single_value_collapses_to_leaf() {
        let mut model = hall_booking();
        model.variants[3].values.truncate(1);
        let tree = export_feature_tree(&model).unwrap();
        assert_eq!(tree.children[3].children, [FeatureNode::new("Fax", FeatureKind::Leaf, vec![])]);
    }
}
