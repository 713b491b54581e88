//! Variant-model data types and structural validation.
//!
//! A [`FamilyModel`] lists the variation points of a system family. Each
//! [`Variant`] carries its candidate values, the relation between them,
//! the application areas it is offered in and a conjunction of
//! requires-dependencies on other variants or values.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};

/// Reserved applicability token meaning "every declared area".
pub const ALL_AREAS: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed id `{0}`: expected `V<k>` or `V<k>.<j>` with positive integers")]
pub struct IdParseError(pub String);

/// Identifier of a variant, written `V<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariantId(u32);

/// Identifier of a variant value, written `V<k>.<j>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId {
    variant: VariantId,
    index: u32,
}

impl VariantId {
    pub fn new(number: u32) -> Option<Self> {
        (number > 0).then_some(Self(number))
    }

    pub fn number(self) -> u32 {
        self.0
    }

    /// The `index`-th value id under this variant.
    pub fn value(self, index: u32) -> Option<ValueId> {
        (index > 0).then_some(ValueId {
            variant: self,
            index,
        })
    }
}

impl ValueId {
    /// The variant this id is numbered under. For a well-formed model this is
    /// also the owning variant.
    pub fn variant(self) -> VariantId {
        self.variant
    }

    pub fn index(self) -> u32 {
        self.index
    }
}

fn parse_number(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.starts_with('0') {
        return None;
    }
    s.parse().ok()
}

impl FromStr for VariantId {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('V')
            .and_then(parse_number)
            .map(VariantId)
            .ok_or_else(|| IdParseError(s.to_owned()))
    }
}

impl FromStr for ValueId {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IdParseError(s.to_owned());
        let (variant, index) = s.split_once('.').ok_or_else(err)?;
        let variant = variant.parse::<VariantId>().map_err(|_| err())?;
        let index = parse_number(index).ok_or_else(err)?;
        Ok(ValueId { variant, index })
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.0)
    }
}

impl fmt::Display for ValueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.variant, self.index)
    }
}

/// A reference to either a variant or one of its values.
///
/// Used for dependency targets, trace tags, closure members and decision
/// causes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Variant(VariantId),
    Value(ValueId),
}

impl Target {
    /// The variant a target belongs to (itself, for variant targets).
    pub fn variant(self) -> VariantId {
        match self {
            Target::Variant(v) => v,
            Target::Value(v) => v.variant(),
        }
    }
}

impl From<VariantId> for Target {
    fn from(v: VariantId) -> Self {
        Target::Variant(v)
    }
}

impl From<ValueId> for Target {
    fn from(v: ValueId) -> Self {
        Target::Value(v)
    }
}

impl FromStr for Target {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('.') {
            s.parse().map(Target::Value)
        } else {
            s.parse().map(Target::Variant)
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Variant(v) => v.fmt(f),
            Target::Value(v) => v.fmt(f),
        }
    }
}

macro_rules! serde_via_str {
    ($($ty:ty),*) => {$(
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}

serde_via_str!(VariantId, ValueId, Target);

/// Name of an application area such as `Academic`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AreaId(String);

impl AreaId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_all(&self) -> bool {
        self.0 == ALL_AREAS
    }
}

impl fmt::Display for AreaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AreaId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// How many values of an included variant may be selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Exactly one value.
    Alternative,
    /// At least one value.
    Or,
}

impl Relation {
    pub fn token(self) -> &'static str {
        match self {
            Relation::Alternative => "alternative",
            Relation::Or => "or",
        }
    }

    /// Whether a selection of `count` values respects the relation.
    pub fn admits(self, count: usize) -> bool {
        match self {
            Relation::Alternative => count == 1,
            Relation::Or => count >= 1,
        }
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alternative" => Ok(Relation::Alternative),
            "or" => Ok(Relation::Or),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Alternative => "Alternative",
            Relation::Or => "OR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantValue {
    pub id: ValueId,
    pub name: String,
    pub depends_on: Vec<Target>,
}

impl VariantValue {
    pub fn new(id: ValueId, name: impl Into<String>) -> Self {
        Self {
            id,
            name: name.into(),
            depends_on: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub id: VariantId,
    pub name: String,
    /// The decision question shown in the decision table.
    pub question: String,
    pub relation: Relation,
    pub mandatory: bool,
    /// Declared areas, or the single entry `ALL`.
    pub applicable_areas: Vec<AreaId>,
    /// Conjunction of requirements for including this variant.
    pub depends_on: Vec<Target>,
    pub values: Vec<VariantValue>,
}

impl Variant {
    pub fn is_applicable(&self, area: &AreaId) -> bool {
        self.applicable_areas.iter().any(|a| a.is_all() || a == area)
    }

    pub fn applies_everywhere(&self) -> bool {
        self.applicable_areas.iter().any(AreaId::is_all)
    }

    pub fn value(&self, id: ValueId) -> Option<&VariantValue> {
        self.values.iter().find(|v| v.id == id)
    }

    pub fn value_position(&self, id: ValueId) -> Option<usize> {
        self.values.iter().position(|v| v.id == id)
    }

    /// Every dependency target of the variant and of its values.
    pub fn all_dependencies(&self) -> impl Iterator<Item = Target> + '_ {
        self.depends_on
            .iter()
            .chain(self.values.iter().flat_map(|v| v.depends_on.iter()))
            .copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyModel {
    pub name: String,
    pub areas: Vec<AreaId>,
    pub variants: Vec<Variant>,
}

impl FamilyModel {
    pub fn variant(&self, id: VariantId) -> Option<&Variant> {
        self.variants.iter().find(|v| v.id == id)
    }

    pub fn variant_position(&self, id: VariantId) -> Option<usize> {
        self.variants.iter().position(|v| v.id == id)
    }

    pub fn value(&self, id: ValueId) -> Option<&VariantValue> {
        self.variant(id.variant()).and_then(|v| v.value(id))
    }

    pub fn contains(&self, target: Target) -> bool {
        match target {
            Target::Variant(v) => self.variant(v).is_some(),
            Target::Value(v) => self.value(v).is_some(),
        }
    }

    pub fn has_area(&self, area: &AreaId) -> bool {
        self.areas.contains(area)
    }

    /// Display name for a variant or value id, falling back to the id.
    pub fn label(&self, target: Target) -> String {
        match target {
            Target::Variant(v) => self.variant(v).map(|v| v.name.clone()),
            Target::Value(v) => self.value(v).map(|v| v.name.clone()),
        }
        .unwrap_or_else(|| target.to_string())
    }
}

/// Checks the structural rules of a variant model.
///
/// Diagnostics are ordered by position in the model (family-level findings
/// first), then by code.
pub fn validate_model(model: &FamilyModel) -> Vec<Diagnostic> {
    // (position, code) sort key; None sorts before every variant.
    let mut found: Vec<(Option<usize>, Diagnostic)> = Vec::new();

    let mut seen_areas = HashSet::new();
    for area in &model.areas {
        if area.is_all() {
            found.push((
                None,
                Diagnostic::new(
                    Code::UnknownArea,
                    area.as_str(),
                    "`ALL` is reserved and cannot be declared as an area",
                ),
            ));
        } else if area.as_str().is_empty() {
            found.push((None, Diagnostic::new(Code::UnknownArea, "", "empty area id")));
        } else if !seen_areas.insert(area) {
            found.push((
                None,
                Diagnostic::new(Code::DuplicateId, area.as_str(), "area declared twice"),
            ));
        }
    }

    let mut ids: HashSet<Target> = HashSet::new();
    for (pos, variant) in model.variants.iter().enumerate() {
        let at = Some(pos);
        if !ids.insert(variant.id.into()) {
            found.push((
                at,
                Diagnostic::new(Code::DuplicateId, variant.id, "variant id used twice"),
            ));
        }
        if variant.values.is_empty() {
            found.push((
                at,
                Diagnostic::new(Code::EmptyValues, variant.id, "variant has no values"),
            ));
        }
        if variant.applicable_areas.is_empty() {
            found.push((
                at,
                Diagnostic::new(Code::UnknownArea, variant.id, "variant names no applicable area"),
            ));
        }
        for area in &variant.applicable_areas {
            if !area.is_all() && !model.has_area(area) {
                found.push((
                    at,
                    Diagnostic::new(
                        Code::UnknownArea,
                        variant.id,
                        format!("area `{area}` is not declared"),
                    ),
                ));
            }
        }
        for value in &variant.values {
            if value.id.variant() != variant.id {
                found.push((
                    at,
                    Diagnostic::new(
                        Code::BadNumbering,
                        value.id,
                        format!("value is numbered under {} but belongs to {}", value.id.variant(), variant.id),
                    ),
                ));
            }
            if !ids.insert(value.id.into()) {
                found.push((
                    at,
                    Diagnostic::new(Code::DuplicateId, value.id, "value id used twice"),
                ));
            }
        }
    }

    for (pos, variant) in model.variants.iter().enumerate() {
        let at = Some(pos);
        let own = |t: Target| match t {
            Target::Variant(v) => v == variant.id,
            Target::Value(v) => variant.values.iter().any(|x| x.id == v),
        };
        let deps = variant
            .depends_on
            .iter()
            .map(|t| (variant.id.to_string(), *t))
            .chain(
                variant
                    .values
                    .iter()
                    .flat_map(|v| v.depends_on.iter().map(move |t| (v.id.to_string(), *t))),
            );
        for (subject, target) in deps {
            if own(target) {
                found.push((
                    at,
                    Diagnostic::new(
                        Code::SelfDependency,
                        subject,
                        format!("depends on its own variant through {target}"),
                    ),
                ));
            } else if !model.contains(target) {
                found.push((
                    at,
                    Diagnostic::new(
                        Code::DanglingDependency,
                        subject,
                        format!("dependency target {target} does not exist"),
                    ),
                ));
            }
        }
    }

    for cycle in dependency_cycles(model) {
        let first = cycle[0];
        let members: Vec<String> = cycle.iter().map(|&i| model.variants[i].id.to_string()).collect();
        found.push((
            Some(first),
            Diagnostic::new(
                Code::DependencyCycle,
                model.variants[first].id,
                format!("dependency cycle through {}", members.join(", ")),
            ),
        ));
    }

    found.sort_by_key(|(i, d)| (*i, d.code));
    found.into_iter().map(|(_, d)| d).collect()
}

/// Non-trivial strongly connected components of the variant-level
/// dependency graph, each given as sorted variant positions. Self
/// references are reported separately and are not edges here.
fn dependency_cycles(model: &FamilyModel) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..model.variants.len()).map(|i| graph.add_node(i)).collect();
    let mut position: HashMap<VariantId, usize> = HashMap::new();
    for (i, v) in model.variants.iter().enumerate() {
        position.entry(v.id).or_insert(i);
    }
    for (i, variant) in model.variants.iter().enumerate() {
        for target in variant.all_dependencies() {
            if !model.contains(target) {
                continue;
            }
            if let Some(&j) = position.get(&target.variant()) {
                if j != i {
                    graph.update_edge(nodes[i], nodes[j], ());
                }
            }
        }
    }
    let mut cycles: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1)
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|n| graph[n]).collect();
            members.sort_unstable();
            members
        })
        .collect();
    cycles.sort();
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::hall_booking;

    fn vid(s: &str) -> VariantId {
        s.parse().unwrap()
    }

    fn single(id: &str) -> Variant {
        let id = vid(id);
        Variant {
            id,
            name: format!("{id}"),
            question: String::new(),
            relation: Relation::Or,
            mandatory: false,
            applicable_areas: vec![AreaId::new(ALL_AREAS)],
            depends_on: vec![],
            values: vec![VariantValue::new(id.value(1).unwrap(), "only")],
        }
    }

    #[test]
    fn id_parsing() {
        assert_eq!(vid("V12").number(), 12);
        assert!("V0".parse::<VariantId>().is_err());
        assert!("V01".parse::<VariantId>().is_err());
        assert!("v1".parse::<VariantId>().is_err());
        assert!("V1.".parse::<ValueId>().is_err());
        assert!("V1.0".parse::<ValueId>().is_err());
        let t: Target = "V5.2".parse().unwrap();
        assert_eq!(t.variant(), vid("V5"));
        assert_eq!(t.to_string(), "V5.2");
        assert!(vid("V2") < vid("V10"));
    }

    #[test]
    fn hall_booking_is_well_formed() {
        assert!(validate_model(&hall_booking()).is_empty());
    }

    #[test]
    fn single_variant_model_is_well_formed() {
        let model = FamilyModel {
            name: "tiny".into(),
            areas: vec![],
            variants: vec![single("V1")],
        };
        assert!(validate_model(&model).is_empty());
    }

    #[test]
    fn dangling_dependency_is_reported_at_its_variant() {
        let mut model = hall_booking();
        model.variants[2].depends_on = vec!["V9.9".parse().unwrap()];
        let diags = validate_model(&model);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::DanglingDependency);
        assert_eq!(diags[0].subject, "V3");
    }

    #[test]
    fn two_variant_cycle_is_one_diagnostic() {
        let mut a = single("V1");
        let mut b = single("V2");
        a.depends_on = vec![Target::Variant(vid("V2"))];
        b.depends_on = vec![Target::Variant(vid("V1"))];
        let model = FamilyModel {
            name: "cyclic".into(),
            areas: vec![],
            variants: vec![a, b],
        };
        let diags = validate_model(&model);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::DependencyCycle);
    }

    #[test]
    fn self_dependency_and_numbering() {
        let mut model = hall_booking();
        model.variants[0].depends_on.push("V1.2".parse().unwrap());
        model.variants[3].values[0].id = "V9.1".parse().unwrap();
        let codes: Vec<_> = validate_model(&model).into_iter().map(|d| (d.subject, d.code)).collect();
        assert_eq!(
            codes,
            vec![("V1".to_string(), Code::SelfDependency), ("V9.1".to_string(), Code::BadNumbering)]
        );
    }

    #[test]
    fn area_rules() {
        let mut model = hall_booking();
        model.areas.push(AreaId::new(ALL_AREAS));
        model.variants[1].applicable_areas = vec![AreaId::new("Hotel")];
        let codes: Vec<_> = validate_model(&model).into_iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::UnknownArea, Code::UnknownArea]);
    }

    #[test]
    fn duplicates_and_empty_values() {
        let mut model = hall_booking();
        let mut dup = model.variants[0].clone();
        dup.values.clear();
        model.variants.push(dup);
        let codes: Vec<_> = validate_model(&model).into_iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::DuplicateId, Code::EmptyValues]);
    }
}
