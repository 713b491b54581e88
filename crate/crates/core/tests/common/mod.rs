//! Random models and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use famvar::configure::Selection;
use famvar::trace::{Edge, Element};
use famvar::{
    validate_configuration, AreaId, Configuration, FamilyModel, ModelDocument, Relation, Target,
    ValueId, Variant, VariantId, VariantValue,
};
use proptest::prelude::*;

pub const AREAS: [&str; 2] = ["Lab", "Office"];

#[derive(Debug, Clone)]
pub struct VariantSpec {
    alternative: bool,
    mandatory: bool,
    values: usize,
    areas: u8,
    deps: Vec<(u8, u8)>,
    value_deps: Vec<(u8, u8, u8)>,
    name: String,
}

fn spec() -> impl Strategy<Value = VariantSpec> {
    (
        any::<bool>(),
        prop::bool::weighted(0.15),
        1usize..=3,
        0u8..4,
        prop::collection::vec((any::<u8>(), any::<u8>()), 0..=2),
        prop::collection::vec((any::<u8>(), any::<u8>(), any::<u8>()), 0..=1),
        "[A-Za-z &<>\"'\u{e9}\t\n]{1,8}",
    )
        .prop_map(|(alternative, mandatory, values, areas, deps, value_deps, name)| VariantSpec {
            alternative,
            mandatory,
            values,
            areas,
            deps,
            value_deps,
            name,
        })
}

fn vid(n: usize) -> VariantId {
    VariantId::new(n as u32 + 1).unwrap()
}

fn target(specs: &[VariantSpec], below: usize, owner: u8, pick: u8) -> Target {
    let owner = owner as usize % below;
    let pick = pick as usize % (specs[owner].values + 1);
    if pick == 0 {
        Target::Variant(vid(owner))
    } else {
        Target::Value(vid(owner).value(pick as u32).unwrap())
    }
}

/// Builds a valid model: dependencies only point at earlier variants, so
/// the dependency graph is acyclic.
pub fn build(specs: &[VariantSpec]) -> FamilyModel {
    let variants = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let id = vid(i);
            let mut depends_on: Vec<Target> = Vec::new();
            if i > 0 {
                for &(o, p) in &s.deps {
                    let t = target(specs, i, o, p);
                    if !depends_on.contains(&t) {
                        depends_on.push(t);
                    }
                }
            }
            let mut values: Vec<VariantValue> = (1..=s.values)
                .map(|j| VariantValue::new(id.value(j as u32).unwrap(), format!("{} {j}", s.name)))
                .collect();
            if i > 0 {
                for &(v, o, p) in &s.value_deps {
                    let t = target(specs, i, o, p);
                    let value = &mut values[v as usize % s.values];
                    if !value.depends_on.contains(&t) {
                        value.depends_on.push(t);
                    }
                }
            }
            let applicable_areas = match s.areas {
                0 => vec![AreaId::new("ALL")],
                1 => vec![AreaId::new(AREAS[0])],
                2 => vec![AreaId::new(AREAS[1])],
                _ => AREAS.iter().map(|a| AreaId::new(*a)).collect(),
            };
            Variant {
                id,
                name: s.name.clone(),
                question: format!("Which {}?", s.name),
                relation: if s.alternative { Relation::Alternative } else { Relation::Or },
                mandatory: s.mandatory,
                applicable_areas,
                depends_on,
                values,
            }
        })
        .collect();
    FamilyModel {
        name: "Generated".into(),
        areas: AREAS.iter().map(|a| AreaId::new(*a)).collect(),
        variants,
    }
}

/// Valid models with 1 to 6 variants of 1 to 3 values.
pub fn arb_model() -> impl Strategy<Value = FamilyModel> {
    prop::collection::vec(spec(), 1..=6).prop_map(|s| build(&s))
}

pub fn arb_area() -> impl Strategy<Value = AreaId> {
    prop::sample::select(AREAS.to_vec()).prop_map(AreaId::new)
}

/// Every state a variant can be put in, ignoring relation and area:
/// excluded, or any non-empty subset of its values.
fn raw_states(variant: &Variant) -> Vec<Selection> {
    let ids: Vec<ValueId> = variant.values.iter().map(|v| v.id).collect();
    let mut states = vec![Selection::Excluded];
    for mask in 1u32..(1 << ids.len()) {
        let set: BTreeSet<ValueId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| *id)
            .collect();
        states.push(Selection::Included(set));
    }
    states
}

/// Exhaustive oracle: the full per-variant state product filtered by
/// `validate_configuration`.
pub fn brute_force_products(model: &FamilyModel, area: &AreaId) -> Vec<Configuration> {
    let per_variant: Vec<Vec<Selection>> = model.variants.iter().map(raw_states).collect();
    let mut found = Vec::new();
    let mut index = vec![0usize; per_variant.len()];
    loop {
        let config = Configuration {
            area: area.clone(),
            states: model
                .variants
                .iter()
                .zip(&index)
                .enumerate()
                .map(|(i, (v, &k))| (v.id, per_variant[i][k].clone()))
                .collect(),
        };
        if validate_configuration(model, &config).is_empty() {
            found.push(config);
        }
        let mut d = 0;
        loop {
            if d == index.len() {
                return found;
            }
            index[d] += 1;
            if index[d] < per_variant[d].len() {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

/// Size of the raw state product the oracle walks.
pub fn raw_space(model: &FamilyModel) -> u64 {
    model.variants.iter().map(|v| 1u64 << v.values.len()).product()
}

pub fn all_targets(model: &FamilyModel) -> Vec<Target> {
    model
        .variants
        .iter()
        .flat_map(|v| std::iter::once(Target::Variant(v.id)).chain(v.values.iter().map(|x| Target::Value(x.id))))
        .collect()
}

/// Closure computed as a plain fixpoint over the dependency rules.
pub fn naive_closure(model: &FamilyModel, seed: &BTreeSet<Target>) -> BTreeSet<Target> {
    let mut set = seed.clone();
    loop {
        let mut next = set.clone();
        for t in &set {
            match t {
                Target::Value(x) => {
                    next.insert(Target::Variant(x.variant()));
                    if let Some(v) = model.value(*x) {
                        next.extend(v.depends_on.iter().copied());
                    }
                }
                Target::Variant(v) => {
                    if let Some(v) = model.variant(*v) {
                        next.extend(v.depends_on.iter().copied());
                    }
                }
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

/// Ids reachable from `start` in `doc`, following edges.
pub fn reachable(doc: &ModelDocument, start: &str) -> HashSet<String> {
    let mut seen = HashSet::from([start.to_owned()]);
    let mut frontier = vec![start.to_owned()];
    while let Some(n) = frontier.pop() {
        for e in &doc.edges {
            if e.from == n && seen.insert(e.to.clone()) {
                frontier.push(e.to.clone());
            }
        }
    }
    seen
}

/// Random documents over the ids of `model`: some elements untagged, the
/// rest tagged with a variant or value.
pub fn arb_document(model: &FamilyModel) -> impl Strategy<Value = ModelDocument> {
    let targets = all_targets(model);
    let n = targets.len();
    (
        prop::collection::vec(prop::option::weighted(0.6, 0..n), 2..10),
        prop::collection::vec((any::<u8>(), any::<u8>()), 0..16),
    )
        .prop_map(move |(tags, raw_edges)| {
            let elements: Vec<Element> = tags
                .iter()
                .enumerate()
                .map(|(i, tag)| {
                    let e = Element::new(format!("e{i}"), "action", format!("step {i}"));
                    match tag {
                        Some(t) => e.tagged(targets[*t]),
                        None => e,
                    }
                })
                .collect();
            let mut edges: Vec<Edge> = Vec::new();
            for (a, b) in raw_edges {
                let (a, b) = (a as usize % elements.len(), b as usize % elements.len());
                let edge = Edge::new(format!("e{a}"), format!("e{b}"));
                if a != b && !edges.contains(&edge) {
                    edges.push(edge);
                }
            }
            ModelDocument {
                name: "generated".into(),
                kind: "activity".into(),
                elements,
                edges,
            }
        })
}

/// The configuration with every variant included and every value chosen.
pub fn select_everything(model: &FamilyModel) -> Configuration {
    Configuration {
        area: AreaId::new(AREAS[0]),
        states: model
            .variants
            .iter()
            .map(|v| (v.id, Selection::Included(v.values.iter().map(|x| x.id).collect())))
            .collect::<BTreeMap<_, _>>(),
    }
}
pub mod props;
