use std::collections::{BTreeMap, BTreeSet};

use super::session::derive_states;
use super::{dependency_closure, prune_by_area, remove_unsatisfiable, Configuration, Requirements, VariantState};
use crate::error::{Error, Result};
use crate::model::{FamilyModel, Relation, Target, ValueId, VariantId};

/// The reduced model for one set of requirements, with the states implied
/// by the pins. Variants nobody has decided on yet are `Undecided`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Customization {
    pub model: FamilyModel,
    pub states: BTreeMap<VariantId, VariantState>,
}

/// Reduces a model to what the requirements leave open.
///
/// Prunes by area, drops excluded variants and closes the pins (and the
/// applicable mandatory variants) over their dependencies. Every pinned
/// variant collapses to the values demanded by that closure; other
/// demanded values only show up as forced states.
pub fn apply_requirements(model: &FamilyModel, reqs: &Requirements) -> Result<Customization> {
    reqs.check_against(model)?;
    if let Some(pin) = reqs.pins.iter().find(|p| reqs.excludes.contains(&p.variant())) {
        return Err(Error::PinConflict {
            demanded: pin.to_string(),
            by: pin.to_string(),
        });
    }

    let mut reduced = prune_by_area(model, &reqs.area)?;
    reduced.variants.retain(|v| !reqs.excludes.contains(&v.id));
    remove_unsatisfiable(&mut reduced);

    let mandatory: Vec<VariantId> = model
        .variants
        .iter()
        .filter(|v| v.mandatory && v.is_applicable(&reqs.area))
        .map(|v| v.id)
        .collect();
    let seeds: Vec<Target> = reqs
        .pins
        .iter()
        .map(|p| Target::Value(*p))
        .chain(mandatory.iter().map(|m| Target::Variant(*m)))
        .collect();

    let mut demanded: BTreeMap<VariantId, BTreeSet<ValueId>> = BTreeMap::new();
    for seed in &seeds {
        for target in dependency_closure(model, [*seed])? {
            if !reduced.contains(target) {
                return Err(Error::PinConflict {
                    demanded: target.to_string(),
                    by: seed.to_string(),
                });
            }
            if let Target::Value(x) = target {
                demanded.entry(x.variant()).or_default().insert(x);
            }
        }
    }
    for (variant, values) in &demanded {
        let relation = reduced.variant(*variant).map(|v| v.relation);
        if relation == Some(Relation::Alternative) && values.len() > 1 {
            let mut it = values.iter();
            return Err(Error::AlternativeConflict {
                variant: variant.to_string(),
                first: it.next().map(ToString::to_string).unwrap_or_default(),
                second: it.next().map(ToString::to_string).unwrap_or_default(),
            });
        }
    }

    let pinned: BTreeSet<VariantId> = reqs.pins.iter().map(|p| p.variant()).collect();
    for variant in reduced.variants.iter_mut().filter(|v| pinned.contains(&v.id)) {
        let values = &demanded[&variant.id];
        variant.values.retain(|v| values.contains(&v.id));
    }
    // Collapsing can strand dependents of dropped values.
    remove_unsatisfiable(&mut reduced);

    let pins: Vec<ValueId> = reqs.pins.iter().copied().collect();
    let states = derive_states(&reduced, &pins, &[]).map_err(|c| Error::PinConflict {
        demanded: c.subject.to_string(),
        by: c.cause.to_string(),
    })?;
    Ok(Customization {
        model: reduced,
        states,
    })
}

/// The model of a single product: included variants restricted to their
/// selected values.
pub fn product_model(model: &FamilyModel, config: &Configuration) -> FamilyModel {
    let mut product = model.clone();
    product.variants.retain_mut(|variant| match config.states.get(&variant.id) {
        Some(super::Selection::Included(selected)) => {
            variant.values.retain(|v| selected.contains(&v.id));
            !variant.values.is_empty()
        }
        _ => false,
    });
    remove_unsatisfiable(&mut product);
    product
}
