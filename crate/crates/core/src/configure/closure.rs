use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{FamilyModel, Target};

/// Breadth-first closure of a single id, in discovery order, starting with
/// `start` itself. A value pulls in its variant and its own dependencies;
/// a variant pulls in its dependencies.
pub(crate) fn closure_order(model: &FamilyModel, start: Target) -> Vec<Target> {
    let mut seen = HashSet::from([start]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(current) = queue.pop_front() {
        let next: Vec<Target> = match current {
            Target::Variant(v) => model
                .variant(v)
                .map(|v| v.depends_on.clone())
                .unwrap_or_default(),
            Target::Value(x) => std::iter::once(Target::Variant(x.variant()))
                .chain(model.value(x).into_iter().flat_map(|v| v.depends_on.iter().copied()))
                .collect(),
        };
        for target in next {
            if seen.insert(target) {
                order.push(target);
                queue.push_back(target);
            }
        }
    }
    order
}

/// The least superset of `seed` closed under the requires-dependencies of
/// the model.
pub fn dependency_closure(
    model: &FamilyModel,
    seed: impl IntoIterator<Item = Target>,
) -> Result<BTreeSet<Target>> {
    let mut closed = BTreeSet::new();
    for target in seed {
        if !model.contains(target) {
            return Err(Error::UnknownId(target.to_string()));
        }
        if !closed.contains(&target) {
            closed.extend(closure_order(model, target));
        }
    }
    Ok(closed)
}
