use crate::error::{Error, Result};
use crate::io::declared_ids;
use crate::model::{AreaId, FamilyModel};

/// Removes, to a fixpoint, values whose dependencies name missing ids and
/// variants whose own dependencies do, or that lost all their values.
pub(crate) fn remove_unsatisfiable(model: &mut FamilyModel) {
    loop {
        let ids = declared_ids(model);
        let before: usize = model.variants.iter().map(|v| 1 + v.values.len()).sum();
        for variant in &mut model.variants {
            variant
                .values
                .retain(|value| value.depends_on.iter().all(|t| ids.contains(t)));
        }
        model.variants.retain(|variant| {
            !variant.values.is_empty() && variant.depends_on.iter().all(|t| ids.contains(t))
        });
        let after: usize = model.variants.iter().map(|v| 1 + v.values.len()).sum();
        if after == before {
            break;
        }
    }
}

/// Keeps the variants offered in `area`, then drops whatever can no longer
/// have its dependencies met.
pub fn prune_by_area(model: &FamilyModel, area: &AreaId) -> Result<FamilyModel> {
    if !model.has_area(area) {
        return Err(Error::UnknownArea(area.to_string()));
    }
    let mut pruned = model.clone();
    pruned.variants.retain(|v| v.is_applicable(area));
    remove_unsatisfiable(&mut pruned);
    Ok(pruned)
}
