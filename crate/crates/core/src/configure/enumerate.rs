use std::collections::BTreeSet;

use super::{Configuration, Selection};
use crate::error::{Error, Result};
use crate::model::{AreaId, FamilyModel, Relation};

/// Default cap on the raw per-variant state product.
pub const DEFAULT_MAX_SPACE: u128 = 10_000_000;

/// Every valid configuration of a model in one area, depth-first over
/// model order.
///
/// Each variant ranges over "excluded" (unless mandatory) followed by its
/// relation-admissible value sets; sets are ordered by the bit pattern of
/// value positions. Dependencies are checked as soon as every variant they
/// mention has been assigned.
pub struct Products<'a> {
    model: &'a FamilyModel,
    area: AreaId,
    options: Vec<Vec<Selection>>,
    checks_at: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    started: bool,
    done: bool,
}

fn option_count(relation: Relation, values: usize) -> u128 {
    match relation {
        Relation::Alternative => values as u128,
        Relation::Or => 1u128.checked_shl(values as u32).unwrap_or(u128::MAX).saturating_sub(1),
    }
}

/// Streams the valid configurations of `model` in `area`.
pub fn enumerate_products<'a>(
    model: &'a FamilyModel,
    area: &AreaId,
    max_space: u128,
) -> Result<Products<'a>> {
    if !model.has_area(area) {
        return Err(Error::UnknownArea(area.to_string()));
    }
    let space = model
        .variants
        .iter()
        .filter(|v| v.is_applicable(area))
        .map(|v| option_count(v.relation, v.values.len()) + u128::from(!v.mandatory))
        .fold(1u128, u128::saturating_mul);
    // Counts are reported as u64, which also bounds the OR subset masks.
    let cap = max_space.min(u128::from(u64::MAX));
    if space > cap {
        return Err(Error::SpaceTooLarge { space, cap });
    }

    let options = model
        .variants
        .iter()
        .map(|variant| {
            let mut opts = Vec::new();
            if !variant.mandatory || !variant.is_applicable(area) {
                opts.push(Selection::Excluded);
            }
            if !variant.is_applicable(area) {
                return opts;
            }
            let ids: Vec<_> = variant.values.iter().map(|v| v.id).collect();
            match variant.relation {
                Relation::Alternative => {
                    opts.extend(ids.iter().map(|id| Selection::Included(BTreeSet::from([*id]))))
                }
                Relation::Or => {
                    for mask in 1u64..(1u64 << ids.len()) {
                        let set = ids
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, id)| *id)
                            .collect();
                        opts.push(Selection::Included(set));
                    }
                }
            }
            opts
        })
        .collect();

    let mut checks_at = vec![Vec::new(); model.variants.len()];
    for (i, variant) in model.variants.iter().enumerate() {
        let trigger = variant
            .all_dependencies()
            .filter_map(|t| model.variant_position(t.variant()))
            .fold(i, usize::max);
        checks_at[trigger].push(i);
    }

    Ok(Products {
        model,
        area: area.clone(),
        options,
        checks_at,
        cursor: Vec::new(),
        started: false,
        done: false,
    })
}

/// Number of valid configurations of `model` in `area`.
pub fn count_products(model: &FamilyModel, area: &AreaId, max_space: u128) -> Result<u64> {
    Ok(enumerate_products(model, area, max_space)?.count() as u64)
}

impl Products<'_> {
    fn selection(&self, depth: usize) -> &Selection {
        &self.options[depth][self.cursor[depth]]
    }

    fn satisfied(&self, target: crate::model::Target) -> bool {
        let Some(pos) = self.model.variant_position(target.variant()) else {
            return false;
        };
        match target {
            crate::model::Target::Variant(_) => self.selection(pos).is_included(),
            crate::model::Target::Value(x) => self.selection(pos).selects(x),
        }
    }

    fn consistent_at(&self, depth: usize) -> bool {
        self.checks_at[depth].iter().all(|&i| {
            let variant = &self.model.variants[i];
            match self.selection(i) {
                Selection::Excluded => true,
                Selection::Included(selected) => {
                    variant.depends_on.iter().all(|t| self.satisfied(*t))
                        && variant
                            .values
                            .iter()
                            .filter(|v| selected.contains(&v.id))
                            .all(|v| v.depends_on.iter().all(|t| self.satisfied(*t)))
                }
            }
        })
    }

    /// Moves the cursor to the next complete consistent assignment.
    fn seek(&mut self, mut increment: bool) -> bool {
        let n = self.options.len();
        loop {
            if increment {
                loop {
                    let depth = match self.cursor.len() {
                        0 => return false,
                        len => len - 1,
                    };
                    self.cursor[depth] += 1;
                    if self.cursor[depth] < self.options[depth].len() {
                        break;
                    }
                    self.cursor.pop();
                }
            }
            let depth = self.cursor.len() - 1;
            if !self.consistent_at(depth) {
                increment = true;
                continue;
            }
            if self.cursor.len() == n {
                return true;
            }
            self.cursor.push(0);
            increment = false;
        }
    }

    fn current(&self) -> Configuration {
        Configuration {
            area: self.area.clone(),
            states: self
                .model
                .variants
                .iter()
                .enumerate()
                .map(|(i, v)| (v.id, self.selection(i).clone()))
                .collect(),
        }
    }
}

impl Iterator for Products<'_> {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done {
            return None;
        }
        let found = if !self.started {
            self.started = true;
            if self.options.is_empty() {
                self.done = true;
                return Some(self.current());
            }
            self.cursor.push(0);
            self.seek(false)
        } else {
            self.seek(true)
        };
        if found {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::hall_booking;
    use crate::model::{Variant, VariantId, VariantValue};

    #[test]
    fn hall_booking_counts() {
        let model = hall_booking();
        assert_eq!(count_products(&model, &"Academic".into(), DEFAULT_MAX_SPACE).unwrap(), 48);
        assert_eq!(count_products(&model, &"NonAcademic".into(), DEFAULT_MAX_SPACE).unwrap(), 1536);
    }

    #[test]
    fn single_alternative_variant() {
        let id = VariantId::new(1).unwrap();
        let model = FamilyModel {
            name: "one".into(),
            areas: vec!["A".into()],
            variants: vec![Variant {
                id,
                name: "x".into(),
                question: String::new(),
                relation: Relation::Alternative,
                mandatory: false,
                applicable_areas: vec!["ALL".into()],
                depends_on: vec![],
                values: vec![
                    VariantValue::new(id.value(1).unwrap(), "a"),
                    VariantValue::new(id.value(2).unwrap(), "b"),
                ],
            }],
        };
        let all: Vec<String> = enumerate_products(&model, &"A".into(), DEFAULT_MAX_SPACE)
            .unwrap()
            .map(|c| c.summary())
            .collect();
        assert_eq!(all, ["V1=-", "V1=V1.1", "V1=V1.2"]);
    }

    #[test]
    fn zero_variant_model_has_one_product() {
        let model = FamilyModel {
            name: "empty".into(),
            areas: vec!["A".into()],
            variants: vec![],
        };
        let all: Vec<_> = enumerate_products(&model, &"A".into(), 1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].states.is_empty());
    }

    #[test]
    fn space_cap() {
        let err = count_products(&hall_booking(), &"NonAcademic".into(), 1000).err().unwrap();
        // 3 * 16 * 4 * 8 * 4
        assert_eq!(err, Error::SpaceTooLarge { space: 6144, cap: 1000 });
    }

    #[test]
    fn order_is_lexicographic_in_model_order() {
        let model = hall_booking();
        let first: Vec<String> = enumerate_products(&model, &"Academic".into(), DEFAULT_MAX_SPACE)
            .unwrap()
            .take(3)
            .map(|c| c.summary())
            .collect();
        assert_eq!(
            first,
            [
                "V1=- V2=- V3=- V4=- V5=-",
                "V1=- V2=- V3=- V4=V4.1 V5=-",
                "V1=- V2=- V3=- V4=V4.2 V5=-",
            ]
        );
    }
}
