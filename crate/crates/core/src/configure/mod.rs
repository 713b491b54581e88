//! Customization: area pruning, dependency closure, requirement
//! application, decision sessions, configuration checks and exhaustive
//! product enumeration.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{AreaId, FamilyModel, Target, ValueId, VariantId};

mod check;
mod closure;
mod customize;
mod enumerate;
mod prune;
mod session;

pub use check::validate_configuration;
pub use closure::dependency_closure;
pub(crate) use closure::closure_order;
pub use customize::{apply_requirements, product_model, Customization};
pub use enumerate::{count_products, enumerate_products, Products, DEFAULT_MAX_SPACE};
pub use prune::prune_by_area;
pub(crate) use prune::remove_unsatisfiable;
pub use session::{
    new_session, Consequence, ConsequenceKind, Decision, DecisionOutcome, Session,
    SessionSnapshot, VariantState,
};

/// What a stakeholder asks for: the application area, values that must be
/// present and variants that must not be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirements {
    pub area: AreaId,
    pub pins: BTreeSet<ValueId>,
    pub excludes: BTreeSet<VariantId>,
}

impl Requirements {
    pub fn new(area: impl Into<AreaId>) -> Self {
        Self {
            area: area.into(),
            pins: BTreeSet::new(),
            excludes: BTreeSet::new(),
        }
    }

    pub fn pin(mut self, value: ValueId) -> Self {
        self.pins.insert(value);
        self
    }

    pub fn exclude(mut self, variant: VariantId) -> Self {
        self.excludes.insert(variant);
        self
    }

    /// Checks that the area is declared and every referenced id exists.
    pub fn check_against(&self, model: &FamilyModel) -> Result<()> {
        if !model.has_area(&self.area) {
            return Err(Error::UnknownArea(self.area.to_string()));
        }
        if let Some(pin) = self.pins.iter().find(|p| model.value(**p).is_none()) {
            return Err(Error::UnknownId(pin.to_string()));
        }
        if let Some(ex) = self.excludes.iter().find(|x| model.variant(**x).is_none()) {
            return Err(Error::UnknownId(ex.to_string()));
        }
        Ok(())
    }
}

/// Final decision for one variant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Selection {
    Excluded,
    Included(BTreeSet<ValueId>),
}

impl Selection {
    pub fn is_included(&self) -> bool {
        matches!(self, Selection::Included(_))
    }

    pub fn selects(&self, value: ValueId) -> bool {
        matches!(self, Selection::Included(s) if s.contains(&value))
    }
}

/// A product: one [`Selection`] per variant of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub area: AreaId,
    pub states: BTreeMap<VariantId, Selection>,
}

impl Configuration {
    pub fn new(area: impl Into<AreaId>) -> Self {
        Self {
            area: area.into(),
            states: BTreeMap::new(),
        }
    }

    pub fn with(mut self, variant: VariantId, selection: Selection) -> Self {
        self.states.insert(variant, selection);
        self
    }

    pub fn is_satisfied(&self, target: Target) -> bool {
        match target {
            Target::Variant(v) => self.states.get(&v).is_some_and(Selection::is_included),
            Target::Value(x) => self
                .states
                .get(&x.variant())
                .is_some_and(|s| s.selects(x)),
        }
    }

    /// Adds an `Excluded` entry for every variant of `model` the
    /// configuration does not mention, e.g. variants removed by
    /// customization when working against the full model.
    pub fn extend_excluded(&mut self, model: &FamilyModel) {
        for variant in &model.variants {
            self.states.entry(variant.id).or_insert(Selection::Excluded);
        }
    }

    /// One-line summary, e.g. `V1=V1.2 V2=- V3=V3.1+V3.2`.
    pub fn summary(&self) -> String {
        self.states
            .iter()
            .map(|(id, sel)| match sel {
                Selection::Excluded => format!("{id}=-"),
                Selection::Included(values) => {
                    let values: Vec<String> = values.iter().map(ToString::to_string).collect();
                    format!("{id}={}", values.join("+"))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}
