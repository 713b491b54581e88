//! Live decision sessions.
//!
//! A session holds a (pruned or customized) model, the pinned values it was
//! created with and a log of user decisions. Variant states are always
//! recomputed from that input, so replaying a log reproduces the states and
//! the result does not depend on the order in which compatible decisions
//! were made.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{apply_requirements, closure_order, Configuration, Requirements, Selection};
use crate::error::{Error, Result};
use crate::model::{AreaId, FamilyModel, IdParseError, Relation, Target, ValueId, VariantId};

/// A user decision: select a value, or leave a variant out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Include(ValueId),
    Exclude(VariantId),
}

impl Decision {
    pub fn target(self) -> Target {
        match self {
            Decision::Include(v) => v.into(),
            Decision::Exclude(v) => v.into(),
        }
    }
}

/// `V3.1` is an include, `V3` an exclude.
impl FromStr for Decision {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<Target>()? {
            Target::Value(v) => Decision::Include(v),
            Target::Variant(v) => Decision::Exclude(v),
        })
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Include(v) => write!(f, "include {v}"),
            Decision::Exclude(v) => write!(f, "exclude {v}"),
        }
    }
}

impl Serialize for Decision {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.target())
    }
}

impl<'de> Deserialize<'de> for Decision {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantState {
    Undecided,
    Excluded,
    Included(BTreeSet<ValueId>),
    /// Included because some decision requires it. The selection may still
    /// be empty when only the variant itself is required.
    ForcedIncluded {
        selected: BTreeSet<ValueId>,
        cause: Target,
    },
    ForcedExcluded {
        cause: Target,
    },
}

impl VariantState {
    pub fn selected(&self) -> Option<&BTreeSet<ValueId>> {
        match self {
            VariantState::Included(s) | VariantState::ForcedIncluded { selected: s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn is_included(&self) -> bool {
        self.selected().is_some()
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, VariantState::Excluded | VariantState::ForcedExcluded { .. })
    }

    pub fn token(&self) -> &'static str {
        match self {
            VariantState::Undecided => "undecided",
            VariantState::Excluded => "excluded",
            VariantState::Included(_) => "included",
            VariantState::ForcedIncluded { .. } => "forcedIncluded",
            VariantState::ForcedExcluded { .. } => "forcedExcluded",
        }
    }

    pub fn cause(&self) -> Option<Target> {
        match self {
            VariantState::ForcedIncluded { cause, .. } | VariantState::ForcedExcluded { cause } => {
                Some(*cause)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConsequenceKind {
    ForcesValue,
    ForcesVariant,
    ForcesExclusion,
    Conflict,
}

/// Effect of a decision. For conflicts `subject` is the demanded id and
/// `cause` the id that contradicts it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consequence {
    pub kind: ConsequenceKind,
    pub subject: Target,
    pub cause: Target,
}

impl Consequence {
    fn conflict(subject: Target, cause: Target) -> Self {
        Self {
            kind: ConsequenceKind::Conflict,
            subject,
            cause,
        }
    }

    pub fn is_conflict(&self) -> bool {
        self.kind == ConsequenceKind::Conflict
    }
}

/// Line-oriented report form, e.g. `FORCES V1=V1.2 because V3.1`.
impl fmt::Display for Consequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConsequenceKind::ForcesValue => write!(
                f,
                "FORCES {}={} because {}",
                self.subject.variant(),
                self.subject,
                self.cause
            ),
            ConsequenceKind::ForcesVariant => {
                write!(f, "FORCES {} because {}", self.subject, self.cause)
            }
            ConsequenceKind::ForcesExclusion => {
                write!(f, "EXCLUDES {} because {}", self.subject, self.cause)
            }
            ConsequenceKind::Conflict => {
                write!(f, "CONFLICT {} contradicts {}", self.subject, self.cause)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOutcome {
    pub accepted: bool,
    pub consequences: Vec<Consequence>,
}

/// Serializable replay input for a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSnapshot {
    pub area: AreaId,
    pub pins: Vec<ValueId>,
    pub excludes: Vec<VariantId>,
    pub log: Vec<Decision>,
}

#[derive(Debug, Clone)]
pub struct Session {
    model: Arc<FamilyModel>,
    area: AreaId,
    pins: Vec<ValueId>,
    excludes: Vec<VariantId>,
    log: Vec<Decision>,
    states: BTreeMap<VariantId, VariantState>,
}

/// Starts a session on the part of `model` offered in `area`.
pub fn new_session(model: &FamilyModel, area: &AreaId) -> Result<Session> {
    Session::new(model, area)
}

impl Session {
    /// Fails when an applicable mandatory variant cannot be included in
    /// `area`.
    pub fn new(model: &FamilyModel, area: &AreaId) -> Result<Self> {
        Self::with_requirements(model, &Requirements::new(area.clone()))
    }

    /// Applies the requirements first; pinned values become fixed decisions
    /// that cannot be retracted.
    pub fn with_requirements(model: &FamilyModel, reqs: &Requirements) -> Result<Self> {
        let customization = apply_requirements(model, reqs)?;
        Self::start(
            Arc::new(customization.model),
            reqs.area.clone(),
            reqs.pins.iter().copied().collect(),
            reqs.excludes.iter().copied().collect(),
        )
    }

    fn start(
        model: Arc<FamilyModel>,
        area: AreaId,
        pins: Vec<ValueId>,
        excludes: Vec<VariantId>,
    ) -> Result<Self> {
        let states = derive_states(&model, &pins, &[]).map_err(|c| Error::PinConflict {
            demanded: c.subject.to_string(),
            by: c.cause.to_string(),
        })?;
        Ok(Self {
            model,
            area,
            pins,
            excludes,
            log: Vec::new(),
            states,
        })
    }

    /// Rebuilds a session from the full model and a snapshot.
    pub fn restore(model: &FamilyModel, snapshot: &SessionSnapshot) -> Result<Self> {
        let reqs = Requirements {
            area: snapshot.area.clone(),
            pins: snapshot.pins.iter().copied().collect(),
            excludes: snapshot.excludes.iter().copied().collect(),
        };
        let mut session = Self::with_requirements(model, &reqs)?;
        for decision in &snapshot.log {
            let outcome = session.apply(*decision)?;
            if !outcome.accepted {
                return Err(Error::Schema(format!(
                    "snapshot decision `{decision}` conflicts on replay"
                )));
            }
        }
        Ok(session)
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            area: self.area.clone(),
            pins: self.pins.clone(),
            excludes: self.excludes.clone(),
            log: self.log.clone(),
        }
    }

    pub fn model(&self) -> &FamilyModel {
        &self.model
    }

    pub fn shared_model(&self) -> Arc<FamilyModel> {
        Arc::clone(&self.model)
    }

    pub fn area(&self) -> &AreaId {
        &self.area
    }

    pub fn pins(&self) -> &[ValueId] {
        &self.pins
    }

    pub fn log(&self) -> &[Decision] {
        &self.log
    }

    pub fn states(&self) -> &BTreeMap<VariantId, VariantState> {
        &self.states
    }

    pub fn state(&self, variant: VariantId) -> Option<&VariantState> {
        self.states.get(&variant)
    }

    /// Applies a decision. A conflicting decision leaves the session as it
    /// was and reports the conflicts.
    pub fn apply(&mut self, decision: Decision) -> Result<DecisionOutcome> {
        let (outcome, next) = self.evaluate(decision)?;
        if let Some((log, states)) = next {
            self.log = log;
            self.states = states;
        }
        Ok(outcome)
    }

    /// The consequences `apply` would report, without changing anything.
    pub fn preview(&self, decision: Decision) -> Result<DecisionOutcome> {
        self.evaluate(decision).map(|(outcome, _)| outcome)
    }

    /// Removes a logged decision and recomputes the states from the rest.
    pub fn retract(&mut self, decision: Decision) -> Result<()> {
        let pos = self
            .log
            .iter()
            .position(|d| *d == decision)
            .ok_or_else(|| Error::UnknownId(decision.target().to_string()))?;
        let mut log = self.log.clone();
        log.remove(pos);
        let states = derive_states(&self.model, &self.pins, &log).map_err(|c| Error::PinConflict {
            demanded: c.subject.to_string(),
            by: c.cause.to_string(),
        })?;
        self.log = log;
        self.states = states;
        Ok(())
    }

    /// Variants that still need an answer: undecided ones, and included
    /// ones whose selection does not yet satisfy their relation.
    pub fn open_variants(&self) -> Vec<VariantId> {
        self.model
            .variants
            .iter()
            .filter(|v| match &self.states[&v.id] {
                VariantState::Undecided => true,
                state => state
                    .selected()
                    .is_some_and(|s| !v.relation.admits(s.len())),
            })
            .map(|v| v.id)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.open_variants().is_empty()
    }

    pub fn configuration(&self) -> Result<Configuration> {
        let open = self.open_variants();
        if !open.is_empty() {
            return Err(Error::IncompleteConfiguration(
                open.iter().map(ToString::to_string).collect(),
            ));
        }
        let states = self
            .states
            .iter()
            .map(|(id, state)| {
                let selection = match state.selected() {
                    Some(s) => Selection::Included(s.clone()),
                    None => Selection::Excluded,
                };
                (*id, selection)
            })
            .collect();
        Ok(Configuration {
            area: self.area.clone(),
            states,
        })
    }

    fn is_pinned(&self, variant: VariantId) -> Option<ValueId> {
        self.pins.iter().copied().find(|p| p.variant() == variant)
    }

    #[allow(clippy::type_complexity)]
    fn evaluate(
        &self,
        decision: Decision,
    ) -> Result<(DecisionOutcome, Option<(Vec<Decision>, BTreeMap<VariantId, VariantState>)>)> {
        if !self.model.contains(decision.target()) {
            return Err(Error::UnknownId(decision.target().to_string()));
        }
        let rejected = |consequences| {
            Ok((
                DecisionOutcome {
                    accepted: false,
                    consequences,
                },
                None,
            ))
        };

        let mut log = self.log.clone();
        let mut reported = Vec::new();
        match decision {
            Decision::Include(value) => {
                let order = closure_order(&self.model, value.into());
                let conflicts = self.include_conflicts(value, &order);
                if !conflicts.is_empty() {
                    return rejected(conflicts);
                }
                let owner = value.variant();
                if self.model.variant(owner).map(|v| v.relation) == Some(Relation::Alternative) {
                    log.retain(|d| !matches!(d, Decision::Include(v) if v.variant() == owner && *v != value));
                }
                if !log.contains(&decision) {
                    log.push(decision);
                }
                for target in order.into_iter().skip(1) {
                    let before = &self.states[&target.variant()];
                    let (fresh, kind) = match target {
                        Target::Variant(_) => (!before.is_included(), ConsequenceKind::ForcesVariant),
                        Target::Value(x) => (
                            !before.selected().is_some_and(|s| s.contains(&x)),
                            ConsequenceKind::ForcesValue,
                        ),
                    };
                    if fresh {
                        reported.push(Consequence {
                            kind,
                            subject: target,
                            cause: value.into(),
                        });
                    }
                }
            }
            Decision::Exclude(variant) => {
                match &self.states[&variant] {
                    VariantState::ForcedIncluded { cause, .. } => {
                        return rejected(vec![Consequence::conflict(variant.into(), *cause)]);
                    }
                    VariantState::Included(selected) => {
                        let cause = self
                            .is_pinned(variant)
                            .or_else(|| selected.iter().next().copied())
                            .map(Target::Value)
                            .unwrap_or(variant.into());
                        return rejected(vec![Consequence::conflict(variant.into(), cause)]);
                    }
                    VariantState::Excluded => {
                        return Ok((
                            DecisionOutcome {
                                accepted: true,
                                consequences: Vec::new(),
                            },
                            None,
                        ))
                    }
                    VariantState::Undecided | VariantState::ForcedExcluded { .. } => {}
                }
                if !log.contains(&decision) {
                    log.push(decision);
                }
            }
        }

        let states = match derive_states(&self.model, &self.pins, &log) {
            Ok(states) => states,
            Err(conflict) => return rejected(vec![conflict]),
        };
        for (id, state) in &states {
            if let VariantState::ForcedExcluded { .. } = state {
                if !self.states[id].is_excluded() {
                    reported.push(Consequence {
                        kind: ConsequenceKind::ForcesExclusion,
                        subject: (*id).into(),
                        cause: decision.target(),
                    });
                }
            }
        }
        Ok((
            DecisionOutcome {
                accepted: true,
                consequences: reported,
            },
            Some((log, states)),
        ))
    }

    fn include_conflicts(&self, value: ValueId, order: &[Target]) -> Vec<Consequence> {
        let mut conflicts = Vec::new();
        let mut demanded: BTreeMap<VariantId, ValueId> = BTreeMap::new();
        for &target in order {
            let owner = target.variant();
            let Some(variant) = self.model.variant(owner) else {
                continue;
            };
            let state = &self.states[&owner];
            match state {
                VariantState::Excluded => {
                    conflicts.push(Consequence::conflict(target, owner.into()));
                    continue;
                }
                VariantState::ForcedExcluded { cause } => {
                    conflicts.push(Consequence::conflict(target, *cause));
                    continue;
                }
                _ => {}
            }
            let Target::Value(x) = target else { continue };
            if variant.relation != Relation::Alternative {
                continue;
            }
            if let Some(other) = demanded.insert(owner, x) {
                if other != x {
                    conflicts.push(Consequence::conflict(target, other.into()));
                    continue;
                }
            }
            if let Some(selected) = state.selected() {
                if let Some(&bound) = selected.iter().find(|s| **s != x) {
                    let free = x == value
                        && matches!(state, VariantState::Included(_))
                        && self.is_pinned(owner).is_none();
                    if !free {
                        conflicts.push(Consequence::conflict(target, bound.into()));
                    }
                }
            }
        }
        conflicts
    }
}

/// Computes every variant state from fixed pins and the decision log.
///
/// Mandatory variants and everything reachable from an included value are
/// forced in; undecided variants whose dependencies can no longer hold are
/// forced out. Forcing causes are the smallest responsible id, which keeps
/// the result independent of decision order.
pub(crate) fn derive_states(
    model: &FamilyModel,
    pins: &[ValueId],
    log: &[Decision],
) -> Result<BTreeMap<VariantId, VariantState>, Consequence> {
    let mut chosen: BTreeMap<VariantId, BTreeSet<ValueId>> = BTreeMap::new();
    let mut excluded: BTreeSet<VariantId> = BTreeSet::new();
    let includes = pins.iter().copied().chain(log.iter().filter_map(|d| match d {
        Decision::Include(v) => Some(*v),
        Decision::Exclude(_) => None,
    }));
    for value in includes.clone() {
        let owner = value.variant();
        let entry = chosen.entry(owner).or_default();
        if model.variant(owner).map(|v| v.relation) == Some(Relation::Alternative) {
            entry.clear();
        }
        entry.insert(value);
    }
    for decision in log {
        if let Decision::Exclude(v) = decision {
            excluded.insert(*v);
        }
    }

    let mut forced: BTreeMap<VariantId, (BTreeSet<ValueId>, Target)> = BTreeMap::new();
    let mut force = |target: Target, cause: Target| {
        let entry = forced
            .entry(target.variant())
            .or_insert_with(|| (BTreeSet::new(), cause));
        entry.1 = entry.1.min(cause);
        if let Target::Value(x) = target {
            entry.0.insert(x);
        }
    };
    for value in includes {
        for target in closure_order(model, value.into()).into_iter().skip(2) {
            force(target, value.into());
        }
    }
    for variant in model.variants.iter().filter(|v| v.mandatory) {
        for target in closure_order(model, variant.id.into()) {
            force(target, variant.id.into());
        }
    }

    let mut states = BTreeMap::new();
    for variant in &model.variants {
        let mut selected = chosen.get(&variant.id).cloned().unwrap_or_default();
        let state = if let Some((values, cause)) = forced.get(&variant.id) {
            if excluded.contains(&variant.id) {
                return Err(Consequence::conflict(variant.id.into(), *cause));
            }
            selected.extend(values);
            VariantState::ForcedIncluded {
                selected: selected.clone(),
                cause: *cause,
            }
        } else if !selected.is_empty() {
            if excluded.contains(&variant.id) {
                let first = selected.iter().next().copied().expect("non-empty");
                return Err(Consequence::conflict(variant.id.into(), first.into()));
            }
            VariantState::Included(selected.clone())
        } else if excluded.contains(&variant.id) {
            VariantState::Excluded
        } else {
            VariantState::Undecided
        };
        if variant.relation == Relation::Alternative && selected.len() > 1 {
            let mut it = selected.iter();
            let (a, b) = (*it.next().expect("two"), *it.next().expect("two"));
            return Err(Consequence::conflict(b.into(), a.into()));
        }
        states.insert(variant.id, state);
    }

    loop {
        let mut changed = false;
        for variant in &model.variants {
            if states[&variant.id] != VariantState::Undecided {
                continue;
            }
            if let Some(cause) = variant.depends_on.iter().find_map(|t| blocker(model, &states, *t)) {
                states.insert(variant.id, VariantState::ForcedExcluded { cause });
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(states)
}

/// Why `target` can no longer be satisfied, if it cannot.
fn blocker(
    model: &FamilyModel,
    states: &BTreeMap<VariantId, VariantState>,
    target: Target,
) -> Option<Target> {
    let owner = target.variant();
    let state = states.get(&owner)?;
    match state {
        VariantState::Excluded => return Some(owner.into()),
        VariantState::ForcedExcluded { cause } => return Some(*cause),
        _ => {}
    }
    let Target::Value(x) = target else { return None };
    if model.variant(owner)?.relation != Relation::Alternative {
        return None;
    }
    let selected = state.selected()?;
    let bound = selected.iter().find(|s| **s != x)?;
    Some(match state {
        VariantState::ForcedIncluded { cause, .. } => *cause,
        _ => (*bound).into(),
    })
}
