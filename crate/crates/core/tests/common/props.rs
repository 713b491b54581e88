//! Property checks. Each takes generated input and fails through
//! `prop_assert!`, so it runs both under `proptest!` and a `TestRunner`.

use std::collections::BTreeSet;

use famvar::configure::Selection;
use famvar::io::{
    parse_configuration, parse_family_model, parse_model_document, parse_requirements,
    serialize_configuration, serialize_family_model, serialize_model_document,
    serialize_requirements,
};
use famvar::{
    customize_document, dependency_closure, enumerate_products, prune_by_area,
    validate_configuration, AreaId, Decision, FamilyModel, ModelDocument, Requirements, Session,
    Target, VariantState, DEFAULT_MAX_SPACE,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::*;

/// Largest raw product the brute-force oracle is asked to walk.
pub const ORACLE_LIMIT: u64 = 4096;

pub type Check = Result<(), TestCaseError>;

fn subset(targets: &[Target], mask: u64) -> BTreeSet<Target> {
    targets
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << (i % 64)) != 0)
        .map(|(_, t)| *t)
        .collect()
}

pub fn closure_input() -> impl Strategy<Value = (FamilyModel, u64, u64)> {
    (arb_model(), any::<u64>(), any::<u64>())
}

/// Extensive, idempotent, monotone and equal to a naive fixpoint.
pub fn closure((model, a, b): (FamilyModel, u64, u64)) -> Check {
    let targets = all_targets(&model);
    let small = subset(&targets, a & b);
    let large = subset(&targets, a);
    let c_small = dependency_closure(&model, small.iter().copied()).unwrap();
    let c_large = dependency_closure(&model, large.iter().copied()).unwrap();
    prop_assert!(small.is_subset(&c_small));
    prop_assert_eq!(&dependency_closure(&model, c_small.iter().copied()).unwrap(), &c_small);
    prop_assert!(c_small.is_subset(&c_large));
    prop_assert_eq!(&c_large, &naive_closure(&model, &large));
    Ok(())
}

pub fn model_and_area() -> impl Strategy<Value = (FamilyModel, AreaId)> {
    (arb_model(), arb_area())
}

/// Pruned products are valid on the full model, full products survive
/// pruning, and both sides agree with the oracle count.
pub fn pruning((model, area): (FamilyModel, AreaId)) -> Check {
    prop_assume!(raw_space(&model) <= ORACLE_LIMIT);
    let pruned = prune_by_area(&model, &area).unwrap();
    prop_assert!(famvar::validate_model(&pruned).is_empty());
    let oracle = brute_force_products(&model, &area);
    let lost_mandatory = model
        .variants
        .iter()
        .any(|v| v.mandatory && v.is_applicable(&area) && pruned.variant(v.id).is_none());
    if lost_mandatory {
        prop_assert!(oracle.is_empty(), "area with an unsatisfiable mandatory variant has products");
        return Ok(());
    }
    let mut from_pruned = 0;
    for mut product in enumerate_products(&pruned, &area, DEFAULT_MAX_SPACE).unwrap() {
        product.extend_excluded(&model);
        prop_assert!(
            validate_configuration(&model, &product).is_empty(),
            "{} invalid on full model",
            product.summary()
        );
        from_pruned += 1;
    }
    for product in &oracle {
        let mut restricted = product.clone();
        restricted.states.retain(|id, _| pruned.variant(*id).is_some());
        prop_assert!(validate_configuration(&pruned, &restricted).is_empty());
    }
    prop_assert_eq!(from_pruned, oracle.len());
    let full: Vec<String> = enumerate_products(&model, &area, DEFAULT_MAX_SPACE)
        .unwrap()
        .map(|c| c.summary())
        .collect();
    let expected: Vec<String> = oracle.iter().map(|c| c.summary()).collect();
    let (mut sorted_full, mut sorted_expected) = (full.clone(), expected);
    sorted_full.sort();
    sorted_expected.sort();
    prop_assert_eq!(sorted_full, sorted_expected);
    Ok(())
}

fn decision_for(model: &FamilyModel, pick: u8, exclude: bool) -> Option<Decision> {
    let targets = all_targets(model);
    if targets.is_empty() {
        return None;
    }
    let t = targets[pick as usize % targets.len()];
    Some(if exclude {
        Decision::Exclude(t.variant())
    } else {
        match t {
            Target::Value(x) => Decision::Include(x),
            Target::Variant(v) => Decision::Include(model.variant(v)?.values[0].id),
        }
    })
}

/// Answers the remaining open variants, excluding where possible.
fn complete(session: &mut Session) {
    for _ in 0..32 {
        let Some(&open) = session.open_variants().first() else {
            return;
        };
        let mut candidates = Vec::new();
        if session.state(open) == Some(&VariantState::Undecided) {
            candidates.push(Decision::Exclude(open));
        }
        let values: Vec<_> = session.model().variant(open).unwrap().values.iter().map(|v| v.id).collect();
        candidates.extend(values.into_iter().map(Decision::Include));
        if !candidates.into_iter().any(|d| session.apply(d).unwrap().accepted) {
            return;
        }
    }
}

pub fn session_input() -> impl Strategy<Value = (FamilyModel, AreaId, Vec<(u8, bool)>)> {
    (arb_model(), arb_area(), prop::collection::vec((any::<u8>(), prop::bool::weighted(0.3)), 0..6))
}

/// Finished sessions validate; every oracle product can be replayed.
pub fn session_oracle((model, area, raw): (FamilyModel, AreaId, Vec<(u8, bool)>)) -> Check {
    prop_assume!(raw_space(&model) <= ORACLE_LIMIT);
    let oracle = brute_force_products(&model, &area);
    let Ok(fresh) = Session::new(&model, &area) else {
        prop_assert!(oracle.is_empty(), "session refused a satisfiable area");
        return Ok(());
    };

    let mut session = fresh.clone();
    for (pick, exclude) in raw {
        if let Some(d) = decision_for(session.model(), pick, exclude) {
            session.apply(d).unwrap();
        }
    }
    complete(&mut session);
    if session.is_complete() {
        let mut config = session.configuration().unwrap();
        config.extend_excluded(&model);
        prop_assert!(
            validate_configuration(&model, &config).is_empty(),
            "{:?} for {}",
            validate_configuration(&model, &config),
            config.summary()
        );
    }

    for product in &oracle {
        let mut replay = fresh.clone();
        for (id, selection) in &product.states {
            let in_session = replay.model().variant(*id).is_some();
            match selection {
                Selection::Included(values) => {
                    prop_assert!(in_session, "{} needs pruned {id}", product.summary());
                    for v in values {
                        let outcome = replay.apply(Decision::Include(*v)).unwrap();
                        prop_assert!(outcome.accepted, "{} refused include {v}", product.summary());
                    }
                }
                Selection::Excluded if in_session => {
                    let outcome = replay.apply(Decision::Exclude(*id)).unwrap();
                    prop_assert!(outcome.accepted, "{} refused exclude {id}", product.summary());
                }
                Selection::Excluded => {}
            }
        }
        let mut config = replay.configuration().unwrap();
        config.extend_excluded(&model);
        prop_assert_eq!(&config.states, &product.states);
    }
    Ok(())
}

pub fn confluence_input() -> impl Strategy<Value = (FamilyModel, AreaId, Vec<(u8, bool)>, Vec<usize>)> {
    (
        arb_model(),
        arb_area(),
        prop::collection::vec((any::<u8>(), prop::bool::weighted(0.3)), 1..5),
        Just(()).prop_perturb(|_, mut rng| (0..5).map(|_| rng.next_u32() as usize).collect()),
    )
        .prop_map(|(m, a, d, p)| (m, a, d, p))
}

fn run(session: &Session, decisions: &[Decision]) -> Option<Session> {
    let mut s = session.clone();
    for d in decisions {
        if !s.apply(*d).unwrap().accepted {
            return None;
        }
    }
    Some(s)
}

/// Any order of a conflict-free decision set ends in the same states.
pub fn confluence(
    (model, area, raw, shuffle): (FamilyModel, AreaId, Vec<(u8, bool)>, Vec<usize>),
) -> Check {
    let Ok(session) = Session::new(&model, &area) else {
        return Ok(());
    };
    let mut decisions: Vec<Decision> = Vec::new();
    for (pick, exclude) in raw {
        if let Some(d) = decision_for(session.model(), pick, exclude) {
            if !decisions.contains(&d) {
                decisions.push(d);
            }
        }
    }
    // Two answers to the same alternative variant are a replacement, not
    // a set: the later one wins by design.
    let alternative_twice = decisions.iter().enumerate().any(|(i, a)| {
        decisions[i + 1..].iter().any(|b| match (a, b) {
            (Decision::Include(x), Decision::Include(y)) => {
                x.variant() == y.variant()
                    && session.model().variant(x.variant()).unwrap().relation == famvar::Relation::Alternative
            }
            _ => false,
        })
    });
    prop_assume!(!alternative_twice);

    let mut permuted = decisions.clone();
    for (i, r) in shuffle.iter().enumerate().take(permuted.len()) {
        let j = r % permuted.len();
        permuted.swap(i, j);
    }
    let forward = run(&session, &decisions);
    let other = run(&session, &permuted);
    prop_assert_eq!(forward.is_some(), other.is_some(), "{:?} vs {:?}", decisions, permuted);
    if let (Some(a), Some(b)) = (forward, other) {
        prop_assert_eq!(a.states(), b.states());
    }
    Ok(())
}

/// Structural round trip and byte-stable canonical form for every format.
pub fn round_trip(model: FamilyModel) -> Check {
    let text = serialize_family_model(&model).unwrap();
    let parsed = parse_family_model(text.as_bytes()).unwrap();
    prop_assert_eq!(&parsed, &model);
    prop_assert_eq!(serialize_family_model(&parsed).unwrap(), text);

    let reqs = model
        .variants
        .iter()
        .enumerate()
        .fold(Requirements::new(AREAS[1]), |r, (i, v)| {
            if i % 2 == 0 {
                r.pin(v.values[0].id)
            } else {
                r.exclude(v.id)
            }
        });
    let text = serialize_requirements(&reqs);
    prop_assert_eq!(&parse_requirements(text.as_bytes()).unwrap(), &reqs);

    for product in enumerate_products(&model, &AREAS[0].into(), DEFAULT_MAX_SPACE).unwrap().take(20) {
        let text = serialize_configuration(&product);
        let back = parse_configuration(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &product);
        prop_assert_eq!(serialize_configuration(&back), text);
    }
    Ok(())
}

pub fn document_input() -> impl Strategy<Value = (FamilyModel, ModelDocument, u64)> {
    arb_model().prop_flat_map(|m| {
        let doc = arb_document(&m);
        (Just(m), doc, any::<u64>())
    })
}

fn removed_ids(before: &ModelDocument, after: &ModelDocument) -> Vec<String> {
    before
        .elements
        .iter()
        .filter(|e| after.element(&e.id).is_none())
        .map(|e| e.id.clone())
        .collect()
}

/// Untagged elements survive, selecting more never removes more, and
/// reachability between survivors holds when removals are pass-through.
pub fn document_customization((model, doc, seed): (FamilyModel, ModelDocument, u64)) -> Check {
    let text = serialize_model_document(&doc);
    prop_assert_eq!(&parse_model_document(text.as_bytes()).unwrap(), &doc);

    let everything = select_everything(&model);
    prop_assert_eq!(&customize_document(&doc, &model, &everything).unwrap(), &doc);

    // Drop a pseudo-random part of the full selection.
    let mut config = everything.clone();
    for (i, (_, sel)) in config.states.iter_mut().enumerate() {
        if seed >> (i * 3 % 60) & 1 == 1 {
            *sel = Selection::Excluded;
        } else if let Selection::Included(values) = sel {
            let first = *values.iter().next().unwrap();
            values.retain(|v| v.index() as u64 % 2 == seed % 2 || *v == first);
        }
    }
    let custom = customize_document(&doc, &model, &config).unwrap();
    for e in doc.elements.iter().filter(|e| e.tag.is_none()) {
        prop_assert!(custom.element(&e.id).is_some(), "untagged {} removed", e.id);
    }
    let larger = customize_document(&doc, &model, &everything).unwrap();
    for e in &custom.elements {
        prop_assert!(larger.element(&e.id).is_some());
    }
    for edge in &custom.edges {
        prop_assert!(custom.element(&edge.from).is_some() && custom.element(&edge.to).is_some());
    }

    let removed = removed_ids(&doc, &custom);
    let pass_through = removed.iter().all(|r| {
        doc.edges.iter().filter(|e| &e.to == r).count() == 1
            && doc.edges.iter().filter(|e| &e.from == r).count() == 1
    });
    if pass_through {
        for a in &custom.elements {
            let before: BTreeSet<String> = reachable(&doc, &a.id)
                .into_iter()
                .filter(|id| custom.element(id).is_some())
                .collect();
            let after: BTreeSet<String> = reachable(&custom, &a.id).into_iter().collect();
            prop_assert_eq!(before, after, "reachability from {}", a.id);
        }
    }
    Ok(())
}
