use super::{Configuration, Selection};
use crate::diag::{Code, Diagnostic};
use crate::model::{FamilyModel, Relation};

/// Checks a total configuration against every constraint of the model.
///
/// Findings are ordered by variant position, then code.
pub fn validate_configuration(model: &FamilyModel, config: &Configuration) -> Vec<Diagnostic> {
    let mut found: Vec<(usize, Diagnostic)> = Vec::new();
    if !model.has_area(&config.area) {
        found.push((
            0,
            Diagnostic::new(Code::UnknownArea, &config.area, "area is not declared by the model"),
        ));
    }

    for (pos, variant) in model.variants.iter().enumerate() {
        let mut report = |code, subject: String, message: String| {
            found.push((pos + 1, Diagnostic::new(code, subject, message)));
        };
        let selected = match config.states.get(&variant.id) {
            None => {
                report(
                    Code::IncompleteConfiguration,
                    variant.id.to_string(),
                    "variant has no decision".into(),
                );
                continue;
            }
            Some(Selection::Excluded) => {
                if variant.mandatory && variant.is_applicable(&config.area) {
                    report(
                        Code::MandatoryViolation,
                        variant.id.to_string(),
                        "mandatory variant is excluded".into(),
                    );
                }
                continue;
            }
            Some(Selection::Included(selected)) => selected,
        };

        if !variant.is_applicable(&config.area) {
            report(
                Code::AreaViolation,
                variant.id.to_string(),
                format!("variant is not offered in area {}", config.area),
            );
        }
        match variant.relation {
            Relation::Alternative if selected.len() != 1 => report(
                Code::AlternativeViolation,
                variant.id.to_string(),
                format!("alternative variant selects {} values", selected.len()),
            ),
            Relation::Or if selected.is_empty() => report(
                Code::OrViolation,
                variant.id.to_string(),
                "or-variant selects no value".into(),
            ),
            _ => {}
        }
        for dep in &variant.depends_on {
            if !config.is_satisfied(*dep) {
                report(
                    Code::DependencyViolation,
                    variant.id.to_string(),
                    format!("requires {dep}"),
                );
            }
        }
        for value in selected {
            match variant.value(*value) {
                None => report(
                    Code::UnknownId,
                    value.to_string(),
                    format!("not a value of {}", variant.id),
                ),
                Some(v) => {
                    for dep in &v.depends_on {
                        if !config.is_satisfied(*dep) {
                            report(Code::DependencyViolation, value.to_string(), format!("requires {dep}"));
                        }
                    }
                }
            }
        }
    }

    let end = model.variants.len() + 1;
    for id in config.states.keys() {
        if model.variant(*id).is_none() {
            found.push((end, Diagnostic::new(Code::UnknownId, id, "variant is not in the model")));
        }
    }
    found.sort_by_key(|(pos, d)| (*pos, d.code));
    found.into_iter().map(|(_, d)| d).collect()
}
