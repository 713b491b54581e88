use std::collections::HashSet;

use crate::diag::{Code, Diagnostic};
use crate::error::{Error, Result};
use crate::model::{
    validate_model, AreaId, FamilyModel, Relation, Target, ValueId, Variant, VariantId,
    VariantValue,
};

use super::xml::{self, Element, Writer};

pub(crate) fn parse_id<T: std::str::FromStr>(element: &Element, key: &str) -> Result<T> {
    let raw = element.required(key)?;
    raw.parse()
        .map_err(|_| Error::Schema(format!("malformed id `{raw}` in <{}> `{key}`", element.name)))
}

fn parse_area(element: &Element, key: &str) -> Result<AreaId> {
    let raw = element.required(key)?;
    if raw.is_empty() || raw.chars().any(char::is_whitespace) {
        return Err(Error::Schema(format!(
            "area id `{raw}` must be a non-empty token"
        )));
    }
    Ok(AreaId::new(raw))
}

fn parse_dependency(element: &Element) -> Result<Target> {
    element.allow_attrs(&["ref"])?;
    element.expect_leaf()?;
    parse_id(element, "ref")
}

fn parse_value(element: &Element) -> Result<VariantValue> {
    element.allow_attrs(&["id", "name"])?;
    let id: ValueId = parse_id(element, "id")?;
    let mut value = VariantValue::new(id, element.required("name")?);
    for child in &element.children {
        match child.name.as_str() {
            "dependsOn" => value.depends_on.push(parse_dependency(child)?),
            _ => return Err(element.unexpected_child(child)),
        }
    }
    Ok(value)
}

fn parse_variant(element: &Element) -> Result<Variant> {
    element.allow_attrs(&["id", "name", "relation", "mandatory", "question"])?;
    let id: VariantId = parse_id(element, "id")?;
    let relation: Relation = element
        .required("relation")?
        .parse()
        .map_err(Error::Schema)?;
    let mandatory = match element.attr("mandatory") {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => {
            return Err(Error::Schema(format!(
                "mandatory must be `true` or `false`, found `{other}`"
            )))
        }
    };
    let mut variant = Variant {
        id,
        name: element.required("name")?.to_owned(),
        question: element.attr("question").unwrap_or_default().to_owned(),
        relation,
        mandatory,
        applicable_areas: Vec::new(),
        depends_on: Vec::new(),
        values: Vec::new(),
    };
    for child in &element.children {
        match child.name.as_str() {
            "applicableTo" => {
                child.allow_attrs(&["area"])?;
                child.expect_leaf()?;
                variant.applicable_areas.push(parse_area(child, "area")?);
            }
            "dependsOn" => variant.depends_on.push(parse_dependency(child)?),
            "value" => variant.values.push(parse_value(child)?),
            _ => return Err(element.unexpected_child(child)),
        }
    }
    if variant.applicable_areas.is_empty() {
        return Err(Error::Schema(format!(
            "variant {id} needs at least one <applicableTo>"
        )));
    }
    if variant.applies_everywhere() && variant.applicable_areas.len() > 1 {
        return Err(Error::Schema(format!(
            "variant {id} combines `ALL` with named areas"
        )));
    }
    Ok(variant)
}

/// Reads a variant model document.
///
/// Structural problems found by [`validate_model`] are returned as
/// [`Error::InvalidModel`].
pub fn parse_family_model(bytes: &[u8]) -> Result<FamilyModel> {
    let root = xml::parse(bytes)?;
    root.expect_name("family")?;
    root.allow_attrs(&["name"])?;
    let mut model = FamilyModel {
        name: root.required("name")?.to_owned(),
        areas: Vec::new(),
        variants: Vec::new(),
    };
    let mut saw_areas = false;
    for child in &root.children {
        match child.name.as_str() {
            "areas" if !saw_areas => {
                saw_areas = true;
                child.allow_attrs(&[])?;
                for area in &child.children {
                    area.expect_name("area")?;
                    area.allow_attrs(&["id"])?;
                    area.expect_leaf()?;
                    model.areas.push(parse_area(area, "id")?);
                }
            }
            "variant" => model.variants.push(parse_variant(child)?),
            _ => return Err(root.unexpected_child(child)),
        }
    }
    if model.variants.is_empty() {
        return Err(Error::Schema("a family needs at least one <variant>".into()));
    }
    let diagnostics = validate_model(&model);
    if diagnostics.is_empty() {
        Ok(model)
    } else {
        Err(Error::InvalidModel(diagnostics))
    }
}

/// Writes the canonical form of a valid, non-empty model.
pub fn serialize_family_model(model: &FamilyModel) -> Result<String> {
    let mut diagnostics = validate_model(model);
    if model.variants.is_empty() {
        diagnostics.push(Diagnostic::new(
            Code::InvalidModel,
            &model.name,
            "a family needs at least one variant",
        ));
    }
    if !diagnostics.is_empty() {
        return Err(Error::InvalidModel(diagnostics));
    }

    let mut w = Writer::new();
    w.open("family", &[("name", &model.name)]);
    if model.areas.is_empty() {
        w.empty("areas", &[]);
    } else {
        w.open("areas", &[]);
        for area in &model.areas {
            w.empty("area", &[("id", area.as_str())]);
        }
        w.close("areas");
    }
    for variant in &model.variants {
        let id = variant.id.to_string();
        w.open(
            "variant",
            &[
                ("id", &id),
                ("name", &variant.name),
                ("relation", variant.relation.token()),
                ("mandatory", if variant.mandatory { "true" } else { "false" }),
                ("question", &variant.question),
            ],
        );
        for area in &variant.applicable_areas {
            w.empty("applicableTo", &[("area", area.as_str())]);
        }
        for dep in &variant.depends_on {
            w.empty("dependsOn", &[("ref", &dep.to_string())]);
        }
        for value in &variant.values {
            let vid = value.id.to_string();
            let attrs = [("id", vid.as_str()), ("name", value.name.as_str())];
            if value.depends_on.is_empty() {
                w.empty("value", &attrs);
            } else {
                w.open("value", &attrs);
                for dep in &value.depends_on {
                    w.empty("dependsOn", &[("ref", &dep.to_string())]);
                }
                w.close("value");
            }
        }
        w.close("variant");
    }
    w.close("family");
    Ok(w.finish())
}

/// Ids declared anywhere in the model.
pub(crate) fn declared_ids(model: &FamilyModel) -> HashSet<Target> {
    model
        .variants
        .iter()
        .flat_map(|v| {
            std::iter::once(Target::Variant(v.id)).chain(v.values.iter().map(|x| Target::Value(x.id)))
        })
        .collect()
}
