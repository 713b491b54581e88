use std::collections::BTreeSet;

use crate::configure::{Configuration, Requirements, Selection};
use crate::error::{Error, Result};
use crate::model::{AreaId, FamilyModel, ValueId, VariantId};

use super::family::parse_id;
use super::xml::{self, Writer};

fn parse_area(raw: &str) -> Result<AreaId> {
    if raw.is_empty() || raw.chars().any(char::is_whitespace) {
        return Err(Error::Schema(format!("area id `{raw}` must be a non-empty token")));
    }
    Ok(AreaId::new(raw))
}

/// Reads a requirements document. Ids are only checked for shape here;
/// [`parse_requirements_for`] also checks them against a model.
pub fn parse_requirements(bytes: &[u8]) -> Result<Requirements> {
    let root = xml::parse(bytes)?;
    root.expect_name("requirements")?;
    root.allow_attrs(&["area"])?;
    let mut reqs = Requirements::new(parse_area(root.required("area")?)?);
    for child in &root.children {
        child.expect_leaf()?;
        child.allow_attrs(&["ref"])?;
        match child.name.as_str() {
            "pin" => {
                reqs.pins.insert(parse_id::<ValueId>(child, "ref")?);
            }
            "exclude" => {
                reqs.excludes.insert(parse_id::<VariantId>(child, "ref")?);
            }
            _ => return Err(root.unexpected_child(child)),
        }
    }
    if let Some(pin) = reqs.pins.iter().find(|p| reqs.excludes.contains(&p.variant())) {
        return Err(Error::Schema(format!(
            "pinned value {pin} belongs to excluded variant {}",
            pin.variant()
        )));
    }
    Ok(reqs)
}

pub fn parse_requirements_for(bytes: &[u8], model: &FamilyModel) -> Result<Requirements> {
    let reqs = parse_requirements(bytes)?;
    reqs.check_against(model)?;
    Ok(reqs)
}

pub fn serialize_requirements(reqs: &Requirements) -> String {
    let mut w = Writer::new();
    if reqs.pins.is_empty() && reqs.excludes.is_empty() {
        w.empty("requirements", &[("area", reqs.area.as_str())]);
        return w.finish();
    }
    w.open("requirements", &[("area", reqs.area.as_str())]);
    for pin in &reqs.pins {
        w.empty("pin", &[("ref", &pin.to_string())]);
    }
    for ex in &reqs.excludes {
        w.empty("exclude", &[("ref", &ex.to_string())]);
    }
    w.close("requirements");
    w.finish()
}

pub fn parse_configuration(bytes: &[u8]) -> Result<Configuration> {
    let root = xml::parse(bytes)?;
    root.expect_name("configuration")?;
    root.allow_attrs(&["area"])?;
    let mut config = Configuration::new(parse_area(root.required("area")?)?);
    for child in &root.children {
        child.expect_name("variant")?;
        child.allow_attrs(&["ref", "state"])?;
        let id: VariantId = parse_id(child, "ref")?;
        let mut values = BTreeSet::new();
        for value in &child.children {
            value.expect_name("value")?;
            value.allow_attrs(&["ref"])?;
            value.expect_leaf()?;
            let v: ValueId = parse_id(value, "ref")?;
            if v.variant() != id {
                return Err(Error::Schema(format!("value {v} listed under variant {id}")));
            }
            values.insert(v);
        }
        let selection = match child.required("state")? {
            "included" => Selection::Included(values),
            "excluded" if values.is_empty() => Selection::Excluded,
            "excluded" => {
                return Err(Error::Schema(format!("excluded variant {id} lists values")))
            }
            other => return Err(Error::Schema(format!("unknown state `{other}`"))),
        };
        if config.states.insert(id, selection).is_some() {
            return Err(Error::Schema(format!("variant {id} listed twice")));
        }
    }
    Ok(config)
}

pub fn serialize_configuration(config: &Configuration) -> String {
    let mut w = Writer::new();
    if config.states.is_empty() {
        w.empty("configuration", &[("area", config.area.as_str())]);
        return w.finish();
    }
    w.open("configuration", &[("area", config.area.as_str())]);
    for (id, selection) in &config.states {
        let id = id.to_string();
        match selection {
            Selection::Excluded => w.empty("variant", &[("ref", &id), ("state", "excluded")]),
            Selection::Included(values) if values.is_empty() => {
                w.empty("variant", &[("ref", &id), ("state", "included")])
            }
            Selection::Included(values) => {
                w.open("variant", &[("ref", &id), ("state", "included")]);
                for v in values {
                    w.empty("value", &[("ref", &v.to_string())]);
                }
                w.close("variant");
            }
        }
    }
    w.close("configuration");
    w.finish()
}
