//! XML interchange for models, requirements, configurations and model
//! documents, plus the plain-text variant table.
//!
//! All writers produce a canonical form: an XML declaration, attributes in
//! schema order, two-space indentation and LF line endings. Readers are
//! strict; unknown elements and attributes are schema errors.

mod config;
mod document;
mod family;
mod table;
pub(crate) mod xml;

pub use config::{
    parse_configuration, parse_requirements, parse_requirements_for, serialize_configuration,
    serialize_requirements,
};
pub use document::{parse_model_document, serialize_model_document};
pub(crate) use family::declared_ids;
pub use family::{parse_family_model, serialize_family_model};
pub use table::render_table;
