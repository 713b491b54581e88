//! Variability management for software system families.
//!
//! A [`FamilyModel`] lists the variants of a family together with their
//! values, the relation between those values (alternative or or), the
//! application areas each variant applies to and the dependencies between
//! variants and values. From it the crate derives a decision table and a
//! feature tree, customizes the model for a set of requirements, runs
//! interactive decision sessions with dependency propagation, enumerates
//! products and carries selections over to tagged model documents.
//!
//! ```
//! use famvar::{apply_requirements, fixtures, Requirements};
//!
//! let reqs = Requirements::new("Academic").pin("V4.3".parse().unwrap());
//! let custom = apply_requirements(&fixtures::hall_booking(), &reqs).unwrap();
//! let ids: Vec<String> = custom.model.variants.iter().map(|v| v.id.to_string()).collect();
//! assert_eq!(ids, ["V1", "V3", "V4"]);
//! ```

pub mod cli;
pub mod configure;
pub mod derive;
pub mod diag;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod service;
pub mod trace;

pub use configure::{
    apply_requirements, count_products, dependency_closure, enumerate_products, new_session,
    product_model, prune_by_area, validate_configuration, Configuration, Consequence,
    ConsequenceKind, Customization, Decision, DecisionOutcome, Requirements, Selection, Session,
    SessionSnapshot, VariantState, DEFAULT_MAX_SPACE,
};
pub use derive::{
    derive_decision_table, export_feature_tree, reduce_decision_table, DecisionEntry,
    DecisionTable, FeatureKind, FeatureNode,
};
pub use diag::{Code, Diagnostic};
pub use error::{Error, Result};
pub use model::{
    validate_model, AreaId, FamilyModel, Relation, Target, ValueId, Variant, VariantId,
    VariantValue, ALL_AREAS,
};
pub use trace::{check_traces, customize_document, trace_backward, trace_forward, ModelDocument};
