//! The Hall Booking family used throughout the docs, examples and tests.
//!
//! The same model ships as XML in `fixtures/hall_booking.xml`.

use crate::model::{AreaId, FamilyModel, Relation, Target, Variant, VariantValue, ALL_AREAS};

fn variant(
    number: u32,
    name: &str,
    question: &str,
    relation: Relation,
    areas: &[&str],
    depends_on: &[&str],
    values: &[&str],
) -> Variant {
    let id = crate::model::VariantId::new(number).expect("positive id");
    Variant {
        id,
        name: name.to_owned(),
        question: question.to_owned(),
        relation,
        mandatory: false,
        applicable_areas: areas.iter().map(|a| AreaId::from(*a)).collect(),
        depends_on: depends_on
            .iter()
            .map(|d| d.parse::<Target>().expect("fixture id"))
            .collect(),
        values: values
            .iter()
            .zip(1..)
            .map(|(name, j)| VariantValue::new(id.value(j).expect("positive index"), *name))
            .collect(),
    }
}

/// Hall Booking variant model: reservation mode, charge, block reservation,
/// notification and discount.
pub fn hall_booking() -> FamilyModel {
    FamilyModel {
        name: "Hall Booking System".into(),
        areas: vec!["Academic".into(), "NonAcademic".into()],
        variants: vec![
            variant(
                1,
                "Reservation Mode",
                "What is the reservation mode?",
                Relation::Alternative,
                &[ALL_AREAS],
                &[],
                &["Single", "Block"],
            ),
            variant(
                2,
                "Reservation Charge",
                "How is the charge for reservation?",
                Relation::Or,
                &["NonAcademic"],
                &[],
                &["Deposit", "Tax", "Discount", "Refund"],
            ),
            variant(
                3,
                "Block Reservation",
                "What is the type of block reservation?",
                Relation::Or,
                &[ALL_AREAS],
                &["V1.2"],
                &["Multiple Room", "Multiple Time"],
            ),
            variant(
                4,
                "Notification",
                "How is the user notified?",
                Relation::Or,
                &[ALL_AREAS],
                &[],
                &["Fax", "Email", "Printed Paper"],
            ),
            variant(
                5,
                "Reservation Discount",
                "Which reservation discounts apply?",
                Relation::Or,
                &["NonAcademic"],
                &["V2.3", "V1.2"],
                &["Block Discount", "Seasonal Discount"],
            ),
        ],
    }
}
