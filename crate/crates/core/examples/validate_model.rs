//! Loads the Hall Booking model, then breaks it in two ways and shows the
//! diagnostics.

use famvar::io::parse_family_model;
use famvar::{validate_model, Error};

const MODEL: &str = include_str!("../fixtures/hall_booking.xml");

fn main() {
    let model = parse_family_model(MODEL.as_bytes()).expect("fixture is valid");
    println!("{}: {} variants, {} diagnostics", model.name, model.variants.len(), validate_model(&model).len());

    let cyclic = MODEL.replace(
        r#"<variant id="V1" name="Reservation Mode" relation="alternative" mandatory="false" question="What is the reservation mode?">
    <applicableTo area="ALL"/>"#,
        r#"<variant id="V1" name="Reservation Mode" relation="alternative" mandatory="false" question="What is the reservation mode?">
    <applicableTo area="ALL"/>
    <dependsOn ref="V3"/>"#,
    );
    let dangling = MODEL.replace(r#"<dependsOn ref="V2.3"/>"#, r#"<dependsOn ref="V2.9"/>"#);
    for (label, text) in [("cycle", cyclic), ("dangling", dangling)] {
        match parse_family_model(text.as_bytes()) {
            Err(Error::InvalidModel(diagnostics)) => {
                println!("{label}:");
                for d in diagnostics {
                    println!("  {d}");
                }
            }
            other => println!("{label}: unexpected {other:?}"),
        }
    }
}
