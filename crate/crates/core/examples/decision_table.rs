//! Derives the decision table, then reduces it for an academic customer
//! who wants printed confirmations.

use famvar::derive::decision_table_text;
use famvar::fixtures::hall_booking;
use famvar::{apply_requirements, derive_decision_table, reduce_decision_table, Requirements};

fn main() {
    let model = hall_booking();
    let table = derive_decision_table(&model).unwrap();
    println!("full table:");
    print!("{}", decision_table_text(&table));

    let reqs = Requirements::new("Academic").pin("V4.3".parse().unwrap());
    let custom = apply_requirements(&model, &reqs).unwrap();
    let open = reduce_decision_table(&table, &custom.model, &reqs).unwrap();
    println!("\nopen after requirements:");
    print!("{}", decision_table_text(&open));

    println!("\nas JSON:");
    println!("{}", serde_json::to_string_pretty(&open).unwrap());
}
