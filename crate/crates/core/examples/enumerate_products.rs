//! Counts the products of each area and lists the first few.

use famvar::fixtures::hall_booking;
use famvar::{count_products, enumerate_products, AreaId, DEFAULT_MAX_SPACE};

fn main() {
    let model = hall_booking();
    for area in &model.areas {
        println!("{area}: {}", count_products(&model, area, DEFAULT_MAX_SPACE).unwrap());
    }
    for product in enumerate_products(&model, &AreaId::new("Academic"), DEFAULT_MAX_SPACE)
        .unwrap()
        .take(5)
    {
        println!("  {}", product.summary());
    }
    match count_products(&model, &AreaId::new("NonAcademic"), 1_000) {
        Err(e) => println!("with a cap of 1000: {e}"),
        Ok(n) => println!("with a cap of 1000: {n}"),
    }
}
