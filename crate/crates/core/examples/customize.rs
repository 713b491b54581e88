//! Batch customization: requirements in, reduced model out.
//!
//! Pass a model and a requirements file to use your own:
//! `cargo run --example customize -- model.xml reqs.xml`

use famvar::apply_requirements;
use famvar::io::{parse_family_model, parse_requirements_for, serialize_family_model};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, reqs) = match args.as_slice() {
        [m, r] => (std::fs::read(m).unwrap(), std::fs::read(r).unwrap()),
        _ => (
            include_bytes!("../fixtures/hall_booking.xml").to_vec(),
            include_bytes!("../fixtures/requirements_academic.xml").to_vec(),
        ),
    };
    let model = parse_family_model(&model).unwrap();
    let reqs = parse_requirements_for(&reqs, &model).unwrap();
    match apply_requirements(&model, &reqs) {
        Ok(custom) => {
            print!("{}", serialize_family_model(&custom.model).unwrap());
            for (variant, state) in &custom.states {
                eprintln!("{variant}: {}", state.token());
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            std::process::exit(1);
        }
    }
}
