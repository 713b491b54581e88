//! Traces between the model and an activity diagram, and the diagram
//! customized for one product.

use famvar::fixtures::hall_booking;
use famvar::io::{parse_model_document, serialize_model_document};
use famvar::trace::document_dot;
use famvar::{check_traces, customize_document, trace_backward, trace_forward, Requirements, Session};

fn main() {
    let model = hall_booking();
    let doc = parse_model_document(include_bytes!("../fixtures/reserve_hall_activity.xml")).unwrap();
    println!("trace problems: {:?}", check_traces(&doc, &model));

    let docs = [doc.clone()];
    for id in ["V4", "V4.3", "V1"] {
        let hits: Vec<String> = trace_forward(&model, id.parse().unwrap(), &docs)
            .unwrap()
            .into_iter()
            .map(|r| r.element)
            .collect();
        println!("{id} -> {hits:?}");
    }
    let tag = trace_backward(&docs, "notify").unwrap();
    println!("notify <- {}", tag.map_or("untagged".into(), |t| t.to_string()));

    let reqs = Requirements::new("Academic").pin("V4.3".parse().unwrap());
    let mut session = Session::with_requirements(&model, &reqs).unwrap();
    session.apply("V3.2".parse().unwrap()).unwrap();
    let mut config = session.configuration().unwrap();
    config.extend_excluded(&model);
    println!("product: {}", config.summary());

    let custom = customize_document(&doc, &model, &config).unwrap();
    print!("{}", serialize_model_document(&custom));
    print!("{}", document_dot(&custom));
}
