//! A decision session on the customized model: each answer reports what
//! it forces, contradictions are refused, and previews change nothing.

use famvar::fixtures::hall_booking;
use famvar::{Decision, Requirements, Session};

fn answer(session: &mut Session, decision: &str) {
    let decision: Decision = decision.parse().unwrap();
    let outcome = session.apply(decision).unwrap();
    let verdict = if outcome.accepted { "ok" } else { "refused" };
    println!("{decision}: {verdict}");
    for c in outcome.consequences {
        println!("  {c}");
    }
}

fn main() {
    let reqs = Requirements::new("Academic").pin("V4.3".parse().unwrap());
    let mut session = Session::with_requirements(&hall_booking(), &reqs).unwrap();
    println!("open: {:?}", session.open_variants().iter().map(ToString::to_string).collect::<Vec<_>>());

    let what_if = session.preview("V1.1".parse().unwrap()).unwrap();
    println!("preview include V1.1 -> accepted={}", what_if.accepted);

    answer(&mut session, "V3.2");
    answer(&mut session, "V1.1");
    answer(&mut session, "V3.1");

    println!("complete: {}", session.is_complete());
    println!("{}", session.configuration().unwrap().summary());
    println!("{}", serde_json::to_string(&session.snapshot()).unwrap());

    session.retract("V3.2".parse().unwrap()).unwrap();
    println!("after retracting V3.2: {}", session.configuration().unwrap().summary());
}
