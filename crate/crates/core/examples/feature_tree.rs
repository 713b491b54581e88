//! The feature tree of the Hall Booking model as text and Graphviz.

use famvar::derive::{feature_tree_dot, feature_tree_text};
use famvar::export_feature_tree;
use famvar::fixtures::hall_booking;

fn main() {
    let tree = export_feature_tree(&hall_booking()).unwrap();
    print!("{}", feature_tree_text(&tree));
    print!("{}", feature_tree_dot(&tree));
}
