//! Prints the variant table of the Hall Booking model.

use famvar::fixtures::hall_booking;
use famvar::io::render_table;

fn main() {
    print!("{}", render_table(&hall_booking()));
}
