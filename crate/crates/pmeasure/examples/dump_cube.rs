//! Prints the built-in cube fixture as a diagram document.

use pmeasure::doc::{diagram_doc, envelope, to_text, Kind};
use pmeasure_core::lab::build_cube;

fn main() {
    let f = build_cube().expect("cube fixture");
    print!("{}", to_text(&envelope(Kind::Diagram, &diagram_doc(&f.diagram, Some(&f.blocks)))));
}
