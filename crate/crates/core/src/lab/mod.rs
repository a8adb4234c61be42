//! Exhaustive searches and fixed counterexamples: posets up to isomorphism,
//! p-measure enumeration, the cube obstruction and non-composing interval
//! extensions.

pub mod compose;
pub mod cube;
pub mod enumerate;
pub mod measures;

pub use compose::{composition_laws, find_noncomposing_interval_triple, CompositionSummary, Triple};
pub use cube::{build_cube, cube_obstruction, CubeError, CubeFixture, CubeObstruction};
pub use enumerate::{distributive_lattices_up_to_iso, lattices_up_to_iso, posets_up_to_iso};
pub use measures::{enumerate_pmeasures, Constraints, EnumerateError};
