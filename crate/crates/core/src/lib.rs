//! Finite order theory toolkit: posets, distributive join-semilattices,
//! p-measures, strong amalgams and the gadget construction that represents a
//! finite distributive semilattice by a p-measured lattice.
//!
//! Everything here is `no_std` with `alloc`. File formats, DOT output and the
//! command line live in the companion `pmeasure` crate.

#![no_std]
// table code indexes several parallel arrays by the same position
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod amalgam;
pub mod bits;
pub mod construct;
pub mod diagram;
pub mod element;
pub mod extension;
pub mod lab;
pub mod measure;
pub mod order;
pub mod semilattice;

pub use amalgam::{AmalgamMeasure, MeasuredDiagram, StrongAmalgam};
pub use construct::{ConstructionRun, Gadget, Representation};
pub use diagram::{IndexSemilattice, SemilatticeDiagram};
pub use element::{Element, GadgetPoint, GadgetTag};
pub use extension::{ExtensionWitness, IntervalScheme};
pub use measure::{IntervalMeasureFamily, PMeasuredPoset};
pub use order::FinitePoset;
pub use semilattice::{FiniteJoinSemilattice, Homomorphism};
