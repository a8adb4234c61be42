//! JSON documents, DOT output and the command line for `pmeasure-core`.

pub mod cli;
pub mod doc;
pub mod dot;
