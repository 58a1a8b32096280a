//! Compile a set of viable Boolean functions into one circuit built from
//! camouflaged cells, such that every viable function stays plausible.
//!
//! Pipeline: [`merge`] builds a multiplexed circuit of all functions,
//! [`synth`] optimizes it, [`ga`] searches pin assignments that maximize
//! logic sharing, [`techmap`] covers the result with look-alike cells and
//! removes the select inputs, and [`verify`] checks the per-function
//! configuration certificates by exhaustive simulation.

pub mod boolfunc;
pub mod celllib;
pub mod netlist;
pub mod sboxes;
pub mod sop;
pub mod ga;
pub mod merge;
pub mod synth;
pub mod techmap;
pub mod verify;
pub mod bench;
