//! Proof equivalence for linear logic with additives, decided through
//! binary decision tree slicings.

// Rule errors carry the offending formulas; they are on the cold path.
#![allow(clippy::result_large_err)]

pub mod bdt;
pub mod classical;
pub mod encode;
pub mod equiv;
pub mod formula;
pub mod generators;
pub mod proof;
pub mod reductions;
pub mod rewrite;
pub mod slicing;
pub mod syntax;
