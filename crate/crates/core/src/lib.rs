//! Unit resolution as a computation model over partial assignments.
//!
//! A CNF formula is read as a program and a partial assignment as its input.
//! The crate provides the two propagation engines, the reductions between
//! computing a matching function by contradiction and by propagation, the
//! composition of arc-consistent encodings from inconsistency-detecting
//! ones, and exhaustive verifiers for all of them.

pub mod cli;
pub mod cnf;
pub mod dimacs;
pub mod error;
pub mod oracle;
pub mod propagate;
pub mod reduce;
pub mod verify;

pub use cnf::{Clause, CnfFormula, Lit, LiteralSet, PartialAssignment, Var, VarNames};
pub use error::{Error, Result};
