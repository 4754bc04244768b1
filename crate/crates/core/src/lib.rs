//! Trace languages of one-dimensional cellular automata and the effective
//! constructions that realize subshifts as partial, poly- and ultimate
//! traces.

pub mod alphabet;
pub mod ca;
pub mod compile;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod freeze;
pub mod gadget;
mod par;
pub mod semifinite;
pub mod subshift;
pub mod trace;
pub mod verify;

pub use alphabet::{Alphabet, Letter, Word};
pub use ca::{CellularAutomaton, LocalRule, PartialCA, PeriodicConfiguration};
pub use error::{Error, Result};
pub use subshift::{DeterministicOrbit, Sft, Sided, SoficGraph, SubshiftHandle};
