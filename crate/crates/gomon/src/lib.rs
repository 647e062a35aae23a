//! Graphs of monoids over subgroups of the rationals.
//!
//! Exact normal forms, least common right multiples, characters of the
//! constructible-ideal spectrum, and the classification of closed invariant
//! subspaces with the resulting boundary-quotient invariants.

pub mod arith;
pub mod graph;
pub mod words;
pub mod lcm;
pub mod oracle;
pub mod omega;
pub mod classify;
pub mod cli;
