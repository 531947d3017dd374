//! Desk-scale models of language as a physical system: a finite spin-lattice
//! carrying symbol states, a head generating word-string superpositions,
//! stability-time estimation and efficiency classification, toy axiomatizable
//! theories with theorem enumeration, Gödel numeral maps, and a 2-D ink-molecule
//! page model.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the experiment
//! runner live in the companion `lexphys-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alphabet;
pub mod dynamics;
pub mod expressions;
pub mod godel;
pub mod hilbert;
pub mod ink;
pub mod stability;
pub mod theory;

/// Tolerance on norm checks throughout the crate.
pub const NORM_TOL: f64 = 1e-10;
