//! Algebraic kernel for anyon models.
//!
//! Everything here is pure computation over small exact or floating-point
//! data: fusion multiplicity tables, fusion-tree bases, the Fibonacci
//! pentagon and hexagon solutions, generic F/R-symbol checks, braid-group
//! representations on fusion-tree bases, and exhaustive braid-word search.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, threading and
//! the command-line front end live in the `anyonkit` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod braid_rep;
pub mod fusion_ring;
pub mod fusion_trees;
pub mod gate_search;
pub mod linalg;
pub mod model_store;
pub mod solver;

mod math;

pub use num_complex::Complex64;

/// Default pass/fail tolerance for residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;
