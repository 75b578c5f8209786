//! Numerics for certifying long-range quantum correlations in routed Bell
//! experiments.
//!
//! A source distributes two qubits; Alice measures one near the source while
//! Bob's qubit is switched either to a nearby device (short path) or to a
//! distant, lossy device (long path). This crate computes the observable
//! statistics of qubit strategies, the bounds obeyed by short-range quantum
//! (SRQ) models, the local-hidden-state geometry behind those bounds, and
//! the hidden-variable models that reproduce lossy singlet statistics.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// Probability tables are indexed by setting and outcome labels.
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod error;
pub mod lhs_geometry;
pub mod lhv_models;
pub mod numeric;
pub mod qmath;
pub mod strategies;
pub mod tol;

pub use error::{Error, Result};
pub use strategies::{RoutedStats, SettingCount};
