//! Exact phase-space simulation of a heralded noiseless amplifier for weak
//! coherent fields.
//!
//! The amplifier subtracts a photon from the input with a beam splitter and a
//! quantum nondemolition (QND) counter, adds the counted photon back at a second
//! beam splitter, and subtracts a photon again at a third. Runs where the
//! detectors report 1, 0, 1 photons carry an amplified, nearly coherent field.
//!
//! Every Wigner function that appears in the circuit is a polynomial times a
//! Gaussian, so the whole pipeline is evaluated in closed form by
//! [`GaussPolyState`]. The crate also provides:
//!
//! - [`amplifier`]: the heralded pipeline, its closed forms and the eight
//!   single-photon branches,
//! - [`optimizer`]: a log-barrier maximization of the success probability
//!   under a minimum-gain constraint,
//! - [`fock`]: an independent truncated number-basis simulator of the same
//!   circuit, used as a validation oracle.
//!
//! Phase-space units use ħ = κ = 1 throughout.
//!
//! The crate is `no_std` and needs only `alloc`. The `std` feature switches the
//! numeric backends to their standard-library implementations.

#![cfg_attr(not(test), no_std)]
// Small dense matrices read better with explicit indices.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod amplifier;
pub mod error;
pub mod fock;
pub mod gausspoly;
pub mod laguerre;
pub(crate) mod linalg;
pub mod optics;
pub mod optimizer;
pub(crate) mod poly;
pub(crate) mod real;

pub use amplifier::{AmplifierConfig, AmplifierReport, BranchEnumeration, BranchOutcome};
pub use error::{Error, Result};
pub use gausspoly::GaussPolyState;
pub use optics::{BeamSplitter, DetectionEvent};
pub use optimizer::{OptimizationProblem, OptimizationResult};

/// Complex amplitudes used across the public API.
pub type Complex64 = num_complex::Complex<f64>;
