//! Linear-optical state truncation and Fock-state punching.
//!
//! The crate models a small multiport interferometer built from beam
//! splitters and phase shifters, evolves multi-mode Fock states through it,
//! and conditions the result on photon-counting outcomes. For a fixed device
//! the heralded single-mode output is `Σ c_n γ_n |n⟩`, where `γ_n` are the
//! input-signal coefficients and `c_n` is the device's *truncation profile*.
//! Making `c_n` flat over a chosen index set realizes quantum scissors
//! (truncation) or punching (holes in the Fock expansion).
//!
//! Modules:
//!
//! - [`fock`]: occupation vectors, sparse state vectors, input constructors.
//! - [`circuit`]: elements, scattering matrices, device presets, solution catalog.
//! - [`evolution`]: sequential Fock-space evolution and the permanent oracle.
//! - [`conditioning`]: projection on detector outcomes, profiles, fidelities.
//! - [`optimizer`]: multi-start simplex search and catalog reconciliation.

pub mod circuit;
pub mod conditioning;
mod error;
pub mod evolution;
pub mod expr;
pub mod fock;
pub mod optimizer;

pub use circuit::{Circuit, Element, Preset, ScatteringMatrix, Wiring};
pub use conditioning::{DetectionPattern, TargetPattern, TruncationProfile};
pub use error::{Error, Result};
pub use fock::{Occupation, SingleModeInput, StateVector};
pub use num_complex::Complex64;
