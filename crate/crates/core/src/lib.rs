//! Coherent generation of entangled light pulses by a laser-driven trapped
//! atom coupled to two cavity modes.
//!
//! The atom's motion mediates a pair-creation interaction with one cavity
//! mode (χ₁) and an exchange interaction with the other (χ₂). For
//! |χ₂| > |χ₁| the closed dynamics are periodic; after half a period T_π the
//! cavity modes hold a two-mode squeezed state and the motion is decoupled.
//!
//! - [`params`]: physical parameters, couplings, regime checks
//! - [`gaussian`]: covariance-matrix states and exact linear evolution
//! - [`fock`]: truncated number-basis oracle for the same Hamiltonian
//! - [`protocol`]: simultaneous and sequential pulse protocols, homodyne signal
//! - [`config`] and [`cli`]: key–value configuration and the command line front end

pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod params;
pub mod protocol;

pub use error::{Error, Result};
