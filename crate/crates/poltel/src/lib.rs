//! Simulation toolkit for teleportation of continuous-variable polarisation states.
//!
//! The crate models linearised quantum-optical networks over a growable basis of
//! independent noise sources ([`fluct`]), provides the optical elements that act on
//! them ([`optics`]), computes quantum Stokes-operator statistics on the Poincaré
//! sphere ([`stokes`]), simulates four polarisation teleportation protocols end to
//! end ([`protocols`]), and scores them with fidelity, signal-transfer and
//! conditional-variance figures of merit ([`metrics`]). A deterministic
//! derivative-free optimizer tunes beamsplitter transmittivities and feedforward
//! gains ([`optimizer`]), and [`sweeps`] drives the curves the CLI emits.
//! [`validate`] bundles the numerical checks the `poltel validate` command runs.

pub mod error;
pub mod fluct;
pub mod metrics;
pub mod optics;
pub mod optimizer;
pub mod protocols;
pub mod stokes;
pub mod sweeps;
pub mod validate;

pub use error::{Error, Result};
