//! Eigenvalue bounds for `-Δ + v f(r)` from envelope, kinetic-potential and
//! local-energy constructions, with a shooting solver as reference.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod kinetic;
pub mod local_energy;
pub mod numerics;
pub mod oracle;
pub mod potential;
pub mod spectra;

pub use envelope::{BoundResult, Method, Side};
pub use error::{Error, Result};
pub use numerics::Tolerance;
pub use potential::{Convexity, Domain, PotentialShape};
pub use spectra::{Mode, PowerLawSpectrum, QuantumNumbers};
