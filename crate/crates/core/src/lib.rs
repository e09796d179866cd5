//! Exact spectrum and coherent dynamics of a single-mode cavity coupled to a
//! two-level emitter that vibrates in a harmonic trap.
//!
//! After the polaron transform the emitter recoil appears as a photon Kerr
//! term `χ (a†a)²` and an optomechanical coupling `η a†a (b + b†)`. The
//! excitation number `a†a + |e⟩⟨e|` is conserved, so the problem splits into
//! sectors labelled by `m` (photon number `m + 1` on the ground-state branch).
//! Within a sector the spectrum is computed two independent ways:
//!
//! * [`gfun`]: zeros of a transcendental G-function built from two displaced
//!   (Bogoliubov) phonon frames;
//! * [`diag`]: dense diagonalization of the truncated block Hamiltonian.
//!
//! [`dynamics`] propagates `|m+1, 0, g⟩` spectrally and extracts the Rabi
//! frequencies, and [`analytic`] holds the closed-form dressed-state results.
//!
//! # Units and energy reference
//!
//! Everything inside the crate is dimensionless: `ħ = 1`, frequencies and
//! energies in units of the emitter-cavity coupling `g`, times in `1/g`.
//! Energies inside a sector are stored relative to `(m+1)·ω_a`, the bare
//! energy of `|m+1, 0, g⟩`. With `ω_a ~ 10⁶ g` absolute energies carry only
//! ~10 significant digits below the offset, which is not enough for the
//! `1e-10` checks. [`model::DimensionlessModel::absolute_energy`] converts back.

pub mod analytic;
pub mod diag;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gfun;
pub mod model;
pub mod report;
pub mod scaled;

pub use error::{Error, Result};
pub use model::{DerivedConstants, DimensionlessModel, ModelParams};
