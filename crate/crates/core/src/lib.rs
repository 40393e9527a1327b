//! Two-photon (Rayleigh/Raman) scattering amplitudes off bound targets.
//!
//! The sum over intermediate target states in the Kramers–Heisenberg
//! amplitude is replaced by a series of nested commutators of the target
//! Hamiltonian with the dipole operator. The crate is organised as:
//!
//! * [`opalg`]: exact noncommutative algebra of momenta and position functions.
//! * [`models`]: target Hamiltonians (box, linear, harmonic, Morse, coupled pairs).
//! * [`series`]: the commutator recursion, transition operators and closed forms.
//! * [`numerics`]: grids, finite-difference eigenbases, ladder algebra, matrix elements.
//! * [`scattering`]: geometry, amplitude assembly, cross sections and energy-law fits.
//! * [`oracle`]: brute-force sum-over-states and resolvent reference amplitudes.
//! * [`corpus`]: golden text dumps of scattering operators.

pub mod corpus;
pub mod error;
pub mod models;
pub mod numerics;
pub mod opalg;
pub mod oracle;
pub mod scattering;
pub mod series;

pub use error::{Error, Result};
