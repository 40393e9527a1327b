//! Photon geometry, amplitude assembly, cross sections and energy-law fits.

mod amplitude;
mod fit;
mod geometry;

pub use amplitude::{
    differential_cross_section, harmonic_rayleigh_closed, AmplitudeBreakdown, ClosedFormAmplitude, ElementFn,
    SeriesAmplitude,
};
pub use fit::{fit_energy_law, EnergyLawFit, LawOrder};
pub use geometry::{polarization_vectors, PhotonPair, ScatteringGeometry};
