use std::f64::consts::PI;

use crate::{Error, Result};

/// Scattering angle `theta` in the xz plane and linear-polarization azimuths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringGeometry {
    pub theta: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl ScatteringGeometry {
    pub fn new(theta: f64, chi1: f64, chi2: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("scattering angle must lie in [0, pi], got {theta}")));
        }
        if !chi1.is_finite() || !chi2.is_finite() {
            return Err(Error::Domain("polarization angles must be finite".into()));
        }
        Ok(Self { theta, chi1, chi2 })
    }

    /// Forward scattering with both photons polarized along x.
    pub fn forward_x() -> Self {
        Self { theta: 0.0, chi1: 0.0, chi2: 0.0 }
    }

    pub fn polarizations(&self) -> ([f64; 3], [f64; 3]) {
        polarization_vectors(self)
    }

    pub fn eps_dot(&self) -> f64 {
        let (a, b) = self.polarizations();
        a.iter().zip(&b).map(|(x, y)| x * y).sum()
    }
}

/// `ε1 = (cos χ1, sin χ1, 0)`, `ε2 = (cos χ2 cos θ, sin χ2, cos χ2 sin θ)`.
pub fn polarization_vectors(g: &ScatteringGeometry) -> ([f64; 3], [f64; 3]) {
    let (s1, c1) = g.chi1.sin_cos();
    let (s2, c2) = g.chi2.sin_cos();
    let (st, ct) = g.theta.sin_cos();
    ([c1, s1, 0.0], [c2 * ct, s2, c2 * st])
}

/// Incident and scattered photon energies, `E2 = E1 - E_res`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonPair {
    pub e1: f64,
    pub e2: f64,
}

impl PhotonPair {
    pub fn new(e1: f64, e_res: f64) -> Result<Self> {
        if !(e1 > 0.0) {
            return Err(Error::Domain(format!("incident energy must be positive, got {e1}")));
        }
        let e2 = e1 - e_res;
        if e2 < 0.0 {
            return Err(Error::Domain(format!("E2 = {e2} is negative: E1 is below the transition energy {e_res}")));
        }
        Ok(Self { e1, e2 })
    }

    pub fn elastic(e: f64) -> Result<Self> {
        Self::new(e, 0.0)
    }

    pub fn e_res(&self) -> f64 {
        self.e1 - self.e2
    }
}
