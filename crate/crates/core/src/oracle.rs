//! Reference amplitudes without the commutator series: an explicit sum over
//! grid eigenstates and a direct banded resolvent solve.

use num_complex::Complex64;

use crate::numerics::{apply_operator, AxisState, EigenPair, GridHamiltonian, GridWavefunction, ProductState};
use crate::opalg::{Axis, Bindings, Coord, OperatorExpr};
use crate::scattering::{AmplitudeBreakdown, PhotonPair, ScatteringGeometry, SeriesAmplitude};
use crate::{Error, Result};

type C = Complex64;

pub const DEFAULT_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    SumOverStates,
    Resolvent,
}

/// Grid Hamiltonian of one axis with an optional eigenbasis.
#[derive(Clone, Debug)]
pub struct AxisOracle {
    pub hamiltonian: GridHamiltonian,
    pub basis: Vec<EigenPair>,
}

impl AxisOracle {
    pub fn new(hamiltonian: GridHamiltonian) -> Self {
        Self { hamiltonian, basis: Vec::new() }
    }

    /// Every eigenstate of the grid Hamiltonian.
    pub fn with_full_basis(hamiltonian: GridHamiltonian) -> Result<Self> {
        let basis = hamiltonian.full_basis()?;
        Ok(Self { hamiltonian, basis })
    }

    pub fn with_basis(hamiltonian: GridHamiltonian, basis: Vec<EigenPair>) -> Self {
        Self { hamiltonian, basis }
    }

    fn energy_of(&self, psi: &GridWavefunction) -> Result<f64> {
        let hpsi = self.hamiltonian.apply(psi)?;
        Ok(psi.inner(&hpsi)?.re / psi.inner(psi)?.re)
    }

    /// `<g|(H - z)^{-1}|rhs>` and, for sums, the share of the last 10% of states.
    fn resolvent_element(
        &self,
        g: &GridWavefunction,
        rhs: &GridWavefunction,
        z: f64,
        method: OracleMethod,
        guard: f64,
    ) -> Result<(C, Option<f64>)> {
        match method {
            OracleMethod::SumOverStates => {
                let mut total = C::new(0.0, 0.0);
                let mut tail = C::new(0.0, 0.0);
                let cut = self.basis.len() - self.basis.len() / 10;
                let scale = g.norm() * rhs.norm();
                for (k, nu) in self.basis.iter().enumerate() {
                    let num = g.inner(&nu.state)? * nu.state.inner(rhs)?;
                    let den = nu.energy - z;
                    if den.abs() < guard {
                        // uncoupled states carry no pole
                        if num.norm() <= 1e-12 * scale {
                            continue;
                        }
                        return Err(Error::Resonance(format!(
                            "intermediate state {} (E = {}) is within {guard} of the photon energy",
                            nu.index, nu.energy
                        )));
                    }
                    let t = num / den;
                    total += t;
                    if k >= cut {
                        tail += t;
                    }
                }
                let sat = if total.norm() > 0.0 { tail.norm() / total.norm() } else { 0.0 };
                Ok((total, Some(sat)))
            }
            OracleMethod::Resolvent => {
                let s = self.solve(rhs, z, guard)?;
                Ok((g.inner(&s)?, None))
            }
        }
    }

    /// `(H - z) s = rhs`
    pub fn solve(&self, rhs: &GridWavefunction, z: f64, guard: f64) -> Result<GridWavefunction> {
        let band = self.hamiltonian.band();
        if self.hamiltonian.eigenvalues_near(z, guard) > 0 {
            let nu = band.count_below(z - guard);
            return Err(Error::Resonance(format!("grid eigenvalue {nu} lies within {guard} of {z}")));
        }
        let lu = band
            .shifted_lu(C::new(z, 0.0))
            .map_err(|_| Error::Resonance(format!("resolvent is singular at {z}")))?;
        let mut v = rhs.values().to_vec();
        lu.solve(&mut v);
        GridWavefunction::new(*rhs.grid(), v)
    }
}

/// Reference amplitudes for a single particle in a separable potential.
/// Axes without an oracle must hold spectator states.
#[derive(Clone, Debug)]
pub struct SeparableOracle {
    pub axes: [Option<AxisOracle>; 3],
    pub mass: f64,
    pub light_speed: f64,
    pub guard: f64,
    pub bindings: Bindings,
}

/// Oracle amplitude with the saturation share of truncated sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: C,
    pub saturation: Option<f64>,
}

fn grid_state(s: &AxisState) -> Option<&GridWavefunction> {
    match s {
        AxisState::Grid(g) => Some(g),
        _ => None,
    }
}

impl SeparableOracle {
    pub fn new(axes: [Option<AxisOracle>; 3], mass: f64, bindings: Bindings) -> Result<Self> {
        let light_speed = crate::opalg::Coefficient::param(crate::opalg::LIGHT_SPEED).evaluate(&bindings)?.re;
        Ok(Self { axes, mass, light_speed, guard: DEFAULT_GUARD, bindings })
    }

    fn momentum(&self, axis: Axis, psi: &GridWavefunction) -> Result<GridWavefunction> {
        Ok(apply_operator(&OperatorExpr::momentum(Coord::new(0, axis)), psi, &self.bindings)?.state)
    }

    fn overlap(&self, f: &AxisState, i: &AxisState) -> Result<C> {
        match (f, i) {
            (AxisState::Spectator, AxisState::Spectator) => Ok(C::new(1.0, 0.0)),
            (AxisState::Grid(f), AxisState::Grid(i)) => f.inner(i),
            _ => Err(Error::Unsupported("oracle states must be grid or spectator states".into())),
        }
    }

    /// `<f|p_axis|i>` on one axis.
    pub fn dipole_element(&self, axis: Axis, f: &AxisState, i: &AxisState) -> Result<C> {
        match (f, i) {
            (AxisState::Spectator, AxisState::Spectator) => Ok(C::new(0.0, 0.0)),
            (AxisState::Grid(f), AxisState::Grid(i)) => f.inner(&self.momentum(axis, i)?),
            _ => Err(Error::Unsupported("oracle states must be grid or spectator states".into())),
        }
    }

    /// `Σ_ν <f|p·εa|ν><ν|p·εb|i>/(E_ν − E_i − w)`: `A12` for `w = E1` with
    /// `(εa, εb) = (ε2, ε1)`, `A21` for `w = −E2` with the roles swapped.
    pub fn second_order(
        &self,
        f: &ProductState,
        i: &ProductState,
        eps_a: &[f64; 3],
        eps_b: &[f64; 3],
        w: f64,
        method: OracleMethod,
    ) -> Result<OracleValue> {
        let mut total = C::new(0.0, 0.0);
        let mut saturation: Option<f64> = None;
        for l in Axis::ALL {
            let eb = eps_b[l.index()];
            if eb.abs() <= 1e-15 {
                continue;
            }
            let (Some(ax), Some(il)) = (&self.axes[l.index()], grid_state(i.axis(l))) else {
                return Err(Error::Unsupported(format!("no dynamics on the {} axis for the dipole seed", l.name())));
            };
            let fl = grid_state(f.axis(l)).ok_or_else(|| Error::Unsupported("final state lacks a grid factor".into()))?;
            let z = ax.energy_of(il)? + w;
            let rhs = self.momentum(l, il)?;
            for j in Axis::ALL {
                let ea = eps_a[j.index()];
                if ea.abs() <= 1e-15 {
                    continue;
                }
                let mut factor = C::new(ea * eb, 0.0);
                for k in Axis::ALL {
                    if k != j && k != l {
                        factor *= self.overlap(f.axis(k), i.axis(k))?;
                    }
                }
                if factor == C::new(0.0, 0.0) {
                    continue;
                }
                let g = if j == l {
                    self.momentum(l, fl)?
                } else {
                    factor *= self.dipole_element(j, f.axis(j), i.axis(j))?;
                    if factor == C::new(0.0, 0.0) {
                        continue;
                    }
                    fl.clone()
                };
                let (v, sat) = ax.resolvent_element(&g, &rhs, z, method, self.guard)?;
                total += factor * v;
                if let Some(s) = sat {
                    saturation = Some(saturation.map_or(s, |p| p.max(s)));
                }
            }
        }
        Ok(OracleValue { value: total, saturation })
    }

    pub fn a12(&self, f: &ProductState, i: &ProductState, geom: &ScatteringGeometry, e1: f64, method: OracleMethod) -> Result<OracleValue> {
        let (eps1, eps2) = geom.polarizations();
        self.second_order(f, i, &eps2, &eps1, e1, method)
    }

    pub fn a21(&self, f: &ProductState, i: &ProductState, geom: &ScatteringGeometry, e2: f64, method: OracleMethod) -> Result<OracleValue> {
        let (eps1, eps2) = geom.polarizations();
        self.second_order(f, i, &eps1, &eps2, -e2, method)
    }

    /// Full amplitude `M = (ε1·ε2)<f|i> − (A12 + A21)/m`.
    pub fn breakdown(
        &self,
        f: &ProductState,
        i: &ProductState,
        geom: &ScatteringGeometry,
        photons: &PhotonPair,
        method: OracleMethod,
    ) -> Result<(AmplitudeBreakdown, Option<f64>)> {
        let a12 = self.a12(f, i, geom, photons.e1, method)?;
        let a21 = self.a21(f, i, geom, photons.e2, method)?;
        let mut ov = C::new(1.0, 0.0);
        for k in Axis::ALL {
            ov *= self.overlap(f.axis(k), i.axis(k))?;
        }
        let thomson = ov * geom.eps_dot();
        let total = thomson - (a12.value + a21.value) / self.mass;
        let sat = match (a12.saturation, a21.saturation) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        Ok((
            AmplitudeBreakdown {
                thomson,
                a12: a12.value,
                a21: a21.value,
                total,
                partials: vec![thomson],
                particles: 1,
                mass: self.mass,
                damping: 0.0,
                sign_warning: false,
            },
            sat,
        ))
    }
}

/// `|s>` solving `(H0 − E_i − E1)|s> = c p|i>` along one axis.
pub fn resolvent_state(ax: &AxisOracle, axis: Axis, i: &GridWavefunction, e1: f64, light_speed: f64, b: &Bindings, guard: f64) -> Result<GridWavefunction> {
    let z = ax.energy_of(i)? + e1;
    let rhs = apply_operator(&OperatorExpr::momentum(Coord::new(0, axis)), i, b)?.state.scaled(C::new(light_speed, 0.0));
    ax.solve(&rhs, z, guard)
}

/// Deviations of the series partial sums from an oracle amplitude.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub oracle: AmplitudeBreakdown,
    /// `M^(n)` for `n = 1..=orders`.
    pub series: Vec<C>,
    pub abs_deviation: Vec<f64>,
    pub rel_deviation: Vec<f64>,
    pub saturation: Option<f64>,
}

impl OracleReport {
    pub fn new(oracle: AmplitudeBreakdown, series: Vec<C>, saturation: Option<f64>) -> Self {
        let m = oracle.total;
        let abs_deviation: Vec<f64> = series.iter().map(|s| (s - m).norm()).collect();
        let rel_deviation = abs_deviation.iter().map(|d| d / m.norm()).collect();
        Self { oracle, series, abs_deviation, rel_deviation, saturation }
    }

    /// `order,abs_deviation,rel_deviation` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
        w.write_record(["order", "abs_deviation", "rel_deviation"]).map_err(io)?;
        for (n, (a, r)) in self.abs_deviation.iter().zip(&self.rel_deviation).enumerate() {
            w.write_record([(n + 1).to_string(), format!("{a:e}"), format!("{r:e}")]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Series partial amplitudes against an oracle at one energy.
pub fn compare_series(
    series: &SeriesAmplitude,
    oracle: &SeparableOracle,
    f: &ProductState,
    i: &ProductState,
    geom: &ScatteringGeometry,
    photons: &PhotonPair,
    method: OracleMethod,
) -> Result<OracleReport> {
    let (reference, sat) = oracle.breakdown(f, i, geom, photons, method)?;
    let b = series.breakdown(geom, photons, 0.0)?;
    Ok(OracleReport::new(reference, b.partials[1..].to_vec(), sat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::AxisPotential;
    use crate::numerics::Grid1D;
    use crate::opalg::{rat, HBAR, LIGHT_SPEED};

    fn units() -> Bindings {
        [(HBAR.to_string(), rat(1, 1)), (LIGHT_SPEED.to_string(), rat(1, 1))].into_iter().collect()
    }

    fn harmonic_x() -> (SeparableOracle, ProductState) {
        let g = Grid1D::symmetric(8.0, 300).unwrap();
        let h = GridHamiltonian::new(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, g).unwrap();
        let ax = AxisOracle::with_full_basis(h).unwrap();
        let ground = ax.basis[0].state.clone();
        let o = SeparableOracle::new([Some(ax), None, None], 1.0, units()).unwrap();
        (o, ProductState::new([AxisState::Grid(ground), AxisState::Spectator, AxisState::Spectator]))
    }

    #[test]
    fn sum_and_resolvent_agree() {
        let (o, s) = harmonic_x();
        let geom = ScatteringGeometry::forward_x();
        let a = o.a12(&s, &s, &geom, 0.37, OracleMethod::SumOverStates).unwrap().value;
        let b = o.a12(&s, &s, &geom, 0.37, OracleMethod::Resolvent).unwrap().value;
        assert!((a - b).norm() < 1e-9 * a.norm());
    }

    #[test]
    fn resonance_is_refused() {
        let (o, s) = harmonic_x();
        let geom = ScatteringGeometry::forward_x();
        let e = o.axes[0].as_ref().unwrap().basis[1].energy - o.axes[0].as_ref().unwrap().basis[0].energy;
        assert!(matches!(o.a12(&s, &s, &geom, e, OracleMethod::SumOverStates), Err(Error::Resonance(_))));
        assert!(matches!(o.a12(&s, &s, &geom, e, OracleMethod::Resolvent), Err(Error::Resonance(_))));
    }

    #[test]
    fn empty_basis_gives_zero() {
        let (mut o, s) = harmonic_x();
        o.axes[0].as_mut().unwrap().basis.clear();
        let v = o.a12(&s, &s, &ScatteringGeometry::forward_x(), 0.5, OracleMethod::SumOverStates).unwrap();
        assert_eq!(v.value, C::new(0.0, 0.0));
    }

    #[test]
    fn report_csv() {
        let (o, s) = harmonic_x();
        let photons = PhotonPair::elastic(0.5).unwrap();
        let (b, sat) = o.breakdown(&s, &s, &ScatteringGeometry::forward_x(), &photons, OracleMethod::SumOverStates).unwrap();
        let r = OracleReport::new(b, vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], sat);
        let text = r.to_csv().unwrap();
        assert!(text.starts_with("order,abs_deviation,rel_deviation\n1,"));
        assert_eq!(text.lines().count(), 3);
    }
}
