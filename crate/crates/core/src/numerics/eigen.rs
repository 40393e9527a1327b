use num_complex::Complex64;

use super::fd::SymBand;
use super::grid::{Grid1D, GridWavefunction};
use crate::models::AxisPotential;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub index: usize,
    pub energy: f64,
    pub state: GridWavefunction,
}

/// One-dimensional grid Hamiltonian `p²/2m + V`.
#[derive(Clone, Debug)]
pub struct GridHamiltonian {
    grid: Grid1D,
    band: SymBand,
}

impl GridHamiltonian {
    pub fn new(pot: &AxisPotential, mass: f64, hbar: f64, grid: Grid1D) -> Result<Self> {
        if matches!(pot, AxisPotential::Spectator) {
            return Err(Error::Unsupported("spectator axes have no grid Hamiltonian".into()));
        }
        if let AxisPotential::Box { half_width } = pot {
            let tol = 1e-12 * half_width;
            if (grid.x_min() + half_width).abs() > tol || (grid.x_max() - half_width).abs() > tol {
                return Err(Error::Grid(format!("box grid must span exactly [-{half_width}, {half_width}]")));
            }
        }
        Ok(Self { band: SymBand::hamiltonian(pot, mass, hbar, &grid)?, grid })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn band(&self) -> &SymBand {
        &self.band
    }

    pub fn apply(&self, psi: &GridWavefunction) -> Result<GridWavefunction> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        GridWavefunction::new(self.grid, self.band.apply(psi.values()))
    }

    /// Lowest `count` eigenpairs by Sturm bisection and inverse iteration.
    pub fn lowest(&self, count: usize) -> Result<Vec<EigenPair>> {
        let n = self.band.len();
        if count > n {
            return Err(Error::Grid(format!("asked for {count} states on a {n}-point grid")));
        }
        let (glo, ghi) = self.band.gershgorin();
        let mut out: Vec<EigenPair> = Vec::with_capacity(count);
        for k in 0..count {
            let e = self.bisect(k, glo, ghi);
            let mut v = self.inverse_iteration(e)?;
            for prev in &out {
                let c = prev.state.inner(&v)?;
                let pv = prev.state.values();
                let vals: Vec<Complex64> = v.values().iter().zip(pv).map(|(a, b)| a - c * b).collect();
                v = GridWavefunction::new(self.grid, vals)?.normalized()?;
            }
            let hv = self.apply(&v)?;
            let energy = v.inner(&hv)?.re;
            out.push(EigenPair { index: k, energy, state: fix_phase(v) });
        }
        Ok(out)
    }

    /// Every eigenpair of the grid Hamiltonian (dense diagonalization).
    pub fn full_basis(&self) -> Result<Vec<EigenPair>> {
        let eig = self.band.to_dense().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.band.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .enumerate()
            .map(|(index, col)| {
                let vals: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
                let state = fix_phase(GridWavefunction::from_real(self.grid, &vals)?.normalized()?);
                Ok(EigenPair { index, energy: eig.eigenvalues[col], state })
            })
            .collect()
    }

    /// Number of grid eigenvalues inside `(e - guard, e + guard)`.
    pub fn eigenvalues_near(&self, e: f64, guard: f64) -> usize {
        self.band.count_below(e + guard) - self.band.count_below(e - guard)
    }

    fn bisect(&self, k: usize, glo: f64, ghi: f64) -> f64 {
        let (mut lo, mut hi) = (glo, ghi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.band.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn inverse_iteration(&self, e: f64) -> Result<GridWavefunction> {
        let scale = e.abs().max(1.0);
        let mut shift = e;
        let lu = loop {
            match self.band.shifted_lu(Complex64::new(shift, 0.0)) {
                Ok(lu) => break lu,
                Err(_) => shift += 1e-13 * scale,
            }
        };
        let n = self.band.len();
        let mut v: Vec<Complex64> = (0..n).map(|j| Complex64::new(1.0 + (j % 7) as f64 * 0.01, 0.0)).collect();
        for _ in 0..4 {
            lu.solve(&mut v);
            let m = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            v.iter_mut().for_each(|c| *c = Complex64::new(c.re / m, 0.0));
        }
        GridWavefunction::new(self.grid, v)?.normalized()
    }
}

/// Real phase with the first non-negligible sample positive.
fn fix_phase(psi: GridWavefunction) -> GridWavefunction {
    let max = psi.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let first = psi.values().iter().find(|v| v.norm() > 1e-3 * max).copied();
    match first {
        Some(v) if v.re < 0.0 => psi.scaled(Complex64::new(-1.0, 0.0)),
        _ => psi,
    }
}

/// Lowest `count` eigenpairs of the 4th-order finite-difference Hamiltonian.
pub fn eigensolve_fd(pot: &AxisPotential, mass: f64, hbar: f64, grid: Grid1D, count: usize) -> Result<Vec<EigenPair>> {
    GridHamiltonian::new(pot, mass, hbar, grid)?.lowest(count)
}

/// Morse ground state `exp(-λ e^{-a(x-x0)}) e^{-a(x-x0)(λ-1/2)}`, normalized on the grid.
pub fn morse_ground_state(grid: Grid1D, lambda: f64, width: f64, center: f64) -> Result<GridWavefunction> {
    let vals: Vec<f64> = grid
        .points()
        .map(|x| {
            let u = width * (x - center);
            (-lambda * (-u).exp() - u * (lambda - 0.5)).exp()
        })
        .collect();
    GridWavefunction::from_real(grid, &vals)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_levels() {
        let g = Grid1D::symmetric(10.0, 2000).unwrap();
        let pairs = eigensolve_fd(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, g, 5).unwrap();
        for p in &pairs {
            let exact = p.index as f64 + 0.5;
            assert!(((p.energy - exact) / exact).abs() < 1e-8, "{} {}", p.index, p.energy);
        }
    }

    #[test]
    fn box_levels_and_orthonormality() {
        let g = Grid1D::symmetric(0.5, 1000).unwrap();
        let pairs = eigensolve_fd(&AxisPotential::Box { half_width: 0.5 }, 1.0, 1.0, g, 4).unwrap();
        for p in &pairs {
            let n = (p.index + 1) as f64;
            let exact = n * n * PI * PI / 2.0;
            assert!(((p.energy - exact) / exact).abs() < 1e-6);
        }
        for a in &pairs {
            for b in &pairs {
                let o = a.state.inner(&b.state).unwrap();
                let want = if a.index == b.index { 1.0 } else { 0.0 };
                assert!((o - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn box_grid_must_match_walls() {
        let g = Grid1D::symmetric(0.6, 100).unwrap();
        assert!(eigensolve_fd(&AxisPotential::Box { half_width: 0.5 }, 1.0, 1.0, g, 1).is_err());
    }

    #[test]
    fn full_basis_agrees_with_bisection() {
        let g = Grid1D::symmetric(6.0, 200).unwrap();
        let h = GridHamiltonian::new(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, g).unwrap();
        let full = h.full_basis().unwrap();
        let few = h.lowest(3).unwrap();
        for (a, b) in few.iter().zip(&full) {
            assert!((a.energy - b.energy).abs() < 1e-9);
            assert!((a.state.inner(&b.state).unwrap().norm() - 1.0).abs() < 1e-9);
        }
        assert_eq!(h.eigenvalues_near(1.5, 1e-3), 1);
        assert_eq!(h.eigenvalues_near(1.0, 1e-3), 0);
    }
}
