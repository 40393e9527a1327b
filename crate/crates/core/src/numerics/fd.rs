//! Five-point stencils and banded linear algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::Grid1D;
use crate::models::AxisPotential;
use crate::{Error, Result};

type C = Complex64;

/// `d/dx` with zero samples beyond the walls; antisymmetric on the grid.
pub fn d1(v: &[C], h: f64) -> Vec<C> {
    let n = v.len();
    let at = |j: isize| if j < 0 || j >= n as isize { C::new(0.0, 0.0) } else { v[j as usize] };
    (0..n as isize)
        .map(|j| (at(j - 2) - at(j - 1) * 8.0 + at(j + 1) * 8.0 - at(j + 2)) / (12.0 * h))
        .collect()
}

/// `-d²/dx²` with odd reflection at the Dirichlet walls.
pub fn neg_d2(v: &[C], h: f64) -> Vec<C> {
    let n = v.len();
    let at = |j: isize| {
        if j == -2 {
            -v[0]
        } else if j == n as isize + 1 {
            -v[n - 1]
        } else if j < 0 || j >= n as isize {
            C::new(0.0, 0.0)
        } else {
            v[j as usize]
        }
    };
    (0..n as isize)
        .map(|j| (at(j - 2) - at(j - 1) * 16.0 + at(j) * 30.0 - at(j + 1) * 16.0 + at(j + 2)) / (12.0 * h * h))
        .collect()
}

/// Real symmetric pentadiagonal matrix.
#[derive(Clone, Debug)]
pub struct SymBand {
    pub diag: Vec<f64>,
    pub off1: Vec<f64>,
    pub off2: Vec<f64>,
}

impl SymBand {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `hbar²/(2m) (-D2) + V` on the grid.
    pub fn hamiltonian(pot: &AxisPotential, mass: f64, hbar: f64, grid: &Grid1D) -> Result<Self> {
        let n = grid.len();
        let h = grid.spacing();
        if let AxisPotential::Morse { width, .. } = pot {
            grid.check_rate(2.0 * width)?;
        }
        let k = hbar * hbar / (2.0 * mass) / (12.0 * h * h);
        let mut diag = Vec::with_capacity(n);
        for (j, x) in grid.points().enumerate() {
            let v = pot.eval(x);
            if !v.is_finite() {
                return Err(Error::Grid(format!("potential is not finite at grid point x = {x}")));
            }
            let wall = if j == 0 || j == n - 1 { 29.0 } else { 30.0 };
            diag.push(k * wall + v);
        }
        Ok(Self { diag, off1: vec![-16.0 * k; n - 1], off2: vec![k; n - 2] })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match b - a {
            0 => self.diag[a],
            1 => self.off1[a],
            2 => self.off2[a],
            _ => 0.0,
        }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(2);
                let hi = (i + 2).min(n - 1);
                (lo..=hi).map(|j| v[j] * self.get(i, j)).sum()
            })
            .collect()
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r: f64 = (i.saturating_sub(2)..=(i + 2).min(n - 1)).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `sigma`, from the inertia of `LDLᵀ = A - sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let tiny = f64::EPSILON * self.diag.iter().fold(1.0f64, |m, d| m.max(d.abs()));
        let mut d = vec![0.0; n];
        // l1[i] = L[i][i-1], l2[i] = L[i][i-2]
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        let mut neg = 0;
        for i in 0..n {
            if i >= 2 {
                l2[i] = self.off2[i - 2] / d[i - 2];
            }
            if i >= 1 {
                let mut a = self.off1[i - 1];
                if i >= 2 {
                    a -= l2[i] * l1[i - 1] * d[i - 2];
                }
                l1[i] = a / d[i - 1];
            }
            let mut di = self.diag[i] - sigma;
            if i >= 1 {
                di -= l1[i] * l1[i] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i] * l2[i] * d[i - 2];
            }
            if di.abs() < tiny {
                di = -tiny;
            }
            if di < 0.0 {
                neg += 1;
            }
            d[i] = di;
        }
        neg
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// LU factorization of `A - z`.
    pub fn shifted_lu(&self, z: C) -> Result<BandLu> {
        BandLu::factor(self.len(), 2, 2, |i, j| if i == j { C::new(self.diag[i], 0.0) - z } else { C::new(self.get(i, j), 0.0) })
    }
}

/// Banded LU with partial pivoting.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    width: usize,
    // row i holds columns i - kl ..= i + kl + ku
    rows: Vec<C>,
    mult: Vec<C>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> C) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut rows = vec![C::new(0.0, 0.0); n * width];
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = entry(i, j);
                scale = scale.max(v.norm());
                rows[idx(i, j)] = v;
            }
        }
        let mut mult = vec![C::new(0.0, 0.0); n * kl.max(1)];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last).max_by(|&a, &b| rows[idx(a, k)].norm().total_cmp(&rows[idx(b, k)].norm())).unwrap();
            if rows[idx(p, k)].norm() <= scale * 1e-300 {
                return Err(Error::Numerical(format!("singular banded matrix at row {k}")));
            }
            piv[k] = p;
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    rows.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = rows[idx(k, k)];
            for i in k + 1..=last {
                let l = rows[idx(i, k)] / pivot;
                mult[k * kl + (i - k - 1)] = l;
                if l != C::new(0.0, 0.0) {
                    for j in k + 1..=jmax {
                        let u = rows[idx(k, j)];
                        rows[idx(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, kl, width, rows, mult, piv })
    }

    pub fn solve(&self, b: &mut [C]) {
        let (n, kl, width) = (self.n, self.kl, self.width);
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.mult[k * kl + (i - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + width - 1 - kl).min(n - 1) {
                s -= self.rows[idx(k, j)] * b[j];
            }
            b[k] = s / self.rows[idx(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_lu_solves_random_system() {
        let n = 40;
        let a = |i: usize, j: usize| {
            let d = i as f64 - j as f64;
            if d.abs() > 2.0 {
                C::new(0.0, 0.0)
            } else {
                C::new(((i * 7 + j * 3) % 11) as f64 - 5.0, d * 0.3)
            }
        };
        let lu = BandLu::factor(n, 2, 2, a).unwrap();
        let x: Vec<C> = (0..n).map(|k| C::new(k as f64, 1.0 - k as f64 * 0.1)).collect();
        let mut b: Vec<C> = (0..n).map(|i| (0..n).map(|j| a(i, j) * x[j]).sum()).collect();
        lu.solve(&mut b);
        for k in 0..n {
            assert!((b[k] - x[k]).norm() < 1e-9, "{k}: {} vs {}", b[k], x[k]);
        }
    }

    #[test]
    fn stencils_are_fourth_order() {
        let g = Grid1D::new(0.0, std::f64::consts::PI, 400).unwrap();
        let v: Vec<C> = g.points().map(|x| C::new((2.0 * x).sin(), 0.0)).collect();
        let d = neg_d2(&v, g.spacing());
        let err = g.points().zip(&d).map(|(x, y)| (y.re - 4.0 * (2.0 * x).sin()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
        let d = d1(&v, g.spacing());
        let err = g.points().zip(&d).skip(2).take(396).map(|(x, y)| (y.re - 2.0 * (2.0 * x).cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn inertia_matches_dense_spectrum() {
        let g = Grid1D::new(-4.0, 4.0, 60).unwrap();
        let h = SymBand::hamiltonian(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, &g).unwrap();
        let mut ev: Vec<f64> = h.to_dense().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for s in [-1.0, 0.2, 1.7, 5.3, 40.0] {
            assert_eq!(h.count_below(s), ev.iter().filter(|&&e| e < s).count());
        }
    }
}
