use num_complex::Complex64;

use crate::{Error, Result};

/// Uniform Dirichlet grid. The `n` sample points are the interior points of
/// `[x_min, x_max]`; the wavefunction vanishes at both end points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Grid(format!("invalid interval [{x_min}, {x_max}]")));
        }
        if n < 8 {
            return Err(Error::Grid(format!("need at least 8 points, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// `[-half_width, half_width]`. An even `n` keeps `x = 0` off the grid.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (j + 1) as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Same interval with half the spacing.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n + 1, ..*self }
    }

    pub fn straddles_zero(&self) -> bool {
        self.x_min < 0.0 && self.x_max > 0.0
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }

    /// Exponential factors `e^{rate x}` must be resolved: `h |rate| < 0.1`.
    pub fn check_rate(&self, rate: f64) -> Result<()> {
        let r = self.spacing() * rate.abs();
        if r < 0.1 {
            Ok(())
        } else {
            Err(Error::Grid(format!("h*|rate| = {r:.3} is not below 0.1; refine the grid")))
        }
    }
}

/// Complex samples on a [`Grid1D`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridWavefunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        Self { values: grid.points().map(f).collect(), grid }
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Trapezoid inner product `<self|other>`.
    pub fn inner(&self, other: &GridWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Numerical("cannot normalize a zero or non-finite state".into()));
        }
        self.values.iter_mut().for_each(|v| *v /= n);
        Ok(self)
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// `psi(-x) = -psi(x)` on a symmetric grid.
    pub fn is_antisymmetric(&self) -> bool {
        if !self.grid.is_symmetric() {
            return false;
        }
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let n = self.values.len();
        (0..n).all(|j| (self.values[j] + self.values[n - 1 - j]).norm() <= 1e-10 * scale.max(1e-300))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_points() {
        let g = Grid1D::new(0.0, 1.0, 9).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert!((g.x(0) - 0.1).abs() < 1e-15);
        assert!((g.x(8) - 0.9).abs() < 1e-15);
        assert_eq!(g.refined().spacing(), 0.05);
    }

    #[test]
    fn rate_check() {
        let g = Grid1D::new(0.0, 10.0, 99).unwrap();
        assert!(g.check_rate(0.9).is_ok());
        assert!(g.check_rate(1.0).is_err());
    }

    #[test]
    fn symmetric_grid_excludes_origin_for_even_count() {
        let g = Grid1D::symmetric(1.0, 100).unwrap();
        assert!(g.points().all(|x| x != 0.0));
        let odd = GridWavefunction::from_fn(g, |x| Complex64::new(x, 0.0));
        assert!(odd.is_antisymmetric());
    }
}
