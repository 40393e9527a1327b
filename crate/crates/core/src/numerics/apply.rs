use std::collections::BTreeMap;

use num_complex::Complex64;

use super::fd::{d1, neg_d2};
use super::grid::GridWavefunction;
use crate::opalg::{rat_to_f64, Bindings, Coefficient, Coord, OperatorExpr, HBAR};
use crate::{Error, Result};

/// Result of acting with an operator on a grid state.
#[derive(Clone, Debug)]
pub struct Applied {
    pub state: GridWavefunction,
    /// A `sign` factor met a state that is not odd on a grid straddling `x = 0`.
    pub sign_warning: bool,
}

pub(crate) fn bound_value(b: &Bindings, name: &str) -> Result<f64> {
    Coefficient::param(name).evaluate(b).map(|c| c.re)
}

/// The single coordinate an expression acts on, if any.
pub fn single_coord(op: &OperatorExpr) -> Result<Option<Coord>> {
    let coords = op.coords();
    match coords.len() {
        0 => Ok(None),
        1 => Ok(coords.into_iter().next()),
        _ => Err(Error::Unsupported(format!("grid operators act on one coordinate, got {}", coords.len()))),
    }
}

/// Acts with a one-coordinate operator on `psi`. Momenta are `-i hbar` times
/// five-point differences, with `p²` taken from the second-difference stencil.
pub fn apply_operator(op: &OperatorExpr, psi: &GridWavefunction, b: &Bindings) -> Result<Applied> {
    single_coord(op)?;
    let grid = *psi.grid();
    let h = grid.spacing();
    let terms = op.canonicalize().normal_terms();
    let needs_hbar = terms.iter().any(|(w, _)| w.momentum_degree() > 0);
    let hbar = if needs_hbar { bound_value(b, HBAR)? } else { 1.0 };
    let mut powers: BTreeMap<u32, Vec<Complex64>> = BTreeMap::new();
    powers.insert(0, psi.values().to_vec());
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut sign_warning = false;
    for (word, coef) in &terms {
        let c = coef.evaluate(b)?;
        for (form, r) in word.position.exps.iter() {
            let k: f64 = form.coords().map(|(_, c)| rat_to_f64(c).abs()).sum();
            grid.check_rate(rat_to_f64(r) * k)?;
        }
        if word.position.has_sign() && grid.straddles_zero() && !psi.is_antisymmetric() {
            sign_warning = true;
        }
        let n = word.momentum_degree();
        let pn = momentum_power(&mut powers, n, h, hbar);
        for (j, x) in grid.points().enumerate() {
            let f = word.position.eval(&|_| x)?;
            out[j] += c * f * pn[j];
        }
    }
    Ok(Applied { state: GridWavefunction::new(grid, out)?, sign_warning })
}

fn momentum_power(cache: &mut BTreeMap<u32, Vec<Complex64>>, n: u32, h: f64, hbar: f64) -> Vec<Complex64> {
    if let Some(v) = cache.get(&n) {
        return v.clone();
    }
    let v: Vec<Complex64> = if n % 2 == 1 {
        let base = momentum_power(cache, n - 1, h, hbar);
        d1(&base, h).into_iter().map(|z| z * Complex64::new(0.0, -hbar)).collect()
    } else {
        let base = momentum_power(cache, n - 2, h, hbar);
        neg_d2(&base, h).into_iter().map(|z| z * hbar * hbar).collect()
    };
    cache.insert(n, v.clone());
    v
}

/// `<f|op|i>` by trapezoid quadrature.
pub fn matrix_element(f: &GridWavefunction, op: &OperatorExpr, i: &GridWavefunction, b: &Bindings) -> Result<Complex64> {
    if f.grid() != i.grid() {
        return Err(Error::GridMismatch);
    }
    f.inner(&apply_operator(op, i, b)?.state)
}
