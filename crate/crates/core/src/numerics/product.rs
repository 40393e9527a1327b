use num_complex::Complex64;

use super::apply::apply_operator;
use super::grid::GridWavefunction;
use super::ladder::{fock_matrix_element, Oscillator};
use crate::opalg::{Axis, Bindings, Coefficient, OperatorExpr};
use crate::{Error, Result};

/// State of one Cartesian axis of a single particle.
#[derive(Clone, Debug)]
pub enum AxisState {
    Grid(GridWavefunction),
    Fock { amplitudes: Vec<Complex64>, oscillator: Oscillator },
    /// Axis left out of the dynamics: unit overlap, no dipole matrix elements.
    Spectator,
}

/// Single-particle separable state `ψ_x ψ_y ψ_z`.
#[derive(Clone, Debug)]
pub struct ProductState {
    pub axes: [AxisState; 3],
}

/// Matrix element with the principal-value caveat flag.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Element {
    pub value: Complex64,
    pub sign_warning: bool,
}

impl ProductState {
    pub fn new(axes: [AxisState; 3]) -> Self {
        Self { axes }
    }

    pub fn axis(&self, a: Axis) -> &AxisState {
        &self.axes[a.index()]
    }
}

/// Splits each canonical term into one operator per axis of particle 0.
pub fn split_by_axis(op: &OperatorExpr) -> Result<Vec<(Coefficient, [OperatorExpr; 3])>> {
    op.canonicalize()
        .normal_terms()
        .into_iter()
        .map(|(word, coef)| {
            let mut parts = [OperatorExpr::identity(), OperatorExpr::identity(), OperatorExpr::identity()];
            for f in word.position.factors() {
                let coords: Vec<_> = f.form.coords().map(|(c, _)| *c).collect();
                let c = match coords.as_slice() {
                    [c] if c.particle == 0 => *c,
                    _ => return Err(Error::Unsupported("position factor does not act on a single axis of particle 0".into())),
                };
                let k = c.axis.index();
                parts[k] = &parts[k] * &OperatorExpr::position(f);
            }
            for (c, n) in &word.momenta {
                if c.particle != 0 {
                    return Err(Error::Unsupported("product states describe a single particle".into()));
                }
                let k = c.axis.index();
                for _ in 0..*n {
                    parts[k] = &parts[k] * &OperatorExpr::momentum(*c);
                }
            }
            Ok((coef, parts))
        })
        .collect()
}

fn axis_element(f: &AxisState, op: &OperatorExpr, i: &AxisState, b: &Bindings) -> Result<Element> {
    match (f, i) {
        (AxisState::Grid(f), AxisState::Grid(i)) => {
            let applied = apply_operator(op, i, b)?;
            Ok(Element { value: f.inner(&applied.state)?, sign_warning: applied.sign_warning })
        }
        (AxisState::Fock { amplitudes: fa, oscillator }, AxisState::Fock { amplitudes: ia, oscillator: o2 }) => {
            if oscillator != o2 {
                return Err(Error::Unsupported("Fock states of different oscillators".into()));
            }
            Ok(Element { value: fock_matrix_element(fa, op, ia, oscillator, b)?, sign_warning: false })
        }
        (AxisState::Spectator, AxisState::Spectator) => {
            let op = op.canonicalize();
            if op.is_zero() {
                return Ok(Element::default());
            }
            let terms = op.normal_terms();
            if terms.iter().all(|(w, _)| w.position.is_one() && w.momentum_degree() == 0) {
                let v: Complex64 = terms.iter().map(|(_, c)| c.evaluate(b)).sum::<Result<Complex64>>()?;
                Ok(Element { value: v, sign_warning: false })
            } else if terms.iter().all(|(w, _)| w.position.is_one() && w.momentum_degree() == 1) {
                Ok(Element::default())
            } else {
                Err(Error::Unsupported("spectator axes only support the identity and a single momentum".into()))
            }
        }
        _ => Err(Error::Unsupported("initial and final states use different backends on one axis".into())),
    }
}

/// `<f|op|i>` for an operator whose factors each act on one axis.
pub fn product_matrix_element(f: &ProductState, op: &OperatorExpr, i: &ProductState, b: &Bindings) -> Result<Element> {
    let mut out = Element::default();
    for (coef, parts) in split_by_axis(op)? {
        let mut v = coef.evaluate(b)?;
        for k in 0..3 {
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
            let e = axis_element(&f.axes[k], &parts[k], &i.axes[k], b)?;
            v *= e.value;
            out.sign_warning |= e.sign_warning;
        }
        out.value += v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ladder::fock_state;
    use crate::opalg::{rat, Coord, HBAR};

    #[test]
    fn factorized_element() {
        let b: Bindings = [(HBAR.to_string(), rat(1, 1))].into_iter().collect();
        let osc = Oscillator { mass: 1.0, omega: 1.0, center: 0.0 };
        let fock = |n| AxisState::Fock { amplitudes: fock_state(n), oscillator: osc };
        let i = ProductState::new([fock(0), fock(0), AxisState::Spectator]);
        let f = ProductState::new([fock(1), fock(1), AxisState::Spectator]);
        let x = Coord::new(0, Axis::X);
        let y = Coord::new(0, Axis::Y);
        let op = &OperatorExpr::coordinate(x) * &OperatorExpr::momentum(y);
        let e = product_matrix_element(&f, &op, &i, &b).unwrap();
        // <1|x|0> <1|p|0> = sqrt(1/2) * i sqrt(1/2)
        assert!((e.value - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        let z = OperatorExpr::momentum(Coord::new(0, Axis::Z));
        assert_eq!(product_matrix_element(&i, &z, &i, &b).unwrap().value, Complex64::new(0.0, 0.0));
    }
}
