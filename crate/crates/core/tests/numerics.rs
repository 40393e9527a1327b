use std::f64::consts::PI;

use num_complex::Complex64;
use twophoton::models::{morse_energy, AxisPotential, Hamiltonian, PotentialModel, MASS};
use twophoton::numerics::ladder::{fock_matrix_element, fock_state};
use twophoton::numerics::{apply_operator, matrix_element, morse_ground_state, Grid1D, GridHamiltonian, Oscillator};
use twophoton::opalg::{rat, Axis, Bindings, Coefficient, Coord, OperatorExpr, HBAR, LIGHT_SPEED};
use twophoton::series::ScatteringOperatorSequence;

fn units() -> Bindings {
    [(HBAR, rat(1, 1)), (LIGHT_SPEED, rat(1, 1)), (MASS, rat(1, 1))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn x() -> Coord {
    Coord::new(0, Axis::X)
}

fn morse_grid(n: usize) -> GridHamiltonian {
    let pot = AxisPotential::Morse { depth: 1.0, width: 1.0 / 3.0, center: 0.0 };
    GridHamiltonian::new(&pot, 1.0, 1.0, Grid1D::new(-10.0, 60.0, n).unwrap()).unwrap()
}

#[test]
fn box_levels_match_n_squared() {
    let h = GridHamiltonian::new(&AxisPotential::Box { half_width: 0.5 }, 1.0, 1.0, Grid1D::symmetric(0.5, 4096).unwrap()).unwrap();
    for p in h.lowest(10).unwrap() {
        let n = (p.index + 1) as f64;
        let exact = n * n * PI * PI / 2.0;
        assert!((p.energy - exact).abs() / exact < 1e-6, "n = {n}: {} vs {exact}", p.energy);
    }
}

#[test]
fn morse_levels_and_ground_state() {
    let lambda = 3.0 * 2f64.sqrt();
    let h = morse_grid(4096);
    let levels = h.lowest(4).unwrap();
    for p in &levels {
        let exact = morse_energy(1.0, lambda, p.index);
        assert!((p.energy - exact).abs() < 1e-6 * exact.abs(), "n = {}: {} vs {exact}", p.index, p.energy);
    }
    let analytic = morse_ground_state(*h.grid(), lambda, 1.0 / 3.0, 0.0).unwrap();
    let overlap = analytic.inner(&levels[0].state).unwrap().norm();
    assert!(overlap >= 1.0 - 1e-8, "overlap {overlap}");
}

#[test]
fn morse_second_operator_on_ground_state() {
    let h = Hamiltonian::new(
        PotentialModel::Morse { depth: Coefficient::int(1), width: rat(1, 3), equilibrium: rat(0, 1), transverse: "free".into() },
        vec![Coefficient::int(1)],
    )
    .unwrap();
    let mut seq = ScatteringOperatorSequence::along(&h, Axis::X).unwrap();
    let o2 = seq.order(2).substitute_parameters(&units()).unwrap();
    let g = *morse_grid(4096).grid();
    let phi = morse_ground_state(g, 3.0 * 2f64.sqrt(), 1.0 / 3.0, 0.0).unwrap();
    let got = apply_operator(&o2, &phi, &units()).unwrap().state;
    let i23 = Complex64::new(0.0, 2.0 / 3.0);
    for (k, xv) in g.points().enumerate().step_by(97) {
        let want = i23 * ((-2.0 * xv / 3.0).exp() - (-xv / 3.0).exp()) * phi.values()[k];
        assert!((got.values()[k] - want).norm() < 1e-12 * (1.0 + want.norm()), "x = {xv}");
    }
}

#[test]
fn box_dipole_element() {
    let h = GridHamiltonian::new(&AxisPotential::Box { half_width: 0.5 }, 1.0, 1.0, Grid1D::symmetric(0.5, 2048).unwrap()).unwrap();
    let s = h.lowest(2).unwrap();
    let p = matrix_element(&s[1].state, &OperatorExpr::momentum(x()), &s[0].state, &units()).unwrap();
    assert!(p.re.abs() < 1e-10);
    assert!((p.im.abs() - 8.0 / 3.0).abs() < 1e-5, "{p}");
}

#[test]
fn ladder_and_grid_elements_agree() {
    let b = units();
    let osc = Oscillator { mass: 1.0, omega: 1.0, center: 0.0 };
    let h = GridHamiltonian::new(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, Grid1D::symmetric(12.0, 3000).unwrap()).unwrap();
    let levels = h.lowest(4).unwrap();
    let ops = [
        OperatorExpr::coordinate(x()),
        OperatorExpr::momentum(x()),
        &OperatorExpr::momentum(x()) * &OperatorExpr::coordinate(x()),
        &OperatorExpr::coordinate(x()) * &OperatorExpr::coordinate(x()),
    ];
    for op in &ops {
        for f in 0..4 {
            for i in 0..4 {
                let ladder = fock_matrix_element(&fock_state(f), op, &fock_state(i), &osc, &b).unwrap();
                let grid = matrix_element(&levels[f].state, op, &levels[i].state, &b).unwrap();
                // grid states carry their own phase convention
                assert!((ladder.norm() - grid.norm()).abs() < 1e-8, "{op:?} <{f}|.|{i}>: {ladder} vs {grid}");
            }
        }
    }
}

#[test]
fn momentum_is_hermitian_on_the_grid() {
    let b = units();
    let h = morse_grid(1024);
    let s = h.lowest(3).unwrap();
    let p = OperatorExpr::momentum(x());
    for f in &s {
        for i in &s {
            let a = matrix_element(&f.state, &p, &i.state, &b).unwrap();
            let c = matrix_element(&i.state, &p, &f.state, &b).unwrap();
            assert!((a - c.conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn refinement_converges_at_fourth_order() {
    let pot = AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 };
    let coarse = Grid1D::symmetric(10.0, 200).unwrap();
    let err = |g: Grid1D| (GridHamiltonian::new(&pot, 1.0, 1.0, g).unwrap().lowest(3).unwrap()[2].energy - 2.5).abs();
    let (e1, e2) = (err(coarse), err(coarse.refined()));
    assert!(e1 / e2 > 10.0, "coarse {e1}, refined {e2}");
}

#[test]
fn morse_rate_limit_is_enforced() {
    let pot = AxisPotential::Morse { depth: 1.0, width: 3.0, center: 0.0 };
    assert!(GridHamiltonian::new(&pot, 1.0, 1.0, Grid1D::new(-10.0, 60.0, 200).unwrap()).is_err());
}
