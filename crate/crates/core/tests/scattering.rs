use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twophoton::models::{AxisPotential, Hamiltonian, PotentialModel, MASS};
use twophoton::numerics::ladder::fock_state;
use twophoton::numerics::{product_matrix_element, AxisState, Grid1D, GridHamiltonian, Oscillator, ProductState};
use twophoton::opalg::{rat, Axis, Bindings, Coefficient, Coord, OperatorExpr, HBAR, LIGHT_SPEED};
use twophoton::oracle::{resolvent_state, AxisOracle, OracleMethod, SeparableOracle};
use twophoton::scattering::{
    differential_cross_section, fit_energy_law, harmonic_rayleigh_closed, ClosedFormAmplitude, EnergyLawFit, LawOrder,
    PhotonPair, ScatteringGeometry, SeriesAmplitude,
};
use twophoton::Error;

type C = Complex64;

fn units() -> Bindings {
    [(HBAR, rat(1, 1)), (LIGHT_SPEED, rat(1, 1)), (MASS, rat(1, 1))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn harmonic() -> Hamiltonian {
    Hamiltonian::new(
        PotentialModel::Harmonic { omega: Coefficient::int(1), displacement: [Coefficient::zero(), Coefficient::zero(), Coefficient::zero()] },
        vec![Coefficient::int(1)],
    )
    .unwrap()
}

fn fock_ground() -> ProductState {
    let osc = Oscillator { mass: 1.0, omega: 1.0, center: 0.0 };
    ProductState::new([0, 0, 0].map(|n| AxisState::Fock { amplitudes: fock_state(n), oscillator: osc }))
}

#[test]
fn closed_form_examples() {
    let g = ScatteringGeometry::new(0.4, 0.2, 0.9).unwrap();
    let m = harmonic_rayleigh_closed(SQRT_2, 1.0, &g).unwrap();
    assert!((m.re - 2.0 * g.eps_dot()).abs() < 1e-12);
    assert!(harmonic_rayleigh_closed(1e-4, 1.0, &g).unwrap().norm() < 1e-7);
    assert!(matches!(harmonic_rayleigh_closed(1.0, 1.0, &g), Err(Error::Resonance(_))));
    assert!(harmonic_rayleigh_closed(-1.0, 1.0, &g).is_err());
}

#[test]
fn closed_form_pipeline_matches_formula() {
    let b = units();
    let s = fock_ground();
    let elem = |op: &OperatorExpr| product_matrix_element(&s, op, &s, &b);
    let cf = ClosedFormAmplitude::new(&harmonic(), &Axis::ALL, &b, &elem).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for _ in 0..20 {
        let e = rng.gen_range(0.05..8.0);
        if (e - 1.0f64).abs() < 1e-3 {
            continue;
        }
        let g = ScatteringGeometry::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)).unwrap();
        let got = cf.breakdown(&g, &PhotonPair::elastic(e).unwrap(), 0.0).unwrap().total;
        let want = harmonic_rayleigh_closed(e, 1.0, &g).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "E = {e}");
    }
}

#[test]
fn cross_section_examples() {
    let el = PhotonPair::elastic(2.0).unwrap();
    assert_eq!(differential_cross_section(C::new(1.0, 0.0), &el, 1.0), 1.0);
    assert_eq!(differential_cross_section(C::new(0.0, 0.0), &el, 1.0), 0.0);
    let raman = PhotonPair::new(4.0, 1.0).unwrap();
    assert!((differential_cross_section(C::new(0.0, 2.0), &raman, 1.0) - 0.75 * 4.0).abs() < 1e-15);
}

fn box_channel(f: [usize; 3]) -> (SeriesAmplitude, f64) {
    let b = units();
    let h = GridHamiltonian::new(&AxisPotential::Box { half_width: 0.5 }, 1.0, 1.0, Grid1D::symmetric(0.5, 600).unwrap()).unwrap();
    let lv = h.lowest(3).unwrap();
    let st = |q: [usize; 3]| ProductState::new(q.map(|n| AxisState::Grid(lv[n].state.clone())));
    let (fs, is) = (st(f), st([0, 0, 0]));
    let elem = |op: &OperatorExpr| product_matrix_element(&fs, op, &is, &b);
    let model = Hamiltonian::new(PotentialModel::ConstantBox { size: [rat(1, 1), rat(1, 1), rat(1, 1)] }, vec![Coefficient::int(1)]).unwrap();
    let e_res: f64 = (0..3).map(|k| lv[f[k]].energy - lv[0].energy).sum();
    (SeriesAmplitude::new(&model, 4, &Axis::ALL, &b, &elem).unwrap(), e_res)
}

#[test]
fn box_partials_are_constant_beyond_first_order() {
    let (s, e_res) = box_channel([1, 1, 0]);
    let g = ScatteringGeometry::new(PI / 2.0, 0.0, PI / 2.0).unwrap();
    let br = s.breakdown(&g, &PhotonPair::new(3.0 * e_res, e_res).unwrap(), 0.0).unwrap();
    assert!(br.partials[1].norm() > 1e-3);
    for n in 2..=4 {
        assert_eq!(br.partials[n], br.partials[1]);
    }
}

#[test]
fn raman_first_order_follows_reciprocal_difference() {
    let (s, e_res) = box_channel([1, 1, 0]);
    let g = ScatteringGeometry::new(PI / 2.0, 0.0, PI / 2.0).unwrap();
    let m = |e1: f64| {
        let p = PhotonPair::new(e1, e_res).unwrap();
        let br = s.breakdown(&g, &p, 0.0).unwrap();
        (br.total - br.thomson) / (1.0 / p.e2 - 1.0 / p.e1)
    };
    let c = m(2.0 * e_res);
    for e1 in [1.5 * e_res, 5.0 * e_res, 40.0 * e_res] {
        assert!((m(e1) - c).norm() < 1e-10 * c.norm());
    }
    // E2 -> E1 continuously: same matrix elements at vanishing energy transfer
    let terms = s.order_terms(&g, &PhotonPair { e1: 7.0, e2: 7.0 }, 0.0).unwrap();
    assert!((terms[0].0 + terms[0].1).norm() < 1e-12);
}

#[test]
fn fit_recovers_synthetic_coefficients() {
    let truth = EnergyLawFit { c1: 2.0, c2: -0.7, residual: 0.0, window: (0.0, 0.0) };
    let e_res = 1.5;
    let samples: Vec<(f64, f64)> = (0..40).map(|k| 2.0 + 0.5 * k as f64).map(|e| (e, truth.model(e, e_res))).collect();
    let fit = fit_energy_law(&samples, e_res, LawOrder::Second).unwrap();
    assert!((fit.c1.abs() - 2.0).abs() < 1e-8, "{fit:?}");
    assert!((fit.c2 / fit.c1 + 0.35).abs() < 1e-8, "{fit:?}");
    assert!(fit.residual < 1e-10);
    assert!(fit_energy_law(&samples[..5], e_res, LawOrder::First).is_err());
    assert!(fit_energy_law(&[(1.0, 1.0); 10], e_res, LawOrder::First).is_err());
}

#[test]
fn harmonic_oracle_selects_first_excited_state() {
    let b = units();
    let h = GridHamiltonian::new(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, Grid1D::symmetric(10.0, 600).unwrap()).unwrap();
    let ax = AxisOracle::with_full_basis(h).unwrap();
    let ground = ax.basis[0].state.clone();
    let p = OperatorExpr::momentum(Coord::new(0, Axis::X));
    let pg = twophoton::numerics::apply_operator(&p, &ground, &b).unwrap().state;
    let weights: Vec<f64> = ax.basis.iter().map(|nu| nu.state.inner(&pg).unwrap().norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    assert!(weights[1] / total > 1.0 - 1e-8);

    let s = ProductState::new([AxisState::Grid(ground.clone()), AxisState::Spectator, AxisState::Spectator]);
    let oracle = SeparableOracle::new([Some(ax.clone()), None, None], 1.0, b.clone()).unwrap();
    let g = ScatteringGeometry::forward_x();
    for e in [0.4, 2.5] {
        let (m, _) = oracle.breakdown(&s, &s, &g, &PhotonPair::elastic(e).unwrap(), OracleMethod::SumOverStates).unwrap();
        let want = harmonic_rayleigh_closed(e, 1.0, &g).unwrap();
        assert!((m.total - want).norm() < 1e-6 * want.norm());
    }
}

#[test]
fn resolvent_state_reproduces_sum_over_states() {
    let b = units();
    let pot = AxisPotential::Morse { depth: 1.0, width: 1.0 / 3.0, center: 0.0 };
    let h = GridHamiltonian::new(&pot, 1.0, 1.0, Grid1D::new(-8.0, 40.0, 500).unwrap()).unwrap();
    let ax = AxisOracle::with_full_basis(h).unwrap();
    let ground = ax.basis[0].state.clone();
    let e1 = 3.3;
    let sres = resolvent_state(&ax, Axis::X, &ground, e1, 1.0, &b, 1e-6).unwrap();
    let p = OperatorExpr::momentum(Coord::new(0, Axis::X));
    let pf = twophoton::numerics::apply_operator(&p, &ground, &b).unwrap().state;
    let via_state = pf.inner(&sres).unwrap();
    let s = ProductState::new([AxisState::Grid(ground), AxisState::Spectator, AxisState::Spectator]);
    let oracle = SeparableOracle::new([Some(ax), None, None], 1.0, b).unwrap();
    let sos = oracle.second_order(&s, &s, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], e1, OracleMethod::SumOverStates).unwrap().value;
    assert!((via_state - sos).norm() < 1e-8 * sos.norm(), "{via_state} vs {sos}");
}

#[test]
fn resonance_is_reported_not_hidden() {
    let b = units();
    let h = GridHamiltonian::new(&AxisPotential::Harmonic { stiffness: 1.0, center: 0.0 }, 1.0, 1.0, Grid1D::symmetric(10.0, 400).unwrap()).unwrap();
    let ax = AxisOracle::with_full_basis(h).unwrap();
    let gap = ax.basis[1].energy - ax.basis[0].energy;
    let s = ProductState::new([AxisState::Grid(ax.basis[0].state.clone()), AxisState::Spectator, AxisState::Spectator]);
    let oracle = SeparableOracle::new([Some(ax), None, None], 1.0, b).unwrap();
    let g = ScatteringGeometry::forward_x();
    for method in [OracleMethod::SumOverStates, OracleMethod::Resolvent] {
        let r = oracle.breakdown(&s, &s, &g, &PhotonPair::elastic(gap).unwrap(), method);
        assert!(matches!(r, Err(Error::Resonance(_))), "{method:?}");
    }
}

#[test]
fn series_rejects_unseeded_polarization() {
    let b = units();
    let s = fock_ground();
    let elem = |op: &OperatorExpr| product_matrix_element(&s, op, &s, &b);
    let series = SeriesAmplitude::new(&harmonic(), 2, &[Axis::X], &b, &elem).unwrap();
    let g = ScatteringGeometry::new(0.0, PI / 4.0, 0.0).unwrap();
    assert!(matches!(series.breakdown(&g, &PhotonPair::elastic(2.0).unwrap(), 0.0), Err(Error::Unsupported(_))));
}
