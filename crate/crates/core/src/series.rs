//! Nested commutators `O_{k+1} = [H0, O_k]`, transition operators and the
//! harmonic closed form.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::models::{dipole_seed, Hamiltonian};
use crate::opalg::{
    rat, rat_int, Axis, Bindings, Coefficient, Coord, GaussRational, NormalWord, OperatorExpr,
    PositionFactor, Powers, Rational, HBAR, LIGHT_SPEED,
};
use crate::{Error, Result};

/// Memoised `O_1, O_2, ...` for one Hamiltonian and one seed.
#[derive(Clone, Debug)]
pub struct ScatteringOperatorSequence {
    h0: OperatorExpr,
    ops: Vec<OperatorExpr>,
    terminal: bool,
    zero: OperatorExpr,
}

impl ScatteringOperatorSequence {
    pub fn new(h: &Hamiltonian, seed: OperatorExpr) -> Result<Self> {
        let h0 = h.operator()?.clone();
        let seed = seed.canonicalize();
        let terminal = seed.is_zero();
        let ops = if terminal { Vec::new() } else { vec![seed] };
        Ok(Self { h0, ops, terminal, zero: OperatorExpr::zero() })
    }

    /// Sequence seeded by `-c sum_t p_{t,axis}`.
    pub fn along(h: &Hamiltonian, axis: Axis) -> Result<Self> {
        Self::new(h, dipole_seed(axis, h.particle_count()))
    }

    fn extend_to(&mut self, k: usize) {
        while !self.terminal && self.ops.len() < k {
            let next = self.h0.commutator(self.ops.last().expect("non-terminal sequences are non-empty"));
            if next.is_zero() {
                self.terminal = true;
            } else {
                self.ops.push(next);
            }
        }
    }

    /// `O_k` for `k >= 1`.
    pub fn order(&mut self, k: usize) -> &OperatorExpr {
        assert!(k >= 1, "orders start at 1");
        self.extend_to(k);
        self.ops.get(k - 1).unwrap_or(&self.zero)
    }

    /// `O_1..O_n`, padded with zeros past a terminal order.
    pub fn first(&mut self, n: usize) -> Vec<OperatorExpr> {
        (1..=n).map(|k| self.order(k).clone()).collect()
    }

    /// True once some computed `O_k` vanished.
    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Number of nonzero operators computed so far.
    pub fn computed(&self) -> usize {
        self.ops.len()
    }

    pub fn hamiltonian(&self) -> &OperatorExpr {
        &self.h0
    }
}

/// `O_k` along `axis`.
pub fn scattering_operator(h: &Hamiltonian, axis: Axis, k: usize) -> Result<OperatorExpr> {
    if k == 0 {
        return Err(Error::Domain("scattering operators start at order 1".into()));
    }
    Ok(ScatteringOperatorSequence::along(h, axis)?.order(k).clone())
}

/// `lambda` with `O_3 = lambda O_1`, when it exists.
pub fn detect_double_commutator_closure(h: &Hamiltonian, axis: Axis) -> Result<Option<Coefficient>> {
    let mut seq = ScatteringOperatorSequence::along(h, axis)?;
    closure_of(&mut seq)
}

pub fn closure_of(seq: &mut ScatteringOperatorSequence) -> Result<Option<Coefficient>> {
    let o1 = seq.order(1).clone();
    let o3 = seq.order(3).clone();
    let Some((w, c1)) = o1.normal_terms().into_iter().next() else {
        return Ok(None);
    };
    let Some(inv) = c1.inverse() else {
        return Ok(None);
    };
    let lambda = &o3.coefficient_of(&w) * &inv;
    if o3.equal(&o1.scale(&lambda)) {
        Ok(Some(lambda))
    } else {
        Ok(None)
    }
}

/// `T` as energy-weighted operators, so that `E1 -> -E2` is a rebinding.
#[derive(Clone, Debug)]
pub enum TransitionOperator {
    /// `T_n = sum_{k=1..n} O_k / E^k`, stored as `(O_k, k)`.
    Truncated { terms: Vec<(OperatorExpr, u32)> },
    /// `(E^2 - lambda) T = E O_1 + O_2`.
    ClosedFormHarmonic { lambda: Coefficient, o1: OperatorExpr, o2: OperatorExpr },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesMode {
    Truncated(usize),
    Exact,
}

/// Builds `T` for incident energy `e1` (only checked for positivity; `T`
/// keeps the energy symbolic).
pub fn transition_operator(seq: &mut ScatteringOperatorSequence, e1: f64, mode: SeriesMode) -> Result<TransitionOperator> {
    if !(e1 > 0.0) {
        return Err(Error::Domain(format!("incident energy must be positive, got {e1}")));
    }
    match mode {
        SeriesMode::Truncated(n) => {
            if n == 0 {
                return Err(Error::Domain("series order must be at least 1".into()));
            }
            let terms = (1..=n).map(|k| (seq.order(k).clone(), k as u32)).collect();
            Ok(TransitionOperator::Truncated { terms })
        }
        SeriesMode::Exact => match closure_of(seq)? {
            Some(lambda) => Ok(TransitionOperator::ClosedFormHarmonic {
                lambda,
                o1: seq.order(1).clone(),
                o2: seq.order(2).clone(),
            }),
            None => Err(Error::Unsupported(
                "double commutator does not close; exact mode needs a harmonic-family Hamiltonian".into(),
            )),
        },
    }
}

impl TransitionOperator {
    /// `(O_k, k)` for `k = 1..n`; the closed form is expanded as a geometric series.
    pub fn terms_up_to(&self, n: usize) -> Vec<(OperatorExpr, u32)> {
        match self {
            TransitionOperator::Truncated { terms } => {
                let mut out: Vec<_> = terms.iter().filter(|(_, k)| (*k as usize) <= n).cloned().collect();
                for k in out.len() + 1..=n {
                    out.push((OperatorExpr::zero(), k as u32));
                }
                out
            }
            TransitionOperator::ClosedFormHarmonic { lambda, o1, o2 } => {
                let mut out = Vec::with_capacity(n);
                let mut pow = Coefficient::one();
                for k in 1..=n {
                    let base = if k % 2 == 1 { o1 } else { o2 };
                    out.push((base.scale(&pow), k as u32));
                    if k % 2 == 0 {
                        pow = &pow * lambda;
                    }
                }
                out
            }
        }
    }

    /// Operators that appear in `T`, without energy weights.
    pub fn operators(&self) -> Vec<OperatorExpr> {
        match self {
            TransitionOperator::Truncated { terms } => terms.iter().map(|(o, _)| o.clone()).collect(),
            TransitionOperator::ClosedFormHarmonic { o1, o2, .. } => vec![o1.clone(), o2.clone()],
        }
    }

    /// Exact `T` at energy `e` with every parameter bound.
    pub fn at_energy(&self, e: &Rational, bindings: &Bindings) -> Result<OperatorExpr> {
        if e.is_zero() {
            return Err(Error::Resonance("transition operator has a pole at zero energy".into()));
        }
        let ec = Coefficient::rational(e.clone());
        match self {
            TransitionOperator::Truncated { terms } => {
                let mut out = OperatorExpr::zero();
                for (o, k) in terms {
                    let w = ec.inverse().expect("nonzero constant").powi_pos(*k);
                    out = &out + &o.substitute_parameters(bindings)?.scale(&w);
                }
                Ok(out)
            }
            TransitionOperator::ClosedFormHarmonic { lambda, o1, o2 } => {
                let l = lambda
                    .substitute(bindings)?
                    .as_constant()
                    .ok_or_else(|| Error::UnboundParameter(format!("closure constant {lambda}")))?;
                let den = &GaussRational::real(e * e) - &l;
                let inv = den
                    .inv()
                    .ok_or_else(|| Error::Resonance(format!("closed-form pole at E = {e}")))?;
                let num = &o1.substitute_parameters(bindings)?.scale(&ec) + &o2.substitute_parameters(bindings)?;
                Ok(num.scale(&Coefficient::constant(inv)))
            }
        }
    }
}

trait PowPos {
    fn powi_pos(&self, k: u32) -> Coefficient;
}

impl PowPos for Coefficient {
    fn powi_pos(&self, k: u32) -> Coefficient {
        (0..k).fold(Coefficient::one(), |acc, _| &acc * self)
    }
}

/// `sqrt(2 m c^2 / (hbar omega)) * sqrt(m omega / (2 hbar))`, squared.
pub fn ladder_prefactor_squared(omega: &Coefficient, mass: &Coefficient) -> Result<Coefficient> {
    let inv = |c: &Coefficient| c.inverse().ok_or_else(|| Error::InvalidModel(format!("{c} is not invertible")));
    let hbar = Coefficient::param(HBAR);
    let c = Coefficient::param(LIGHT_SPEED);
    let first = &(&(&Coefficient::int(2) * mass) * &(&c * &c)) * &inv(&(&hbar * omega))?;
    let second = &(mass * omega) * &inv(&(&Coefficient::int(2) * &hbar))?;
    Ok(&first * &second)
}

/// Right-hand side of `(E^2 - hbar^2 omega^2) T` written with the perturbed
/// creation operator along `axis`:
/// `-i hbar^2 omega^2 K (q - i E p / (hbar m omega^2))` with `K = m c / hbar`.
pub fn perturbed_creation_numerator(energy: &Coefficient, omega: &Coefficient, mass: &Coefficient, axis: Axis) -> Result<OperatorExpr> {
    let hbar = Coefficient::param(HBAR);
    let k = &(mass * &Coefficient::param(LIGHT_SPEED)) * &hbar.inverse().expect("monomial");
    let lambda = &(&hbar * &hbar) * &(omega * omega);
    let front = &(&-&Coefficient::i() * &lambda) * &k;
    let inv = (&(&hbar * mass) * &(omega * omega))
        .inverse()
        .ok_or_else(|| Error::InvalidModel("omega and mass must be monomials".into()))?;
    let q = OperatorExpr::coordinate(Coord::new(0, axis));
    let p = OperatorExpr::momentum(Coord::new(0, axis));
    let inner = &q - &p.scale(&(&(&Coefficient::i() * energy) * &inv));
    Ok(inner.scale(&front))
}

/// True iff two equal-mass particles give `O_2 = 0`.
pub fn reciprocal_cancellation_check(h: &Hamiltonian, axis: Axis) -> Result<bool> {
    let m = h.masses();
    if m.len() != 2 || m[0] != m[1] {
        return Ok(false);
    }
    Ok(scattering_operator(h, axis, 2)?.is_zero())
}

/// Whether `O_k` changes when the coupling is removed, for `k = 1..n`.
pub fn coupling_contributions(with: &Hamiltonian, without: &Hamiltonian, axis: Axis, n: usize) -> Result<Vec<bool>> {
    let mut a = ScatteringOperatorSequence::along(with, axis)?;
    let mut b = ScatteringOperatorSequence::along(without, axis)?;
    Ok((1..=n).map(|k| !a.order(k).equal(b.order(k))).collect())
}

/// True iff every `O_k` only involves coordinates along `axis`.
pub fn confined_to_axis(ops: &[OperatorExpr], axis: Axis) -> bool {
    ops.iter().all(|o| o.coords().iter().all(|c| c.axis == axis))
}

fn add_into(map: &mut BTreeMap<NormalWord, Coefficient>, w: NormalWord, c: Coefficient) {
    let e = map.entry(w.clone()).or_default();
    *e += &c;
    if e.is_zero() {
        map.remove(&w);
    }
}

/// Relative-motion content of a two-particle operator: the standard-ordered
/// symbol differentiated by `d/dq_A - d/dq_B` and `d/dp_A - d/dp_B`.
fn relative_derivatives(e: &OperatorExpr) -> BTreeMap<NormalWord, Coefficient> {
    let mut out = BTreeMap::new();
    for (w, c) in e.normal_terms() {
        for axis in Axis::ALL {
            for (t, sign) in [(0usize, 1i64), (1, -1)] {
                let q = Coord::new(t, axis);
                for (r, m) in w.position.derivative(q) {
                    let nw = NormalWord { position: m, momenta: w.momenta.clone() };
                    add_into(&mut out, nw, c.scale(&(r * rat_int(sign))));
                }
                if let Some(&n) = w.momenta.get(&q) {
                    let mut momenta = w.momenta.clone();
                    if n == 1 {
                        momenta.remove(&q);
                    } else {
                        momenta.insert(q, n - 1);
                    }
                    // tag momentum derivatives apart from position ones
                    let nw = NormalWord { position: w.position.mul(&marker(axis)), momenta };
                    add_into(&mut out, nw, c.scale(&rat_int(sign * n as i64)));
                }
            }
        }
    }
    out
}

fn marker(axis: Axis) -> crate::opalg::PositionMonomial {
    let f = PositionFactor::func(&format!("__dp_{}", axis.name()), crate::opalg::LinearForm::constant(Rational::zero()));
    f.to_monomials().remove(0).1
}

/// True iff the operator depends on two particles only through
/// `q_A + q_B` and `p_A + p_B`. Single-particle operators pass trivially.
pub fn expr_center_of_mass_only(e: &OperatorExpr) -> bool {
    if e.coords().iter().all(|c| c.particle == 0) {
        return true;
    }
    if e.coords().iter().any(|c| c.particle > 1) {
        return false;
    }
    relative_derivatives(e).is_empty()
}

pub fn center_of_mass_content(t: &TransitionOperator) -> bool {
    t.operators().iter().all(expr_center_of_mass_only)
}

/// Rewrites a center-of-mass-only pair operator as a one-particle operator
/// in `R = (q_A + q_B)/2` and `P = p_A + p_B` (so `[R, P] = i hbar`).
/// Only polynomial position dependence is supported.
pub fn reduce_to_center_of_mass(e: &OperatorExpr) -> Result<OperatorExpr> {
    if !expr_center_of_mass_only(e) {
        return Err(Error::Unsupported("operator has relative-coordinate content".into()));
    }
    let mut out = OperatorExpr::zero();
    for (w, c) in e.normal_terms() {
        let pos = &w.position;
        if pos.has_sign() || pos.has_abstract() || !pos.factors().iter().all(|f| matches!(f.kind, crate::opalg::FactorKind::Polynomial(_))) {
            return Err(Error::Unsupported("center-of-mass reduction needs polynomial factors".into()));
        }
        // the symbol is g(q_A + q_B, p_A + p_B); evaluate it at q_B = p_B = 0
        if w.coords().iter().any(|q| q.particle == 1) {
            continue;
        }
        let mut term = OperatorExpr::scalar(c.clone());
        for f in pos.factors() {
            let crate::opalg::FactorKind::Polynomial(coeffs) = &f.kind else { unreachable!() };
            let (q, _) = f.form.coords().next().map(|(q, r)| (*q, r.clone())).expect("non-constant factor");
            let k = (coeffs.len() - 1) as u32;
            // q_A = 2R
            let scale = Coefficient::rational(rat(2, 1)).powi_pos(k);
            term = &term * &OperatorExpr::position(PositionFactor::power(q, k)).scale(&scale);
        }
        for (q, n) in &w.momenta {
            for _ in 0..*n {
                term = &term * &OperatorExpr::momentum(*q);
            }
        }
        out = &out + &term;
    }
    Ok(out)
}

/// `hbar^2 omega^2`
pub fn harmonic_lambda(omega: &Coefficient) -> Coefficient {
    &Coefficient::monomial(GaussRational::one(), Powers::single(HBAR, 2)) * &(omega * omega)
}
