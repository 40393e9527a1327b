//! Harmonic-oscillator ladder algebra: exact matrix elements of ladder words
//! and a floating-point Fock-space backend for polynomial operators.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::apply::{bound_value, single_coord};
use crate::opalg::{rat_int, Axis, Bindings, Coefficient, OperatorExpr, HBAR};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderOp {
    Lower(Axis),
    Raise(Axis),
    /// `a†_γ = ½(a†(1+γ) + a(1−γ))`
    RaiseGamma(Axis),
    /// `a_γ = ½(a(1+γ) + a†(1−γ))`
    LowerGamma(Axis),
}

/// Sum of ladder words; each word acts right to left.
pub type LadderExpr = Vec<(Coefficient, Vec<LadderOp>)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicBasisState {
    pub n: [u32; 3],
    pub omega: Coefficient,
    pub mass: Coefficient,
}

impl HarmonicBasisState {
    pub fn new(n: [u32; 3], omega: Coefficient, mass: Coefficient) -> Self {
        Self { n, omega, mass }
    }

    pub fn ground(omega: Coefficient, mass: Coefficient) -> Self {
        Self::new([0, 0, 0], omega, mass)
    }
}

/// Exact number `Σ c_r √r` over squarefree radicands `r`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExactValue(BTreeMap<u64, Coefficient>);

fn split_square(n: u64) -> (u64, u64) {
    let (mut outside, mut inside, mut k, mut m) = (1, 1, 2, n);
    while k * k <= m {
        while m % (k * k) == 0 {
            outside *= k;
            m /= k * k;
        }
        if m % k == 0 {
            inside *= k;
            m /= k;
        }
        k += 1;
    }
    (outside, inside * m)
}

impl ExactValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coefficient(c: Coefficient) -> Self {
        let mut v = Self::zero();
        v.add_term(1, c);
        v
    }

    fn add_term(&mut self, radicand: u64, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(radicand).or_default();
        *e += &c;
        if e.is_zero() {
            self.0.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Rational (radicand 1) part when nothing else is present.
    pub fn as_coefficient(&self) -> Option<Coefficient> {
        match self.0.len() {
            0 => Some(Coefficient::zero()),
            1 => self.0.get(&1).cloned(),
            _ => None,
        }
    }

    fn times_sqrt(&self, k: u64) -> Self {
        let mut out = Self::zero();
        for (r, c) in &self.0 {
            let (o, inner) = split_square(r * k);
            out.add_term(inner, c.scale(&rat_int(o as i64)));
        }
        out
    }

    fn scaled(&self, c: &Coefficient) -> Self {
        let mut out = Self::zero();
        for (r, v) in &self.0 {
            out.add_term(*r, v * c);
        }
        out
    }

    fn add(&mut self, o: &ExactValue) {
        for (r, c) in &o.0 {
            self.add_term(*r, c.clone());
        }
    }

    pub fn evaluate(&self, b: &Bindings) -> Result<Complex64> {
        self.0.iter().map(|(r, c)| Ok(c.evaluate(b)? * (*r as f64).sqrt())).sum()
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (r, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *r == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

type ExactState = BTreeMap<[u32; 3], ExactValue>;

fn shift(state: &ExactState, axis: Axis, up: bool) -> ExactState {
    let mut out = ExactState::new();
    let k = axis.index();
    for (n, v) in state {
        let mut m = *n;
        let factor = if up {
            m[k] += 1;
            m[k] as u64
        } else {
            if n[k] == 0 {
                continue;
            }
            m[k] -= 1;
            n[k] as u64
        };
        out.entry(m).or_default().add(&v.times_sqrt(factor));
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn combine(a: ExactState, ca: &Coefficient, b: ExactState, cb: &Coefficient) -> ExactState {
    let mut out = ExactState::new();
    for (n, v) in a {
        out.entry(n).or_default().add(&v.scaled(ca));
    }
    for (n, v) in b {
        out.entry(n).or_default().add(&v.scaled(cb));
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn act(op: LadderOp, state: &ExactState, gamma: &Coefficient) -> ExactState {
    let half = Coefficient::rational(crate::opalg::rat(1, 2));
    let plus = &(&Coefficient::one() + gamma) * &half;
    let minus = &(&Coefficient::one() - gamma) * &half;
    match op {
        LadderOp::Lower(a) => shift(state, a, false),
        LadderOp::Raise(a) => shift(state, a, true),
        LadderOp::RaiseGamma(a) => combine(shift(state, a, true), &plus, shift(state, a, false), &minus),
        LadderOp::LowerGamma(a) => combine(shift(state, a, false), &plus, shift(state, a, true), &minus),
    }
}

/// Exact `<f|expr|i>`; `gamma` may be rational or symbolic.
pub fn ladder_matrix_element(
    f: &HarmonicBasisState,
    expr: &LadderExpr,
    i: &HarmonicBasisState,
    gamma: &Coefficient,
) -> ExactValue {
    let mut total = ExactValue::zero();
    for (c, word) in expr {
        let mut state = ExactState::new();
        state.insert(i.n, ExactValue::from_coefficient(Coefficient::one()));
        for op in word.iter().rev() {
            state = act(*op, &state, gamma);
        }
        if let Some(v) = state.get(&f.n) {
            total.add(&v.scaled(c));
        }
    }
    total
}

/// One-dimensional oscillator used by the Fock backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oscillator {
    pub mass: f64,
    pub omega: f64,
    pub center: f64,
}

/// Number state `|n>` as a dense amplitude vector.
pub fn fock_state(n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

fn lower(v: &[Complex64]) -> Vec<Complex64> {
    (0..v.len().saturating_sub(1)).map(|n| v[n + 1] * ((n + 1) as f64).sqrt()).collect()
}

fn raise(v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len() + 1];
    for (n, c) in v.iter().enumerate() {
        out[n + 1] = c * ((n + 1) as f64).sqrt();
    }
    out
}

fn add_scaled(a: &[Complex64], ca: Complex64, b: &[Complex64], cb: Complex64) -> Vec<Complex64> {
    let len = a.len().max(b.len());
    let z = Complex64::new(0.0, 0.0);
    (0..len).map(|k| ca * a.get(k).copied().unwrap_or(z) + cb * b.get(k).copied().unwrap_or(z)).collect()
}

/// Acts with a polynomial one-coordinate operator using
/// `x = center + sqrt(hbar/2mω)(a + a†)` and `p = i sqrt(m hbar ω/2)(a† − a)`.
pub fn apply_fock(op: &OperatorExpr, state: &[Complex64], osc: &Oscillator, b: &Bindings) -> Result<Vec<Complex64>> {
    single_coord(op)?;
    let hbar = bound_value(b, HBAR)?;
    let lx = (hbar / (2.0 * osc.mass * osc.omega)).sqrt();
    let lp = (osc.mass * hbar * osc.omega / 2.0).sqrt();
    let mut out: Vec<Complex64> = Vec::new();
    for (word, coef) in op.canonicalize().normal_terms() {
        let c = coef.evaluate(b)?;
        let pos = &word.position;
        if !pos.exps.is_empty() || pos.has_sign() || pos.has_abstract() {
            return Err(Error::Unsupported("the Fock backend handles polynomial operators only".into()));
        }
        let mut v = state.to_vec();
        for _ in 0..word.momentum_degree() {
            v = add_scaled(&raise(&v), Complex64::new(0.0, lp), &lower(&v), Complex64::new(0.0, -lp));
        }
        for k in pos.powers.values() {
            for _ in 0..*k {
                let shifted = add_scaled(&raise(&v), Complex64::new(lx, 0.0), &lower(&v), Complex64::new(lx, 0.0));
                v = add_scaled(&shifted, Complex64::new(1.0, 0.0), &v, Complex64::new(osc.center, 0.0));
            }
        }
        out = add_scaled(&out, Complex64::new(1.0, 0.0), &v, c);
    }
    Ok(out)
}

/// `<f|op|i>` in the Fock basis.
pub fn fock_matrix_element(
    f: &[Complex64],
    op: &OperatorExpr,
    i: &[Complex64],
    osc: &Oscillator,
    b: &Bindings,
) -> Result<Complex64> {
    let v = apply_fock(op, i, osc, b)?;
    Ok(f.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
}
