//! Operator words, sums of words, and their canonical (positions-left,
//! momenta-right) normal form.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::binomial;
use num_traits::{One, Zero};

use super::factor::{Coord, PositionFactor, PositionMonomial};
use super::scalar::{rat_int, Bindings, Coefficient, GaussRational, Powers, Rational, HBAR};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Position(PositionFactor),
    Momentum(Coord),
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Position(p) => write!(f, "{p}"),
            Primitive::Momentum(c) => write!(f, "p_{c}"),
        }
    }
}

/// A coefficient times an ordered product of primitives.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTerm {
    pub coefficient: Coefficient,
    pub word: Vec<Primitive>,
}

impl OperatorTerm {
    pub fn new(coefficient: Coefficient, word: Vec<Primitive>) -> Self {
        Self { coefficient, word }
    }
}

/// Canonical word: a position monomial followed by a product of momentum
/// powers sorted by coordinate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord {
    pub position: PositionMonomial,
    pub momenta: BTreeMap<Coord, u32>,
}

impl NormalWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn momentum_degree(&self) -> u32 {
        self.momenta.values().sum()
    }

    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = self.position.coords();
        out.extend(self.momenta.keys().copied());
        out
    }

    pub fn to_word(&self) -> Vec<Primitive> {
        let mut word: Vec<Primitive> =
            self.position.factors().into_iter().map(Primitive::Position).collect();
        for (c, n) in &self.momenta {
            for _ in 0..*n {
                word.push(Primitive::Momentum(*c));
            }
        }
        word
    }
}

type NormalMap = BTreeMap<NormalWord, Coefficient>;

#[derive(Clone, Debug)]
enum Repr {
    Raw(Vec<OperatorTerm>),
    Canonical(NormalMap),
}

/// Sum of operator terms with exact coefficients.
///
/// Arithmetic always returns canonical expressions. Raw expressions built
/// from explicit words keep their words until [`OperatorExpr::canonicalize`].
#[derive(Clone, Debug)]
pub struct OperatorExpr {
    repr: Repr,
}

fn add_into(map: &mut NormalMap, w: NormalWord, c: Coefficient) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&w) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                map.remove(&w);
            }
        }
        None => {
            map.insert(w, c);
        }
    }
}

/// `(-i hbar)^k`
fn minus_i_hbar_pow(k: u32) -> Coefficient {
    let unit = match k % 4 {
        0 => GaussRational::one(),
        1 => -&GaussRational::i(),
        2 => GaussRational::from_int(-1),
        _ => GaussRational::i(),
    };
    Coefficient::monomial(unit, Powers::single(HBAR, k as i32))
}

/// Product of two canonical words, moving the momenta of `a` through the
/// position part of `b` with `p^n f = sum_j C(n,j) (-i hbar)^j f^(j) p^(n-j)`.
fn word_product(a: &NormalWord, b: &NormalWord) -> Vec<(Coefficient, NormalWord)> {
    struct Partial {
        factor: Rational,
        hbar: u32,
        pos: PositionMonomial,
        rest: BTreeMap<Coord, u32>,
    }
    let mut partial = vec![Partial {
        factor: Rational::one(),
        hbar: 0,
        pos: b.position.clone(),
        rest: BTreeMap::new(),
    }];
    for (&coord, &n) in &a.momenta {
        let mut next = Vec::new();
        for p in partial {
            if !p.pos.depends_on(coord) {
                let mut rest = p.rest;
                *rest.entry(coord).or_insert(0) += n;
                next.push(Partial { rest, ..p });
                continue;
            }
            let mut ders: BTreeMap<PositionMonomial, Rational> =
                [(p.pos.clone(), Rational::one())].into_iter().collect();
            for j in 0..=n {
                if j > 0 {
                    let mut d: BTreeMap<PositionMonomial, Rational> = BTreeMap::new();
                    for (m, r) in &ders {
                        for (rd, md) in m.derivative(coord) {
                            let e = d.entry(md).or_insert_with(Rational::zero);
                            *e += r * rd;
                        }
                    }
                    d.retain(|_, v| !v.is_zero());
                    ders = d;
                }
                if ders.is_empty() {
                    break;
                }
                let binom = rat_int(binomial(n as i64, j as i64));
                for (m, r) in &ders {
                    let mut rest = p.rest.clone();
                    if n - j > 0 {
                        *rest.entry(coord).or_insert(0) += n - j;
                    }
                    next.push(Partial {
                        factor: &p.factor * &binom * r,
                        hbar: p.hbar + j,
                        pos: m.clone(),
                        rest,
                    });
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|p| {
            let mut momenta = p.rest;
            for (c, n) in &b.momenta {
                *momenta.entry(*c).or_insert(0) += n;
            }
            let word = NormalWord { position: a.position.mul(&p.pos), momenta };
            (minus_i_hbar_pow(p.hbar).scale(&p.factor), word)
        })
        .collect()
}

fn mul_maps(a: &NormalMap, b: &NormalMap) -> NormalMap {
    let mut out = NormalMap::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let cab = ca * cb;
            for (c, w) in word_product(wa, wb) {
                add_into(&mut out, w, &cab * &c);
            }
        }
    }
    out
}

fn primitive_map(p: &Primitive) -> NormalMap {
    let mut out = NormalMap::new();
    match p {
        Primitive::Momentum(c) => {
            let w = NormalWord { position: PositionMonomial::one(), momenta: [(*c, 1)].into_iter().collect() };
            out.insert(w, Coefficient::one());
        }
        Primitive::Position(f) => {
            for (r, m) in f.to_monomials() {
                add_into(
                    &mut out,
                    NormalWord { position: m, momenta: BTreeMap::new() },
                    Coefficient::rational(r),
                );
            }
        }
    }
    out
}

fn canonical_map(terms: &[OperatorTerm]) -> NormalMap {
    let mut out = NormalMap::new();
    for t in terms {
        let mut acc: NormalMap = [(NormalWord::identity(), t.coefficient.clone())]
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for p in &t.word {
            if acc.is_empty() {
                break;
            }
            acc = mul_maps(&acc, &primitive_map(p));
        }
        for (w, c) in acc {
            add_into(&mut out, w, c);
        }
    }
    out
}

impl OperatorExpr {
    fn canonical(map: NormalMap) -> Self {
        Self { repr: Repr::Canonical(map) }
    }

    pub fn zero() -> Self {
        Self::canonical(NormalMap::new())
    }

    pub fn identity() -> Self {
        Self::scalar(Coefficient::one())
    }

    pub fn scalar(c: Coefficient) -> Self {
        let mut m = NormalMap::new();
        add_into(&mut m, NormalWord::identity(), c);
        Self::canonical(m)
    }

    pub fn momentum(c: Coord) -> Self {
        Self::canonical(primitive_map(&Primitive::Momentum(c)))
    }

    pub fn coordinate(c: Coord) -> Self {
        Self::position(PositionFactor::power(c, 1))
    }

    pub fn position(f: PositionFactor) -> Self {
        Self::canonical(primitive_map(&Primitive::Position(f)))
    }

    /// Raw expression; words are kept in the given order.
    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        Self { repr: Repr::Raw(terms) }
    }

    pub fn from_word(coefficient: Coefficient, word: Vec<Primitive>) -> Self {
        Self::from_terms(vec![OperatorTerm::new(coefficient, word)])
    }

    /// Equal operator in canonical form. Idempotent.
    pub fn canonicalize(&self) -> OperatorExpr {
        match &self.repr {
            Repr::Canonical(_) => self.clone(),
            Repr::Raw(t) => Self::canonical(canonical_map(t)),
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.repr, Repr::Canonical(_))
    }

    fn map(&self) -> Cow<'_, NormalMap> {
        match &self.repr {
            Repr::Canonical(m) => Cow::Borrowed(m),
            Repr::Raw(t) => Cow::Owned(canonical_map(t)),
        }
    }

    /// Canonical terms as (word, coefficient) pairs in deterministic order.
    pub fn normal_terms(&self) -> Vec<(NormalWord, Coefficient)> {
        self.map().iter().map(|(w, c)| (w.clone(), c.clone())).collect()
    }

    pub fn coefficient_of(&self, w: &NormalWord) -> Coefficient {
        self.map().get(w).cloned().unwrap_or_default()
    }

    /// Terms as stored: raw words for raw expressions, canonical words otherwise.
    pub fn terms(&self) -> Vec<OperatorTerm> {
        match &self.repr {
            Repr::Raw(t) => t.clone(),
            Repr::Canonical(m) => {
                m.iter().map(|(w, c)| OperatorTerm::new(c.clone(), w.to_word())).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Raw(t) => t.len(),
            Repr::Canonical(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when the canonical form has no terms.
    pub fn is_zero(&self) -> bool {
        self.map().is_empty()
    }

    pub fn scale(&self, c: &Coefficient) -> OperatorExpr {
        let mut out = NormalMap::new();
        for (w, v) in self.map().iter() {
            add_into(&mut out, w.clone(), v * c);
        }
        Self::canonical(out)
    }

    pub fn scale_rational(&self, r: &Rational) -> OperatorExpr {
        self.scale(&Coefficient::rational(r.clone()))
    }

    /// `[self, other] = self*other - other*self`, canonical.
    pub fn commutator(&self, other: &OperatorExpr) -> OperatorExpr {
        let a = self.map();
        let b = other.map();
        let mut ab = mul_maps(&a, &b);
        for (w, c) in mul_maps(&b, &a) {
            add_into(&mut ab, w, -&c);
        }
        Self::canonical(ab)
    }

    /// True iff `canonicalize(self - other)` has no terms.
    pub fn equal(&self, other: &OperatorExpr) -> bool {
        (self - other).is_zero()
    }

    /// Replaces bound parameters by rationals and refolds the coefficients.
    pub fn substitute_parameters(&self, bindings: &Bindings) -> Result<OperatorExpr> {
        let mut out = NormalMap::new();
        for (w, c) in self.map().iter() {
            add_into(&mut out, w.clone(), c.substitute(bindings)?);
        }
        Ok(Self::canonical(out))
    }

    /// Coordinates referenced by any canonical term.
    pub fn coords(&self) -> BTreeSet<Coord> {
        self.map().keys().flat_map(|w| w.coords()).collect()
    }

    /// Parameter names that appear in coefficients.
    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = self.map().values().flat_map(|c| c.parameters()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Hermitian adjoint, assuming real position functions and real parameters.
    pub fn adjoint(&self) -> OperatorExpr {
        let mut out = NormalMap::new();
        for (w, c) in self.map().iter() {
            let p = NormalWord { position: PositionMonomial::one(), momenta: w.momenta.clone() };
            let f = NormalWord { position: w.position.clone(), momenta: BTreeMap::new() };
            for (k, wk) in word_product(&p, &f) {
                add_into(&mut out, wk, &c.conj() * &k);
            }
        }
        Self::canonical(out)
    }

    /// Point value of a multiplicative (momentum-free) operator.
    pub fn eval_position(&self, bindings: &Bindings, point: &dyn Fn(Coord) -> f64) -> Result<num_complex::Complex64> {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (w, c) in self.map().iter() {
            if !w.momenta.is_empty() {
                return Err(crate::Error::Unsupported("operator contains momenta".into()));
            }
            acc += c.evaluate(bindings)? * w.position.eval(point)?;
        }
        Ok(acc)
    }

    /// Highest total momentum degree over all terms.
    pub fn momentum_degree(&self) -> u32 {
        self.map().keys().map(|w| w.momentum_degree()).max().unwrap_or(0)
    }
}

impl PartialEq for OperatorExpr {
    fn eq(&self, other: &Self) -> bool {
        self.map() == other.map()
    }
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, o: &OperatorExpr) -> OperatorExpr {
        let mut out = self.map().into_owned();
        for (w, c) in o.map().iter() {
            add_into(&mut out, w.clone(), c.clone());
        }
        OperatorExpr::canonical(out)
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, o: &OperatorExpr) -> OperatorExpr {
        let mut out = self.map().into_owned();
        for (w, c) in o.map().iter() {
            add_into(&mut out, w.clone(), -c);
        }
        OperatorExpr::canonical(out)
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr::canonical(self.map().iter().map(|(w, c)| (w.clone(), -c)).collect())
    }
}

impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, o: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::canonical(mul_maps(&self.map(), &o.map()))
    }
}

impl std::iter::Sum for OperatorExpr {
    fn sum<I: Iterator<Item = OperatorExpr>>(iter: I) -> Self {
        iter.fold(OperatorExpr::zero(), |a, b| &a + &b)
    }
}

pub(crate) fn fmt_word(word: &[Primitive]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        match &word[i] {
            Primitive::Momentum(c) => {
                let mut n = 1;
                while i + n < word.len() && word[i + n] == Primitive::Momentum(*c) {
                    n += 1;
                }
                parts.push(if n == 1 { format!("p_{c}") } else { format!("p_{c}^{n}") });
                i += n;
            }
            p => {
                parts.push(p.to_string());
                i += 1;
            }
        }
    }
    parts.join(" ")
}

impl fmt::Display for OperatorExpr {
    /// One term per line, `coefficient | word`, in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonicalize();
        if c.is_zero() {
            return writeln!(f, "0 | 1");
        }
        for t in c.terms() {
            writeln!(f, "{} | {}", t.coefficient, fmt_word(&t.word))?;
        }
        Ok(())
    }
}
