//! Coordinates, linear forms and functions of position.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::scalar::{rat_int, rat_to_f64, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn from_name(s: &str) -> Option<Axis> {
        match s {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }
}

/// One cartesian degree of freedom of one particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub particle: usize,
    pub axis: Axis,
}

impl Coord {
    pub fn new(particle: usize, axis: Axis) -> Self {
        Self { particle, axis }
    }

    pub fn x() -> Self {
        Self::new(0, Axis::X)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.particle == 0 {
            write!(f, "{}", self.axis.name())
        } else {
            write!(f, "{}@{}", self.axis.name(), self.particle)
        }
    }
}

/// `sum_j c_j q_j + offset` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: BTreeMap<Coord, Rational>,
    offset: Rational,
}

impl LinearForm {
    pub fn new(coeffs: impl IntoIterator<Item = (Coord, Rational)>, offset: Rational) -> Self {
        let mut map = BTreeMap::new();
        for (c, r) in coeffs {
            let e: &mut Rational = map.entry(c).or_insert_with(Rational::zero);
            *e += r;
        }
        map.retain(|_, v: &mut Rational| !v.is_zero());
        Self { coeffs: map, offset }
    }

    pub fn coord(c: Coord) -> Self {
        Self::new([(c, Rational::one())], Rational::zero())
    }

    /// `q_a - q_b`
    pub fn difference(a: Coord, b: Coord) -> Self {
        Self::new([(a, Rational::one()), (b, -Rational::one())], Rational::zero())
    }

    pub fn constant(offset: Rational) -> Self {
        Self { coeffs: BTreeMap::new(), offset }
    }

    pub fn coeff(&self, c: Coord) -> Rational {
        self.coeffs.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Coord, &Rational)> {
        self.coeffs.iter()
    }

    pub fn scaled(&self, s: &Rational) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|(c, v)| (*c, v * s)).collect(),
            offset: &self.offset * s,
        }
    }

    /// Splits the form as `scale * normalized` where the first coefficient of
    /// `normalized` is one. Constant forms are returned unchanged with scale 1.
    pub fn normalize(&self) -> (Rational, LinearForm) {
        match self.coeffs.values().next() {
            Some(first) => {
                let s = first.clone();
                (s.clone(), self.scaled(&(Rational::one() / s)))
            }
            None => (Rational::one(), self.clone()),
        }
    }

    pub fn eval(&self, point: &dyn Fn(Coord) -> f64) -> f64 {
        self.coeffs
            .iter()
            .fold(rat_to_f64(&self.offset), |acc, (c, v)| acc + rat_to_f64(v) * point(*c))
    }
}

fn fmt_scaled_coord(first: bool, r: &Rational, name: &str) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let body = if a.is_one() {
        name.to_string()
    } else if a.is_integer() {
        format!("{}*{}", a.numer(), name)
    } else {
        format!("{}/{}*{}", a.numer(), a.denom(), name)
    };
    match (first, neg) {
        (true, true) => format!("-{body}"),
        (true, false) => body,
        (false, true) => format!(" - {body}"),
        (false, false) => format!(" + {body}"),
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (i, (c, r)) in self.coeffs.iter().enumerate() {
            s.push_str(&fmt_scaled_coord(i == 0, r, &c.to_string()));
        }
        if !self.offset.is_zero() || self.coeffs.is_empty() {
            let a = self.offset.abs();
            let body = if a.is_integer() {
                a.numer().to_string()
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            match (s.is_empty(), self.offset.is_negative()) {
                (true, true) => s.push_str(&format!("-{body}")),
                (true, false) => s.push_str(&body),
                (false, true) => s.push_str(&format!(" - {body}")),
                (false, false) => s.push_str(&format!(" + {body}")),
            }
        }
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKind {
    /// `sum_k a_k u^k` with coefficient list `[a_0, a_1, ...]`.
    Polynomial(Vec<Rational>),
    /// `exp(rate * u)`
    ExpLin(Rational),
    /// `sign(u)`; its derivative is taken as zero away from `u = 0`.
    Sign,
    /// Derivative of order `order` of an unspecified function `name(u)`.
    AbstractFunc { name: String, order: u32 },
}

/// A function of one linear form of the coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionFactor {
    pub form: LinearForm,
    pub kind: FactorKind,
}

impl PositionFactor {
    pub fn new(form: LinearForm, kind: FactorKind) -> Result<Self> {
        if let FactorKind::Polynomial(c) = &kind {
            if c.last().map_or(true, |l| l.is_zero()) {
                return Err(Error::InvalidModel(
                    "polynomial factor needs a nonzero leading coefficient".into(),
                ));
            }
        }
        Ok(Self { form, kind })
    }

    /// `q^k` for a single coordinate.
    pub fn power(c: Coord, k: u32) -> Self {
        let mut coeffs = vec![Rational::zero(); k as usize + 1];
        coeffs[k as usize] = Rational::one();
        Self { form: LinearForm::coord(c), kind: FactorKind::Polynomial(coeffs) }
    }

    pub fn exp(form: LinearForm, rate: Rational) -> Self {
        Self { form, kind: FactorKind::ExpLin(rate) }
    }

    pub fn sign(form: LinearForm) -> Self {
        Self { form, kind: FactorKind::Sign }
    }

    pub fn func(name: &str, form: LinearForm) -> Self {
        Self { form, kind: FactorKind::AbstractFunc { name: name.to_string(), order: 0 } }
    }
}

/// Canonical product of position functions.
///
/// Polynomials are expanded into monomials of raw coordinates, exponentials
/// and signs are keyed by normalised linear forms (first coefficient one),
/// abstract functions keep their argument as given.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionMonomial {
    pub(crate) powers: BTreeMap<Coord, u32>,
    pub(crate) exps: BTreeMap<LinearForm, Rational>,
    pub(crate) signs: BTreeSet<LinearForm>,
    pub(crate) funcs: BTreeMap<(String, LinearForm, u32), u32>,
}

impl PositionMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && self.exps.is_empty() && self.signs.is_empty() && self.funcs.is_empty()
    }

    pub fn power(c: Coord, k: u32) -> Self {
        let mut m = Self::default();
        if k > 0 {
            m.powers.insert(c, k);
        }
        m
    }

    pub fn mul(&self, o: &PositionMonomial) -> PositionMonomial {
        let mut out = self.clone();
        for (c, k) in &o.powers {
            *out.powers.entry(*c).or_insert(0) += k;
        }
        for (f, r) in &o.exps {
            let e = out.exps.entry(f.clone()).or_insert_with(Rational::zero);
            *e += r;
            if e.is_zero() {
                out.exps.remove(f);
            }
        }
        for s in &o.signs {
            // sign(u)^2 = 1
            if !out.signs.remove(s) {
                out.signs.insert(s.clone());
            }
        }
        for (key, p) in &o.funcs {
            *out.funcs.entry(key.clone()).or_insert(0) += p;
        }
        out
    }

    /// Coordinates the monomial depends on.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out: BTreeSet<Coord> = self.powers.keys().copied().collect();
        for f in self.exps.keys().chain(self.signs.iter()) {
            out.extend(f.coords().map(|(c, _)| *c));
        }
        for (_, f, _) in self.funcs.keys() {
            out.extend(f.coords().map(|(c, _)| *c));
        }
        out
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        self.powers.contains_key(&c)
            || self.exps.keys().any(|f| !f.coeff(c).is_zero())
            || self.signs.iter().any(|f| !f.coeff(c).is_zero())
            || self.funcs.keys().any(|(_, f, _)| !f.coeff(c).is_zero())
    }

    /// Partial derivative with respect to `c` as a sum of rational multiples
    /// of monomials. Signs are locally constant.
    pub fn derivative(&self, c: Coord) -> Vec<(Rational, PositionMonomial)> {
        let mut out = Vec::new();
        if let Some(&k) = self.powers.get(&c) {
            let mut m = self.clone();
            if k == 1 {
                m.powers.remove(&c);
            } else {
                m.powers.insert(c, k - 1);
            }
            out.push((rat_int(k as i64), m));
        }
        let exp_rate: Rational = self
            .exps
            .iter()
            .map(|(f, r)| r * f.coeff(c))
            .fold(Rational::zero(), |a, b| a + b);
        if !exp_rate.is_zero() {
            out.push((exp_rate, self.clone()));
        }
        for ((name, form, order), &p) in &self.funcs {
            let dc = form.coeff(c);
            if dc.is_zero() {
                continue;
            }
            let mut m = self.clone();
            let key = (name.clone(), form.clone(), *order);
            if p == 1 {
                m.funcs.remove(&key);
            } else {
                m.funcs.insert(key, p - 1);
            }
            *m.funcs.entry((name.clone(), form.clone(), order + 1)).or_insert(0) += 1;
            out.push((dc * rat_int(p as i64), m));
        }
        out
    }

    /// Point value. Abstract functions have no values and yield an error;
    /// `sign(0)` evaluates to zero.
    pub fn eval(&self, point: &dyn Fn(Coord) -> f64) -> Result<f64> {
        if let Some(((name, _, _), _)) = self.funcs.iter().next() {
            return Err(Error::Unsupported(format!("abstract function `{name}` has no numeric form")));
        }
        let mut v = 1.0;
        for (c, k) in &self.powers {
            v *= point(*c).powi(*k as i32);
        }
        let mut arg = 0.0;
        for (f, r) in &self.exps {
            arg += rat_to_f64(r) * f.eval(point);
        }
        v *= arg.exp();
        for f in &self.signs {
            let u = f.eval(point);
            v *= if u > 0.0 {
                1.0
            } else if u < 0.0 {
                -1.0
            } else {
                0.0
            };
        }
        Ok(v)
    }

    pub fn has_sign(&self) -> bool {
        !self.signs.is_empty()
    }

    pub fn has_abstract(&self) -> bool {
        !self.funcs.is_empty()
    }

    /// Back to a list of factors, in a fixed order: powers, exponentials,
    /// signs, abstract functions.
    pub fn factors(&self) -> Vec<PositionFactor> {
        let mut out = Vec::new();
        for (c, k) in &self.powers {
            out.push(PositionFactor::power(*c, *k));
        }
        for (f, r) in &self.exps {
            out.push(PositionFactor::exp(f.clone(), r.clone()));
        }
        for f in &self.signs {
            out.push(PositionFactor::sign(f.clone()));
        }
        for ((name, form, order), p) in &self.funcs {
            for _ in 0..*p {
                out.push(PositionFactor {
                    form: form.clone(),
                    kind: FactorKind::AbstractFunc { name: name.clone(), order: *order },
                });
            }
        }
        out
    }
}

/// Multiplies two sparse polynomials in raw coordinates.
fn poly_mul(
    a: &BTreeMap<BTreeMap<Coord, u32>, Rational>,
    b: &BTreeMap<BTreeMap<Coord, u32>, Rational>,
) -> BTreeMap<BTreeMap<Coord, u32>, Rational> {
    let mut out: BTreeMap<BTreeMap<Coord, u32>, Rational> = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            for (c, k) in mb {
                *m.entry(*c).or_insert(0) += k;
            }
            let e = out.entry(m).or_insert_with(Rational::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

impl PositionFactor {
    /// Expands the factor into a sum of rational multiples of canonical
    /// monomials.
    pub fn to_monomials(&self) -> Vec<(Rational, PositionMonomial)> {
        match &self.kind {
            FactorKind::Polynomial(coeffs) => {
                let mut lin: BTreeMap<BTreeMap<Coord, u32>, Rational> = BTreeMap::new();
                for (c, r) in self.form.coords() {
                    lin.insert([(*c, 1u32)].into_iter().collect(), r.clone());
                }
                if !self.form.offset().is_zero() {
                    lin.insert(BTreeMap::new(), self.form.offset().clone());
                }
                let mut total: BTreeMap<BTreeMap<Coord, u32>, Rational> = BTreeMap::new();
                let mut pow: BTreeMap<BTreeMap<Coord, u32>, Rational> =
                    [(BTreeMap::new(), Rational::one())].into_iter().collect();
                for (k, a) in coeffs.iter().enumerate() {
                    if k > 0 {
                        pow = poly_mul(&pow, &lin);
                    }
                    if a.is_zero() {
                        continue;
                    }
                    for (m, c) in &pow {
                        let e = total.entry(m.clone()).or_insert_with(Rational::zero);
                        *e += a * c;
                    }
                }
                total
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(m, c)| (c, PositionMonomial { powers: m, ..Default::default() }))
                    .collect()
            }
            FactorKind::ExpLin(rate) => {
                if rate.is_zero() {
                    return vec![(Rational::one(), PositionMonomial::one())];
                }
                let (s, f) = self.form.normalize();
                let mut m = PositionMonomial::one();
                m.exps.insert(f, rate * s);
                vec![(Rational::one(), m)]
            }
            FactorKind::Sign => {
                if self.form.is_constant() {
                    let o = self.form.offset();
                    let v = if o.is_zero() { 0 } else if o.is_negative() { -1 } else { 1 };
                    if v == 0 {
                        return Vec::new();
                    }
                    return vec![(rat_int(v), PositionMonomial::one())];
                }
                let (s, f) = self.form.normalize();
                let mut m = PositionMonomial::one();
                m.signs.insert(f);
                let sgn = if s.is_negative() { -1 } else { 1 };
                vec![(rat_int(sgn), m)]
            }
            FactorKind::AbstractFunc { name, order } => {
                let mut m = PositionMonomial::one();
                m.funcs.insert((name.clone(), self.form.clone(), *order), 1);
                vec![(Rational::one(), m)]
            }
        }
    }
}

fn fmt_rate_form(rate: &Rational, form: &LinearForm) -> String {
    form.scaled(rate).to_string()
}

impl fmt::Display for PositionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FactorKind::Polynomial(coeffs) => {
                let single = self.form.offset().is_zero()
                    && self.form.coords().count() == 1
                    && self.form.coords().next().is_some_and(|(_, r)| r.is_one())
                    && coeffs.iter().rev().skip(1).all(|c| c.is_zero());
                if single {
                    let k = coeffs.len() - 1;
                    if k == 1 {
                        write!(f, "{}", self.form)
                    } else {
                        write!(f, "{}^{}", self.form, k)
                    }
                } else {
                    let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                    write!(f, "poly[{}]({})", parts.join(","), self.form)
                }
            }
            FactorKind::ExpLin(rate) => write!(f, "exp({})", fmt_rate_form(rate, &self.form)),
            FactorKind::Sign => write!(f, "sign({})", self.form),
            FactorKind::AbstractFunc { name, order } => {
                if *order == 0 {
                    write!(f, "{}({})", name, self.form)
                } else {
                    write!(f, "{}^({})({})", name, order, self.form)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::scalar::rat;

    #[test]
    fn polynomial_of_shifted_form_expands() {
        // (x - 1)^2 = x^2 - 2x + 1
        let form = LinearForm::new([(Coord::x(), rat_int(1))], rat_int(-1));
        let f = PositionFactor::new(form, FactorKind::Polynomial(vec![rat_int(0), rat_int(0), rat_int(1)]))
            .unwrap();
        let terms = f.to_monomials();
        assert_eq!(terms.len(), 3);
        let find = |k: u32| {
            terms
                .iter()
                .find(|(_, m)| m.powers.get(&Coord::x()).copied().unwrap_or(0) == k)
                .unwrap()
                .0
                .clone()
        };
        assert_eq!(find(2), rat_int(1));
        assert_eq!(find(1), rat_int(-2));
        assert_eq!(find(0), rat_int(1));
    }

    #[test]
    fn exponentials_on_scaled_forms_merge() {
        let x = LinearForm::coord(Coord::x());
        let a = PositionFactor::exp(x.scaled(&rat_int(2)), rat(-1, 3)).to_monomials();
        let b = PositionFactor::exp(x.clone(), rat(-2, 3)).to_monomials();
        assert_eq!(a, b);
    }

    #[test]
    fn sign_squares_to_one() {
        let x = LinearForm::coord(Coord::x());
        let (_, s) = PositionFactor::sign(x).to_monomials().remove(0);
        assert!(s.mul(&s).is_one());
    }

    #[test]
    fn sign_of_negated_form_flips_coefficient() {
        let x = LinearForm::coord(Coord::x());
        let (c, _) = PositionFactor::sign(x.scaled(&rat_int(-3))).to_monomials().remove(0);
        assert_eq!(c, rat_int(-1));
    }

    #[test]
    fn sign_derivative_vanishes() {
        let (_, s) = PositionFactor::sign(LinearForm::coord(Coord::x())).to_monomials().remove(0);
        assert!(s.derivative(Coord::x()).is_empty());
    }

    #[test]
    fn abstract_function_chain_rule() {
        let a = Coord::new(0, Axis::X);
        let b = Coord::new(1, Axis::X);
        let (_, v) = PositionFactor::func("V", LinearForm::difference(a, b)).to_monomials().remove(0);
        let da = v.derivative(a);
        let db = v.derivative(b);
        assert_eq!(da.len(), 1);
        assert_eq!(da[0].0, rat_int(1));
        assert_eq!(db[0].0, rat_int(-1));
        assert_eq!(da[0].1, db[0].1);
    }

    #[test]
    fn display_forms() {
        let x = LinearForm::coord(Coord::x());
        assert_eq!(PositionFactor::exp(x.clone(), rat(-2, 3)).to_string(), "exp(-2/3*x)");
        assert_eq!(PositionFactor::power(Coord::x(), 2).to_string(), "x^2");
        let d = LinearForm::difference(Coord::new(0, Axis::X), Coord::new(1, Axis::X));
        assert_eq!(PositionFactor::func("V", d).to_string(), "V(x - x@1)");
    }
}
