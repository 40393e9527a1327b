//! Exact coefficients: Gaussian rationals times Laurent monomials in named
//! parameters, and sums thereof.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// Name of the reduced Planck constant in coefficient monomials.
pub const HBAR: &str = "hbar";
/// Name of the speed of light in coefficient monomials.
pub const LIGHT_SPEED: &str = "c";

/// Parameter bindings used for substitution and numeric evaluation.
pub type Bindings = BTreeMap<String, Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerator/denominator: fall back on a ratio of floats
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Parses `a`, `-a`, `a/b` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, exp: i32) -> Option<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..exp.unsigned_abs() {
            out = &out * &base;
        }
        Some(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rational> for GaussRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im = |r: &Rational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rational(r))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{})", fmt_rational(&self.re), sign, im(&self.im.abs()))
            }
        }
    }
}

/// Integer exponents of named parameters (a Laurent monomial without scalar).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Powers(BTreeMap<String, i32>);

impl Powers {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(name: &str, exp: i32) -> Self {
        let mut p = Self::default();
        p.multiply(name, exp);
        p
    }

    pub fn multiply(&mut self, name: &str, exp: i32) {
        if exp == 0 {
            return;
        }
        let e = self.0.entry(name.to_string()).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.0.remove(name);
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, name: &str) -> i32 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn mul(&self, o: &Powers) -> Powers {
        let mut out = self.clone();
        for (k, v) in o.iter() {
            out.multiply(k, v);
        }
        out
    }
}

/// A Gaussian-rational scalar times a Laurent monomial, e.g. `-(i m / hbar)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParameterMonomial {
    pub scalar: GaussRational,
    pub powers: Powers,
}

impl ParameterMonomial {
    pub fn new(scalar: GaussRational, powers: Powers) -> Self {
        if scalar.is_zero() {
            return Self { scalar, powers: Powers::one() };
        }
        Self { scalar, powers }
    }

    pub fn scalar(scalar: GaussRational) -> Self {
        Self::new(scalar, Powers::one())
    }

    pub fn param(name: &str, exp: i32) -> Self {
        Self::new(GaussRational::one(), Powers::single(name, exp))
    }

    pub fn with(mut self, name: &str, exp: i32) -> Self {
        if !self.scalar.is_zero() {
            self.powers.multiply(name, exp);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }
}

impl fmt::Display for ParameterMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Coefficient::from(self.clone()))
    }
}

/// Laurent polynomial over the Gaussian rationals in named parameters.
///
/// Zero coefficients are never stored, so the zero polynomial is the empty map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coefficient(BTreeMap<Powers, GaussRational>);

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn i() -> Self {
        Self::constant(GaussRational::i())
    }

    pub fn constant(g: GaussRational) -> Self {
        Self::monomial(g, Powers::one())
    }

    pub fn rational(r: Rational) -> Self {
        Self::constant(GaussRational::real(r))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussRational::from_int(n))
    }

    pub fn param(name: &str) -> Self {
        Self::monomial(GaussRational::one(), Powers::single(name, 1))
    }

    pub fn param_pow(name: &str, exp: i32) -> Self {
        Self::monomial(GaussRational::one(), Powers::single(name, exp))
    }

    pub fn monomial(g: GaussRational, p: Powers) -> Self {
        let mut m = BTreeMap::new();
        if !g.is_zero() {
            m.insert(p, g);
        }
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Powers, &GaussRational)> {
        self.0.iter()
    }

    /// The value when the polynomial has no parameter dependence.
    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.0.len() {
            0 => Some(GaussRational::zero()),
            1 => self.0.get(&Powers::one()).cloned(),
            _ => None,
        }
    }

    /// The single monomial, when the polynomial is one.
    pub fn as_monomial(&self) -> Option<ParameterMonomial> {
        if self.0.len() != 1 {
            return None;
        }
        let (p, g) = self.0.iter().next()?;
        Some(ParameterMonomial::new(g.clone(), p.clone()))
    }

    /// Exact inverse when the polynomial is a single monomial.
    pub fn inverse(&self) -> Option<Coefficient> {
        let m = self.as_monomial()?;
        let mut p = Powers::one();
        for (k, v) in m.powers.iter() {
            p.multiply(k, -v);
        }
        Some(Coefficient::monomial(m.scalar.inv()?, p))
    }

    pub fn conj(&self) -> Coefficient {
        Coefficient(self.0.iter().map(|(p, g)| (p.clone(), g.conj())).collect())
    }

    pub fn scale(&self, r: &Rational) -> Coefficient {
        if r.is_zero() {
            return Coefficient::zero();
        }
        Coefficient(self.0.iter().map(|(p, g)| (p.clone(), g.scale(r))).collect())
    }

    pub fn scale_gauss(&self, s: &GaussRational) -> Coefficient {
        if s.is_zero() {
            return Coefficient::zero();
        }
        Coefficient(self.0.iter().map(|(p, g)| (p.clone(), g * s)).collect())
    }

    fn add_term(&mut self, p: Powers, g: GaussRational) {
        if g.is_zero() {
            return;
        }
        match self.0.get_mut(&p) {
            Some(v) => {
                *v = &*v + &g;
                if v.is_zero() {
                    self.0.remove(&p);
                }
            }
            None => {
                self.0.insert(p, g);
            }
        }
    }

    /// Names of every parameter that appears.
    pub fn parameters(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .0
            .keys()
            .flat_map(|p| p.iter().map(|(k, _)| k.to_string()).collect::<Vec<_>>())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Replaces bound parameters by their rational values.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Coefficient> {
        let mut out = Coefficient::zero();
        for (p, g) in &self.0 {
            let mut scalar = g.clone();
            let mut rest = Powers::one();
            for (name, exp) in p.iter() {
                match bindings.get(name) {
                    Some(v) => {
                        if v.is_zero() && exp < 0 {
                            return Err(Error::DivisionByZero(name.to_string()));
                        }
                        let f = GaussRational::real(v.clone())
                            .powi(exp)
                            .ok_or_else(|| Error::DivisionByZero(name.to_string()))?;
                        scalar = &scalar * &f;
                    }
                    None => rest.multiply(name, exp),
                }
            }
            out.add_term(rest, scalar);
        }
        Ok(out)
    }

    /// Numeric value with every parameter bound.
    pub fn evaluate(&self, bindings: &Bindings) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, g) in &self.0 {
            let mut v = g.to_complex();
            for (name, exp) in p.iter() {
                let b = bindings
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.to_string()))?;
                let b = rat_to_f64(b);
                if b == 0.0 && exp < 0 {
                    return Err(Error::DivisionByZero(name.to_string()));
                }
                v *= b.powi(exp);
            }
            acc += v;
        }
        Ok(acc)
    }
}

impl From<ParameterMonomial> for Coefficient {
    fn from(m: ParameterMonomial) -> Self {
        Coefficient::monomial(m.scalar, m.powers)
    }
}

impl From<GaussRational> for Coefficient {
    fn from(g: GaussRational) -> Self {
        Coefficient::constant(g)
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, o: &Coefficient) {
        for (p, g) in &o.0 {
            self.add_term(p.clone(), g.clone());
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self + &(-o)
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient(self.0.iter().map(|(p, g)| (p.clone(), -g)).collect())
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (pa, ga) in &self.0 {
            for (pb, gb) in &o.0 {
                out.add_term(pa.mul(pb), ga * gb);
            }
        }
        out
    }
}

fn fmt_monomial(g: &GaussRational, p: &Powers) -> String {
    let mut parts = Vec::new();
    if !g.is_one() || p.is_one() {
        parts.push(g.to_string());
    }
    for (name, exp) in p.iter() {
        if exp == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{name}^{exp}"));
        }
    }
    parts.join("*")
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.len() {
            0 => write!(f, "0"),
            1 => {
                let (p, g) = self.0.iter().next().unwrap();
                write!(f, "{}", fmt_monomial(g, p))
            }
            _ => {
                let parts: Vec<String> = self.0.iter().map(|(p, g)| fmt_monomial(g, p)).collect();
                write!(f, "[{}]", parts.join(" + "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_display_forms() {
        assert_eq!(GaussRational::new(rat(2, 3), rat_int(0)).to_string(), "2/3");
        assert_eq!(GaussRational::new(rat_int(0), rat(-2, 27)).to_string(), "-2/27i");
        assert_eq!(GaussRational::i().to_string(), "i");
        assert_eq!(GaussRational::new(rat(1, 2), rat(-3, 4)).to_string(), "(1/2-3/4i)");
    }

    #[test]
    fn substitution_folds_parameters() {
        // (hbar^2 omega^2) with hbar = 1, omega = 2 -> 4
        let c = &Coefficient::param_pow(HBAR, 2) * &Coefficient::param_pow("omega", 2);
        let mut b = Bindings::new();
        b.insert(HBAR.into(), rat_int(1));
        b.insert("omega".into(), rat_int(2));
        assert_eq!(c.substitute(&b).unwrap(), Coefficient::int(4));
    }

    #[test]
    fn zero_binding_with_negative_exponent_is_an_error() {
        let c = Coefficient::param_pow("m", -1);
        let mut b = Bindings::new();
        b.insert("m".into(), rat_int(0));
        assert_eq!(c.substitute(&b), Err(Error::DivisionByZero("m".into())));
    }

    #[test]
    fn partial_substitution_keeps_unbound_names() {
        let c = &Coefficient::param("m") * &Coefficient::param("c");
        let mut b = Bindings::new();
        b.insert("m".into(), rat(1, 2));
        let s = c.substitute(&b).unwrap();
        assert_eq!(s, Coefficient::param("c").scale(&rat(1, 2)));
    }

    #[test]
    fn monomial_inverse() {
        let c = Coefficient::param_pow("omega", 2).scale(&rat(3, 1));
        let inv = c.inverse().unwrap();
        assert!((&c * &inv).is_one());
        let sum = &Coefficient::param("a") + &Coefficient::one();
        assert!(sum.inverse().is_none());
    }
}
