//! Target potentials and Hamiltonians.

use num_traits::{Signed, Zero};

use crate::opalg::{
    rat, rat_to_f64, Axis, Bindings, Coefficient, Coord, LinearForm, OperatorExpr, PositionFactor,
    Rational, HBAR, LIGHT_SPEED,
};
use crate::{Error, Result};

/// Default mass parameter name.
pub const MASS: &str = "m";

/// Potential along one cartesian axis of one particle.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisModel {
    /// Infinite walls at `±size/2`, zero inside.
    Box { size: Rational },
    /// `slope * |q|`
    Linear { slope: Coefficient },
    /// `(m omega^2 / 2) (q - center)^2`
    Harmonic { omega: Coefficient, center: Coefficient },
    /// `depth (e^{-2 width (q - center)} - 2 e^{-width (q - center)})`
    Morse { depth: Coefficient, width: Rational, center: Rational },
    /// Unspecified function `name(q)`.
    Abstract { name: String },
    /// Unspecified potential that is never evaluated; only ground-state
    /// overlaps are taken along this axis.
    Spectator { tag: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coupling {
    /// `V(q_A - q_B)` on every axis with an unspecified `V`.
    AbstractTwoBody { name: String },
    /// `kappa (q_A - q_B)^2` on every axis.
    HarmonicCoupling { kappa: Coefficient },
    /// `alpha / |r_A - r_B|`; grid-only.
    Coulomb { alpha: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialModel {
    ConstantBox { size: [Rational; 3] },
    SymmetricLinear { slopes: [Coefficient; 3] },
    Harmonic { omega: Coefficient, displacement: [Coefficient; 3] },
    Morse { depth: Coefficient, width: Rational, equilibrium: Rational, transverse: String },
    CoupledHarmonicPair { omega: Coefficient, coupling: Coupling },
    SeparableAbstract { names: [String; 3] },
    /// One particle with an independent potential per axis.
    Separable { axes: [AxisModel; 3] },
}

fn positive(c: &Coefficient, what: &str, b: &Bindings) -> Result<()> {
    match c.evaluate(b) {
        Ok(v) if v.re <= 0.0 || v.im != 0.0 => Err(Error::InvalidModel(format!("{what} must be positive"))),
        _ => Ok(()),
    }
}

fn num(c: &Coefficient, b: &Bindings) -> Result<f64> {
    let v = c.evaluate(b)?;
    if v.im != 0.0 {
        return Err(Error::InvalidModel("complex model parameter".into()));
    }
    Ok(v.re)
}

impl AxisModel {
    /// Symbolic potential along `coord` for a particle of mass `mass`.
    pub fn to_operator_expr(&self, coord: Coord, mass: &Coefficient) -> Result<OperatorExpr> {
        let q = OperatorExpr::coordinate(coord);
        Ok(match self {
            AxisModel::Box { .. } | AxisModel::Spectator { .. } => OperatorExpr::zero(),
            AxisModel::Linear { slope } => {
                let s = OperatorExpr::position(PositionFactor::sign(LinearForm::coord(coord)));
                (&s * &q).scale(slope)
            }
            AxisModel::Harmonic { omega, center } => {
                let k = &(mass * &(omega * omega)) * &Coefficient::rational(rat(1, 2));
                let q2 = &q * &q;
                let lin = q.scale(&(center * &Coefficient::int(-2)));
                let c2 = OperatorExpr::scalar(center * center);
                (&(&q2 + &lin) + &c2).scale(&k)
            }
            AxisModel::Morse { depth, width, center } => {
                let form = LinearForm::new([(coord, Rational::from_integer(1.into()))], -center.clone());
                let e2 = OperatorExpr::position(PositionFactor::exp(form.clone(), -width * Rational::from_integer(2.into())));
                let e1 = OperatorExpr::position(PositionFactor::exp(form, -width.clone()));
                (&e2 - &e1.scale(&Coefficient::int(2))).scale(depth)
            }
            AxisModel::Abstract { name } => {
                OperatorExpr::position(PositionFactor::func(name, LinearForm::coord(coord)))
            }
        })
    }

    fn validate(&self, b: &Bindings) -> Result<()> {
        match self {
            AxisModel::Box { size } if !size.is_positive() => {
                Err(Error::InvalidModel("box size must be positive".into()))
            }
            AxisModel::Harmonic { omega, .. } => positive(omega, "omega", b),
            AxisModel::Morse { depth, width, .. } => {
                positive(depth, "Morse depth", b)?;
                if !width.is_positive() {
                    return Err(Error::InvalidModel("Morse width must be positive".into()));
                }
                match morse_lambda(depth, width, &Coefficient::param(MASS), b) {
                    Ok(l) if l <= 0.5 => Err(Error::InvalidModel(format!(
                        "Morse potential has no bound state (lambda = {l})"
                    ))),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Numeric form with every parameter bound.
    pub fn resolve(&self, mass: &Coefficient, b: &Bindings) -> Result<AxisPotential> {
        Ok(match self {
            AxisModel::Box { size } => AxisPotential::Box { half_width: rat_to_f64(size) / 2.0 },
            AxisModel::Linear { slope } => AxisPotential::Linear { slope: num(slope, b)? },
            AxisModel::Harmonic { omega, center } => {
                let w = num(omega, b)?;
                AxisPotential::Harmonic { stiffness: num(mass, b)? * w * w, center: num(center, b)? }
            }
            AxisModel::Morse { depth, width, center } => AxisPotential::Morse {
                depth: num(depth, b)?,
                width: rat_to_f64(width),
                center: rat_to_f64(center),
            },
            AxisModel::Abstract { name } => {
                return Err(Error::Unsupported(format!("abstract potential `{name}` has no numeric form")))
            }
            AxisModel::Spectator { .. } => AxisPotential::Spectator,
        })
    }
}

/// `sqrt(2 m V0) / (a hbar)`
pub fn morse_lambda(depth: &Coefficient, width: &Rational, mass: &Coefficient, b: &Bindings) -> Result<f64> {
    let v0 = num(depth, b)?;
    let m = num(mass, b)?;
    let hbar = num(&Coefficient::param(HBAR), b)?;
    Ok((2.0 * m * v0).sqrt() / (rat_to_f64(width) * hbar))
}

/// Number of bound Morse states, `floor(lambda - 1/2) + 1`.
pub fn morse_bound_state_count(lambda: f64) -> usize {
    if lambda <= 0.5 {
        0
    } else {
        (lambda - 0.5).floor() as usize + 1
    }
}

/// `E_n = -V0 (1 - (n + 1/2)/lambda)^2`
pub fn morse_energy(depth: f64, lambda: f64, n: usize) -> f64 {
    let t = 1.0 - (n as f64 + 0.5) / lambda;
    -depth * t * t
}

/// Numeric potential along one axis.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisPotential {
    Box { half_width: f64 },
    Linear { slope: f64 },
    Harmonic { stiffness: f64, center: f64 },
    Morse { depth: f64, width: f64, center: f64 },
    Spectator,
}

impl AxisPotential {
    pub fn eval(&self, q: f64) -> f64 {
        match *self {
            AxisPotential::Box { half_width } => {
                if q.abs() <= half_width {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            AxisPotential::Linear { slope } => slope * q.abs(),
            AxisPotential::Harmonic { stiffness, center } => 0.5 * stiffness * (q - center).powi(2),
            AxisPotential::Morse { depth, width, center } => {
                let e = (-width * (q - center)).exp();
                depth * (e * e - 2.0 * e)
            }
            AxisPotential::Spectator => 0.0,
        }
    }
}

impl PotentialModel {
    pub fn particle_count(&self) -> usize {
        match self {
            PotentialModel::CoupledHarmonicPair { .. } => 2,
            _ => 1,
        }
    }

    /// Per-axis description for single-particle separable models.
    pub fn axes(&self) -> Option<[AxisModel; 3]> {
        Some(match self {
            PotentialModel::ConstantBox { size } => size.clone().map(|size| AxisModel::Box { size }),
            PotentialModel::SymmetricLinear { slopes } => slopes.clone().map(|slope| AxisModel::Linear { slope }),
            PotentialModel::Harmonic { omega, displacement } => displacement
                .clone()
                .map(|center| AxisModel::Harmonic { omega: omega.clone(), center }),
            PotentialModel::Morse { depth, width, equilibrium, transverse } => [
                AxisModel::Morse { depth: depth.clone(), width: width.clone(), center: equilibrium.clone() },
                AxisModel::Spectator { tag: transverse.clone() },
                AxisModel::Spectator { tag: transverse.clone() },
            ],
            PotentialModel::SeparableAbstract { names } => {
                names.clone().map(|name| AxisModel::Abstract { name })
            }
            PotentialModel::Separable { axes } => axes.clone(),
            PotentialModel::CoupledHarmonicPair { .. } => return None,
        })
    }

    /// True for models whose double commutator closes (`[H,[H,O1]] = hbar^2 omega^2 O1`).
    pub fn is_harmonic_family(&self) -> bool {
        match self {
            PotentialModel::Harmonic { .. } | PotentialModel::CoupledHarmonicPair { .. } => true,
            PotentialModel::Separable { axes } => axes.iter().all(|a| matches!(a, AxisModel::Harmonic { .. })),
            _ => false,
        }
    }

    /// Checks parameter ranges for every parameter that is bound.
    pub fn validate(&self, b: &Bindings) -> Result<()> {
        if let Some(axes) = self.axes() {
            for a in &axes {
                a.validate(b)?;
            }
        }
        if let PotentialModel::CoupledHarmonicPair { omega, coupling } = self {
            positive(omega, "omega", b)?;
            if let Coupling::AbstractTwoBody { name } = coupling {
                if name.is_empty() {
                    return Err(Error::InvalidModel("coupling needs a name".into()));
                }
            }
        }
        Ok(())
    }

    /// Potential as a multiplicative operator. `masses` holds one entry per particle.
    pub fn to_operator_expr(&self, masses: &[Coefficient]) -> Result<OperatorExpr> {
        if masses.len() != self.particle_count() {
            return Err(Error::InvalidModel(format!(
                "model needs {} particle(s), got {}",
                self.particle_count(),
                masses.len()
            )));
        }
        if let Some(axes) = self.axes() {
            let mut v = OperatorExpr::zero();
            for (a, ax) in Axis::ALL.iter().zip(axes.iter()) {
                v = &v + &ax.to_operator_expr(Coord::new(0, *a), &masses[0])?;
            }
            return Ok(v);
        }
        let PotentialModel::CoupledHarmonicPair { omega, coupling } = self else {
            unreachable!("only the pair model lacks a per-axis form")
        };
        let mut v = OperatorExpr::zero();
        for (t, m) in masses.iter().enumerate() {
            for a in Axis::ALL {
                let h = AxisModel::Harmonic { omega: omega.clone(), center: Coefficient::zero() };
                v = &v + &h.to_operator_expr(Coord::new(t, a), m)?;
            }
        }
        for a in Axis::ALL {
            let form = LinearForm::difference(Coord::new(0, a), Coord::new(1, a));
            let term = match coupling {
                Coupling::AbstractTwoBody { name } => OperatorExpr::position(PositionFactor::func(name, form)),
                Coupling::HarmonicCoupling { kappa } => {
                    let d = OperatorExpr::position(PositionFactor::new(
                        form,
                        crate::opalg::FactorKind::Polynomial(vec![Rational::zero(), Rational::zero(), rat(1, 1)]),
                    )?);
                    d.scale(kappa)
                }
                Coupling::Coulomb { .. } => {
                    return Err(Error::NotRepresentable(
                        "Coulomb coupling is singular and has no symbolic form; use the numeric oracle".into(),
                    ))
                }
            };
            v = &v + &term;
        }
        Ok(v)
    }

    /// Numeric potential at a configuration of all particle coordinates.
    pub fn potential_at(&self, masses: &[Coefficient], b: &Bindings, point: &dyn Fn(Coord) -> f64) -> Result<f64> {
        if let Some(axes) = self.axes() {
            let mut v = 0.0;
            for (a, ax) in Axis::ALL.iter().zip(axes.iter()) {
                v += ax.resolve(&masses[0], b)?.eval(point(Coord::new(0, *a)));
            }
            return Ok(v);
        }
        let PotentialModel::CoupledHarmonicPair { omega, coupling } = self else { unreachable!() };
        let w = num(omega, b)?;
        let mut v = 0.0;
        for (t, m) in masses.iter().enumerate() {
            let m = num(m, b)?;
            for a in Axis::ALL {
                v += 0.5 * m * w * w * point(Coord::new(t, a)).powi(2);
            }
        }
        let d: Vec<f64> = Axis::ALL
            .iter()
            .map(|a| point(Coord::new(0, *a)) - point(Coord::new(1, *a)))
            .collect();
        v += match coupling {
            Coupling::AbstractTwoBody { name } => {
                return Err(Error::Unsupported(format!("abstract coupling `{name}` has no numeric form")))
            }
            Coupling::HarmonicCoupling { kappa } => num(kappa, b)? * d.iter().map(|x| x * x).sum::<f64>(),
            Coupling::Coulomb { alpha } => rat_to_f64(alpha) / d.iter().map(|x| x * x).sum::<f64>().sqrt(),
        };
        Ok(v)
    }
}

/// `-c sum_t eps . p_t` for real polarization components `eps`.
pub fn dipole_seed_vector(eps: &[Rational; 3], particles: usize) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for t in 0..particles {
        for (a, e) in Axis::ALL.iter().zip(eps.iter()) {
            if !e.is_zero() {
                out = &out + &OperatorExpr::momentum(Coord::new(t, *a)).scale_rational(e);
            }
        }
    }
    out.scale(&-&Coefficient::param(LIGHT_SPEED))
}

/// `O_1 = -c sum_t p_{t,axis}`
pub fn dipole_seed(axis: Axis, particles: usize) -> OperatorExpr {
    let mut eps = [Rational::zero(), Rational::zero(), Rational::zero()];
    eps[axis.index()] = rat(1, 1);
    dipole_seed_vector(&eps, particles)
}

#[derive(Clone, Debug)]
enum Source {
    Model(PotentialModel),
    Custom,
}

/// Kinetic energy plus potential, in symbolic form when representable.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    masses: Vec<Coefficient>,
    source: Source,
    operator: Option<OperatorExpr>,
    potential: Option<OperatorExpr>,
}

/// `sum_t p_t^2 / 2 m_t`
pub fn kinetic(masses: &[Coefficient]) -> Result<OperatorExpr> {
    let mut t = OperatorExpr::zero();
    for (i, m) in masses.iter().enumerate() {
        let inv = m
            .inverse()
            .ok_or_else(|| Error::InvalidModel("mass must be a single monomial".into()))?;
        let half = &inv * &Coefficient::rational(rat(1, 2));
        for a in Axis::ALL {
            let p = OperatorExpr::momentum(Coord::new(i, a));
            t = &t + &(&p * &p).scale(&half);
        }
    }
    Ok(t)
}

impl Hamiltonian {
    pub fn new(model: PotentialModel, masses: Vec<Coefficient>) -> Result<Self> {
        let (operator, potential) = match model.to_operator_expr(&masses) {
            Ok(v) => (Some(&kinetic(&masses)? + &v), Some(v)),
            Err(Error::NotRepresentable(_)) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self { masses, source: Source::Model(model), operator, potential })
    }

    /// Catalog model with every mass equal to the symbolic `m`.
    pub fn with_symbolic_mass(model: PotentialModel) -> Result<Self> {
        let n = model.particle_count();
        Self::new(model, vec![Coefficient::param(MASS); n])
    }

    /// Arbitrary multiplicative potential.
    pub fn custom(masses: Vec<Coefficient>, potential: OperatorExpr) -> Result<Self> {
        let potential = potential.canonicalize();
        if potential.momentum_degree() > 0 {
            return Err(Error::InvalidModel("potential must not contain momenta".into()));
        }
        let operator = &kinetic(&masses)? + &potential;
        Ok(Self { masses, source: Source::Custom, operator: Some(operator), potential: Some(potential) })
    }

    pub fn masses(&self) -> &[Coefficient] {
        &self.masses
    }

    pub fn particle_count(&self) -> usize {
        self.masses.len()
    }

    pub fn model(&self) -> Option<&PotentialModel> {
        match &self.source {
            Source::Model(m) => Some(m),
            Source::Custom => None,
        }
    }

    /// Full `H0`; errors for grid-only models.
    pub fn operator(&self) -> Result<&OperatorExpr> {
        self.operator.as_ref().ok_or_else(|| {
            Error::NotRepresentable("potential has no symbolic form; use the numeric oracle".into())
        })
    }

    pub fn potential(&self) -> Result<&OperatorExpr> {
        self.potential.as_ref().ok_or_else(|| {
            Error::NotRepresentable("potential has no symbolic form; use the numeric oracle".into())
        })
    }

    /// Numeric potential; for custom Hamiltonians the symbolic form is evaluated.
    pub fn potential_at(&self, b: &Bindings, point: &dyn Fn(Coord) -> f64) -> Result<f64> {
        match &self.source {
            Source::Model(m) => m.potential_at(&self.masses, b, point),
            Source::Custom => {
                let v = self.potential()?.eval_position(b, point)?;
                Ok(v.re)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::text::parse_expr;

    fn appendix_units() -> Bindings {
        [(HBAR, rat(1, 1)), (MASS, rat(1, 1)), (LIGHT_SPEED, rat(1, 1))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    fn morse() -> PotentialModel {
        PotentialModel::Morse {
            depth: Coefficient::int(1),
            width: rat(1, 3),
            equilibrium: rat(0, 1),
            transverse: "unspecified".into(),
        }
    }

    #[test]
    fn morse_in_appendix_units() {
        let v = morse().to_operator_expr(&[Coefficient::int(1)]).unwrap();
        let expect = parse_expr("1 | exp(-2/3*x)\n-2 | exp(-1/3*x)\n").unwrap();
        assert!(v.equal(&expect));
    }

    #[test]
    fn harmonic_is_quadratic_in_each_axis() {
        let h = PotentialModel::Harmonic {
            omega: Coefficient::param("omega"),
            displacement: [Coefficient::zero(), Coefficient::zero(), Coefficient::zero()],
        };
        let v = h.to_operator_expr(&[Coefficient::param(MASS)]).unwrap();
        let expect = parse_expr("1/2*m*omega^2 | x^2\n1/2*m*omega^2 | y^2\n1/2*m*omega^2 | z^2\n").unwrap();
        assert!(v.equal(&expect));
    }

    #[test]
    fn linear_uses_sign_times_coordinate() {
        let l = PotentialModel::SymmetricLinear {
            slopes: [Coefficient::param("b_x"), Coefficient::zero(), Coefficient::zero()],
        };
        let v = l.to_operator_expr(&[Coefficient::param(MASS)]).unwrap();
        assert!(v.equal(&parse_expr("b_x | sign(x) x\n").unwrap()));
    }

    #[test]
    fn coulomb_is_not_representable() {
        let m = PotentialModel::CoupledHarmonicPair {
            omega: Coefficient::int(1),
            coupling: Coupling::Coulomb { alpha: rat(1, 1) },
        };
        assert!(matches!(m.to_operator_expr(&[Coefficient::int(1), Coefficient::int(1)]), Err(Error::NotRepresentable(_))));
        let h = Hamiltonian::new(m, vec![Coefficient::int(1), Coefficient::int(1)]).unwrap();
        assert!(h.operator().is_err());
    }

    #[test]
    fn seeds() {
        let s = dipole_seed(Axis::X, 2);
        assert!(s.equal(&parse_expr("-c | p_x\n-c | p_x@1\n").unwrap()));
    }

    #[test]
    fn morse_bound_states_in_appendix_units() {
        let b = appendix_units();
        let l = morse_lambda(&Coefficient::int(1), &rat(1, 3), &Coefficient::int(1), &b).unwrap();
        assert!((l - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(morse_bound_state_count(l), 4);
        assert!((morse_energy(1.0, l, 0) + 0.778187).abs() < 1e-6);
    }

    #[test]
    fn invalid_morse_is_rejected() {
        let m = PotentialModel::Morse {
            depth: Coefficient::rational(rat(1, 100)),
            width: rat(1, 1),
            equilibrium: rat(0, 1),
            transverse: String::new(),
        };
        assert!(m.validate(&appendix_units()).is_err());
    }
}
