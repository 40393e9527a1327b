//! Scan configuration: TOML with flat sections.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twophoton::models::{Coupling, PotentialModel};
use twophoton::opalg::{Bindings, Coefficient, Rational, HBAR, LIGHT_SPEED};
use twophoton::scattering::ScatteringGeometry;

use crate::error::{CliError, CliResult};

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Validation(msg.into()))
}

/// A number given either as a float or as exact text (`"1/3"`, `"0.25"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_rational(&self, field: &str) -> CliResult<Rational> {
        match self {
            Num::Float(x) => Rational::from_float(*x).ok_or_else(|| CliError::Validation(format!("{field}: {x} is not finite"))),
            Num::Text(s) => parse_exact(s).ok_or_else(|| CliError::Validation(format!("{field}: cannot read `{s}` as a number"))),
        }
    }

    pub fn to_f64(&self, field: &str) -> CliResult<f64> {
        Ok(twophoton::opalg::rat_to_f64(&self.to_rational(field)?))
    }
}

fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some(r) = twophoton::opalg::parse_rational(s) {
        return Some(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.')?;
    if frac.len() > 18 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: Rational = format!("{int}{frac}").trim_start_matches('0').parse().unwrap_or_default();
    let scale: Rational = format!("1{}", "0".repeat(frac.len())).parse().ok()?;
    let r = digits / scale;
    Some(if neg { -r } else { r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Box,
    Linear,
    Harmonic,
    Morse,
    CoupledHarmonic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    /// Box edge length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Num>,
    /// Harmonic pair coupling; an unspecified two-body coupling when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticlesSection {
    pub count: usize,
    pub mass: f64,
}

impl Default for ParticlesSection {
    fn default() -> Self {
        Self { count: 1, mass: 1.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub chi1: f64,
    #[serde(default)]
    pub chi2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FinalStates {
    Keyword(String),
    List(Vec<[u32; 3]>),
}

impl Default for FinalStates {
    fn default() -> Self {
        FinalStates::Keyword("elastic".into())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesSection {
    /// Quantum numbers per axis; the ground state when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<[u32; 3]>,
    #[serde(default, rename = "final")]
    pub finals: FinalStates,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergiesSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl EnergiesSection {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    #[default]
    Series,
    ClosedForm,
    Oracle,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    #[default]
    Resolvent,
    SumOverStates,
}

fn default_order() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    #[serde(default)]
    pub kind: MethodKind,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub oracle: OracleKind,
}

impl Default for MethodSection {
    fn default() -> Self {
        Self { kind: MethodKind::Series, order: default_order(), oracle: OracleKind::Resolvent }
    }
}

fn default_points() -> usize {
    1024
}

fn default_guard() -> f64 {
    twophoton::oracle::DEFAULT_GUARD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_guard")]
    pub guard: f64,
    #[serde(default)]
    pub damping: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self { x_min: None, x_max: None, points: default_points(), guard: default_guard(), damping: 0.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub plot_script: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitsSection {
    pub hbar: f64,
    pub c: f64,
}

impl Default for UnitsSection {
    fn default() -> Self {
        Self { hbar: 1.0, c: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub potential: PotentialSection,
    #[serde(default)]
    pub particles: ParticlesSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub states: StatesSection,
    pub energies: EnergiesSection,
    #[serde(default)]
    pub method: MethodSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub units: UnitsSection,
}

impl ScanConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: ScanConfig = toml::from_str(text).map_err(|e| CliError::Validation(e.message().to_string() + &span_hint(&e)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn need(&self, v: &Option<Num>, field: &str) -> CliResult<Rational> {
        match v {
            Some(n) => n.to_rational(&format!("potential.{field}")),
            None => invalid(format!("potential.{field} is required for kind {:?}", self.potential.kind)),
        }
    }

    fn positive(&self, v: &Option<Num>, field: &str) -> CliResult<Rational> {
        let r = self.need(v, field)?;
        if r <= Rational::from_integer(0.into()) {
            return invalid(format!("potential.{field} must be positive"));
        }
        Ok(r)
    }

    /// Symbolic model with every numeric parameter inlined.
    pub fn model(&self) -> CliResult<PotentialModel> {
        let p = &self.potential;
        let zero = || Coefficient::zero();
        Ok(match p.kind {
            PotentialKind::Box => {
                let a = self.positive(&p.size, "size")?;
                PotentialModel::ConstantBox { size: [a.clone(), a.clone(), a] }
            }
            PotentialKind::Linear => {
                let b = Coefficient::rational(self.positive(&p.slope, "slope")?);
                PotentialModel::SymmetricLinear { slopes: [b.clone(), b.clone(), b] }
            }
            PotentialKind::Harmonic => {
                let c = match &p.center {
                    Some(c) => Coefficient::rational(c.to_rational("potential.center")?),
                    None => zero(),
                };
                PotentialModel::Harmonic {
                    omega: Coefficient::rational(self.positive(&p.omega, "omega")?),
                    displacement: [c, zero(), zero()],
                }
            }
            PotentialKind::Morse => PotentialModel::Morse {
                depth: Coefficient::rational(self.positive(&p.depth, "depth")?),
                width: self.positive(&p.width, "width")?,
                equilibrium: match &p.center {
                    Some(c) => c.to_rational("potential.center")?,
                    None => Rational::from_integer(0.into()),
                },
                transverse: "spectator".into(),
            },
            PotentialKind::CoupledHarmonic => PotentialModel::CoupledHarmonicPair {
                omega: Coefficient::rational(self.positive(&p.omega, "omega")?),
                coupling: match &p.kappa {
                    Some(k) => Coupling::HarmonicCoupling { kappa: Coefficient::rational(k.to_rational("potential.kappa")?) },
                    None => Coupling::AbstractTwoBody { name: "V".into() },
                },
            },
        })
    }

    /// Unit bindings for `hbar`, `c` and the mass.
    pub fn bindings(&self) -> CliResult<Bindings> {
        let r = |x: f64, f: &str| Num::Float(x).to_rational(f);
        Ok([
            (HBAR, r(self.units.hbar, "units.hbar")?),
            (LIGHT_SPEED, r(self.units.c, "units.c")?),
            (twophoton::models::MASS, r(self.particles.mass, "particles.mass")?),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect())
    }

    pub fn geometry(&self) -> CliResult<ScatteringGeometry> {
        let g = &self.geometry;
        ScatteringGeometry::new(g.theta, g.chi1, g.chi2).map_err(|e| CliError::Validation(format!("geometry: {e}")))
    }

    pub fn ground(&self) -> [u32; 3] {
        match self.potential.kind {
            PotentialKind::Box => [1, 1, 1],
            _ => [0, 0, 0],
        }
    }

    pub fn initial(&self) -> [u32; 3] {
        self.states.initial.unwrap_or_else(|| self.ground())
    }

    pub fn finals(&self) -> Vec<[u32; 3]> {
        match &self.states.finals {
            FinalStates::Keyword(_) => vec![self.initial()],
            FinalStates::List(l) => l.clone(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let e = &self.energies;
        if !(e.min > 0.0) {
            return invalid("energies.min must be positive");
        }
        if !(e.max > e.min) {
            return invalid("energies.max must exceed energies.min");
        }
        if e.points < 2 {
            return invalid("energies.points must be at least 2");
        }
        if self.method.order == 0 {
            return invalid("method.order must be at least 1");
        }
        if !(self.units.hbar > 0.0 && self.units.c > 0.0) {
            return invalid("units.hbar and units.c must be positive");
        }
        if !(self.particles.mass > 0.0) {
            return invalid("particles.mass must be positive");
        }
        if !(self.numerics.guard > 0.0) || self.numerics.damping < 0.0 {
            return invalid("numerics.guard must be positive and numerics.damping non-negative");
        }
        if self.numerics.points < 8 {
            return invalid("numerics.points must be at least 8");
        }
        if let (Some(a), Some(b)) = (self.numerics.x_min, self.numerics.x_max) {
            if a >= b {
                return invalid("numerics.x_min must be below numerics.x_max");
            }
        }
        if let FinalStates::Keyword(k) = &self.states.finals {
            if k != "elastic" {
                return invalid(format!("states.final must be \"elastic\" or a list of quantum-number triples, got \"{k}\""));
            }
        }
        if let FinalStates::List(l) = &self.states.finals {
            if l.is_empty() {
                return invalid("states.final is an empty list");
            }
        }
        let model = self.model()?;
        let pair = self.potential.kind == PotentialKind::CoupledHarmonic;
        let want = if pair { 2 } else { 1 };
        if self.particles.count != want {
            return invalid(format!("particles.count must be {want} for potential kind {:?}", self.potential.kind));
        }
        if self.method.kind == MethodKind::ClosedForm && !model.is_harmonic_family() {
            return invalid("method.kind = \"closed-form\" needs a harmonic-family potential");
        }
        if pair && self.method.kind != MethodKind::ClosedForm {
            return invalid("the coupled harmonic pair is evaluated with method.kind = \"closed-form\" only");
        }
        let lowest = self.ground();
        for (what, q) in std::iter::once(("states.initial", self.initial())).chain(self.finals().into_iter().map(|f| ("states.final", f))) {
            for k in 0..3 {
                if q[k] < lowest[k] {
                    return invalid(format!("{what}: box quantum numbers start at 1, got {q:?}"));
                }
                if self.potential.kind == PotentialKind::Morse && k > 0 && q[k] != 0 {
                    return invalid(format!("{what}: Morse y and z axes are spectators and take quantum number 0, got {q:?}"));
                }
            }
        }
        let (eps1, eps2) = self.geometry()?.polarizations();
        let off_x = |e: [f64; 3]| e[1].abs() > 1e-12 || e[2].abs() > 1e-12;
        if self.potential.kind == PotentialKind::Morse && (off_x(eps1) || off_x(eps2)) {
            return invalid("geometry: the Morse target has dynamics only along x; both polarizations must lie along x (chi1 = chi2 = 0, theta = 0 or pi)");
        }
        model.validate(&self.bindings()?).map_err(|e| CliError::Validation(format!("potential: {e}")))?;
        Ok(())
    }
}

fn span_hint(e: &toml::de::Error) -> String {
    e.span().map(|s| format!(" (at byte {})", s.start)).unwrap_or_default()
}
