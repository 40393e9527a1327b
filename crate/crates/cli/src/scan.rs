//! Energy scans: one row per (final state, photon energy).

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use twophoton::models::{AxisPotential, Hamiltonian};
use twophoton::numerics::{
    apply_operator, ladder::fock_state, product_matrix_element, AxisState, EigenPair, Grid1D, GridHamiltonian,
    Oscillator, ProductState,
};
use twophoton::opalg::{Axis, Bindings, Coefficient, Coord, OperatorExpr};
use twophoton::oracle::{AxisOracle, OracleMethod, SeparableOracle};
use twophoton::scattering::{ClosedFormAmplitude, PhotonPair, ScatteringGeometry, SeriesAmplitude};
use twophoton::Error;

use crate::config::{MethodKind, OracleKind, PotentialKind, ScanConfig};
use crate::error::{CliError, CliResult};

type C = Complex64;

/// Most levels kept per axis for resonance flagging.
const MAX_LEVELS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub e1: f64,
    pub e2: f64,
    pub final_state: String,
    pub m: C,
    pub orders: Vec<f64>,
    pub oracle: Option<C>,
    pub flag: String,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub config: ScanConfig,
    pub orders: usize,
    pub with_oracle: bool,
    pub rows: Vec<Row>,
}

struct AxisData {
    levels: Vec<EigenPair>,
    hamiltonian: GridHamiltonian,
}

struct Channel {
    label: String,
    e_res: f64,
    f: ProductState,
    series: Option<SeriesAmplitude>,
    closed: Option<ClosedFormAmplitude>,
}

struct Scenario {
    geometry: ScatteringGeometry,
    method: MethodKind,
    damping: f64,
    oracle: Option<(SeparableOracle, OracleMethod)>,
    i: ProductState,
    channels: Vec<Channel>,
    /// `E1` values where a dipole-coupled intermediate state is on shell.
    poles_e1: Vec<f64>,
    /// `E2` values where the crossed term is on shell.
    poles_e2: Vec<f64>,
}

fn level_index(kind: PotentialKind, q: u32) -> usize {
    match kind {
        PotentialKind::Box => q as usize - 1,
        _ => q as usize,
    }
}

fn default_grid(cfg: &ScanConfig, pot: &AxisPotential, highest: usize) -> CliResult<Grid1D> {
    let n = cfg.numerics.points;
    let (m, hbar) = (cfg.particles.mass, cfg.units.hbar);
    let (lo, hi) = match *pot {
        AxisPotential::Box { half_width } => return Ok(Grid1D::symmetric(half_width, n)?),
        AxisPotential::Harmonic { stiffness, center } => {
            let l = (hbar / (m * (stiffness / m).sqrt())).sqrt();
            let w = l * (12.0 + 2.0 * (highest as f64).sqrt());
            (center - w, center + w)
        }
        AxisPotential::Linear { slope } => {
            let l = (hbar * hbar / (m * slope)).cbrt();
            let w = l * (30.0 + 4.0 * (highest as f64).powf(2.0 / 3.0));
            (-w, w)
        }
        AxisPotential::Morse { width, center, .. } => (center - 3.0 / width, center + 25.0 / width),
        AxisPotential::Spectator => unreachable!("spectator axes carry no grid"),
    };
    Ok(Grid1D::new(cfg.numerics.x_min.unwrap_or(lo), cfg.numerics.x_max.unwrap_or(hi), n)?)
}

fn momentum(axis: Axis) -> OperatorExpr {
    OperatorExpr::momentum(Coord::new(0, axis))
}

impl Scenario {
    fn build(cfg: &ScanConfig) -> CliResult<Self> {
        let geometry = cfg.geometry()?;
        let b = cfg.bindings()?;
        let model = cfg.model()?;
        let mass = Coefficient::rational(cfg.bindings()?[twophoton::models::MASS].clone());
        let h = Hamiltonian::new(model.clone(), vec![mass.clone(); cfg.particles.count])?;
        let initial = cfg.initial();
        let finals = cfg.finals();
        let (eps1, eps2) = geometry.polarizations();
        if cfg.potential.kind == PotentialKind::CoupledHarmonic {
            return Self::build_pair(cfg, &h, &b, geometry);
        }
        let axes = model.axes().expect("single-particle model");
        let highest: Vec<u32> = (0..3).map(|k| finals.iter().map(|f| f[k]).chain([initial[k]]).max().unwrap_or(0)).collect();
        let e_max = cfg.energies.max;
        let mut data: Vec<Option<AxisData>> = Vec::new();
        for (k, am) in axes.iter().enumerate() {
            let pot = am.resolve(&mass, &b)?;
            if pot == AxisPotential::Spectator {
                data.push(None);
                continue;
            }
            let need = level_index(cfg.potential.kind, highest[k]) + 1;
            let gh = GridHamiltonian::new(&pot, cfg.particles.mass, cfg.units.hbar, default_grid(cfg, &pot, need)?)?;
            let mut levels = gh.lowest(need)?;
            let e_i = levels[level_index(cfg.potential.kind, initial[k])].energy;
            let covering = gh.band().count_below(e_i + 1.01 * e_max) + 1;
            if covering > levels.len() {
                levels = gh.lowest(covering.min(MAX_LEVELS).max(need))?;
            }
            data.push(Some(AxisData { levels, hamiltonian: gh }));
        }
        let state = |q: [u32; 3]| {
            ProductState::new([0, 1, 2].map(|k| match &data[k] {
                Some(d) => AxisState::Grid(d.levels[level_index(cfg.potential.kind, q[k])].state.clone()),
                None => AxisState::Spectator,
            }))
        };
        let energy = |q: [u32; 3]| -> f64 {
            (0..3).filter_map(|k| data[k].as_ref().map(|d| d.levels[level_index(cfg.potential.kind, q[k])].energy)).sum()
        };
        let i = state(initial);
        let seeded: Vec<Axis> = Axis::ALL.into_iter().filter(|a| data[a.index()].is_some()).collect();

        let (mut poles_e1, mut poles_e2) = (Vec::new(), Vec::new());
        for a in &seeded {
            let d = data[a.index()].as_ref().expect("seeded axis");
            let il = &d.levels[level_index(cfg.potential.kind, initial[a.index()])];
            let pi = apply_operator(&momentum(*a), &il.state, &b)?.state;
            let scale = pi.norm();
            let g = d.hamiltonian.grid();
            let pot = axes[a.index()].resolve(&mass, &b)?;
            let edge = match pot {
                AxisPotential::Box { .. } => f64::INFINITY,
                _ => pot.eval(g.x_min()).min(pot.eval(g.x_max())),
            };
            for nu in &d.levels {
                // discretized continuum levels are not poles
                if nu.energy >= edge || nu.state.inner(&pi)?.norm() <= 1e-3 * scale {
                    continue;
                }
                let gap = nu.energy - il.energy;
                if eps1[a.index()].abs() > 1e-12 && gap > 0.0 {
                    poles_e1.push(gap);
                }
                if eps2[a.index()].abs() > 1e-12 && gap < 0.0 {
                    poles_e2.push(-gap);
                }
            }
        }

        let want_series = matches!(cfg.method.kind, MethodKind::Series | MethodKind::All);
        let want_closed = cfg.method.kind == MethodKind::ClosedForm || (cfg.method.kind == MethodKind::All && model.is_harmonic_family());
        let mut channels = Vec::new();
        for q in finals {
            let f = state(q);
            let elem = |op: &OperatorExpr| product_matrix_element(&f, op, &i, &b);
            let series = if want_series { Some(SeriesAmplitude::new(&h, cfg.method.order, &seeded, &b, &elem)?) } else { None };
            let closed = if want_closed { Some(ClosedFormAmplitude::new(&h, &seeded, &b, &elem)?) } else { None };
            channels.push(Channel { label: label(q), e_res: energy(q) - energy(initial), f, series, closed });
        }

        let oracle = if matches!(cfg.method.kind, MethodKind::Oracle | MethodKind::All) {
            let method = match cfg.method.oracle {
                OracleKind::Resolvent => OracleMethod::Resolvent,
                OracleKind::SumOverStates => OracleMethod::SumOverStates,
            };
            let mut axes: [Option<AxisOracle>; 3] = [None, None, None];
            for (k, d) in data.into_iter().enumerate() {
                if let Some(d) = d {
                    axes[k] = Some(match method {
                        OracleMethod::Resolvent => AxisOracle::new(d.hamiltonian),
                        OracleMethod::SumOverStates => AxisOracle::with_full_basis(d.hamiltonian)?,
                    });
                }
            }
            let mut o = SeparableOracle::new(axes, cfg.particles.mass, b.clone())?;
            o.guard = cfg.numerics.guard;
            Some((o, method))
        } else {
            None
        };
        Ok(Self { geometry, method: cfg.method.kind, damping: cfg.numerics.damping, oracle, i, channels, poles_e1, poles_e2 })
    }

    /// Center-of-mass oscillator states for the coupled pair.
    fn build_pair(cfg: &ScanConfig, h: &Hamiltonian, b: &Bindings, geometry: ScatteringGeometry) -> CliResult<Self> {
        let omega = cfg.potential.omega.as_ref().expect("validated").to_f64("potential.omega")?;
        let osc = Oscillator { mass: 2.0 * cfg.particles.mass, omega, center: 0.0 };
        let state = |q: [u32; 3]| ProductState::new(q.map(|n| AxisState::Fock { amplitudes: fock_state(n as usize), oscillator: osc }));
        let initial = cfg.initial();
        let i = state(initial);
        let hw = cfg.units.hbar * omega;
        let (_, eps2) = geometry.polarizations();
        let excited = (0..3).any(|k| initial[k] > 0 && eps2[k].abs() > 1e-12);
        let mut channels = Vec::new();
        for q in cfg.finals() {
            let f = state(q);
            let elem = |op: &OperatorExpr| product_matrix_element(&f, op, &i, b);
            let closed = ClosedFormAmplitude::new(h, &Axis::ALL, b, &elem)?;
            let quanta = |q: [u32; 3]| q.iter().map(|&n| n as f64).sum::<f64>();
            channels.push(Channel { label: label(q), e_res: hw * (quanta(q) - quanta(initial)), f, series: None, closed: Some(closed) });
        }
        Ok(Self {
            geometry,
            method: MethodKind::ClosedForm,
            damping: cfg.numerics.damping,
            oracle: None,
            i,
            channels,
            poles_e1: vec![hw],
            poles_e2: if excited { vec![hw] } else { Vec::new() },
        })
    }

    fn orders(&self) -> usize {
        self.channels.first().and_then(|c| c.series.as_ref()).map_or(0, |s| s.orders())
    }

    fn row(&self, ch: &Channel, e1: f64, half_step: f64) -> CliResult<Row> {
        let nan = C::new(f64::NAN, f64::NAN);
        let e2 = e1 - ch.e_res;
        let mut row = Row {
            e1,
            e2,
            final_state: ch.label.clone(),
            m: nan,
            orders: vec![f64::NAN; self.orders()],
            oracle: self.oracle.as_ref().map(|_| nan),
            flag: String::new(),
        };
        let near = |poles: &[f64], e: f64| poles.iter().any(|p| (e - p).abs() <= half_step);
        // the series carries 1/E2^k
        if ch.series.is_some() && e2.abs() <= half_step {
            row.flag = "resonance".into();
            if e2 <= 0.0 {
                return Ok(row);
            }
        }
        if e2 <= 0.0 {
            row.flag = "closed".into();
            return Ok(row);
        }
        let mut resonant = !row.flag.is_empty() || near(&self.poles_e1, e1) || near(&self.poles_e2, e2);
        let photons = PhotonPair::new(e1, ch.e_res)?;
        let mut keep = |r: twophoton::Result<C>| -> CliResult<C> {
            match r {
                Ok(v) => Ok(v),
                Err(Error::Resonance(_)) => {
                    resonant = true;
                    Ok(nan)
                }
                Err(e) => Err(e.into()),
            }
        };
        let series = match &ch.series {
            Some(s) => Some(keep(s.breakdown(&self.geometry, &photons, self.damping).map(|b| {
                row.orders = b.partials[1..].iter().map(|m| m.norm_sqr()).collect();
                b.total
            }))?),
            None => None,
        };
        let closed = match &ch.closed {
            Some(c) => Some(keep(c.breakdown(&self.geometry, &photons, self.damping).map(|b| b.total))?),
            None => None,
        };
        let oracle = match &self.oracle {
            Some((o, method)) => Some(keep(o.breakdown(&ch.f, &self.i, &self.geometry, &photons, *method).map(|(b, _)| b.total))?),
            None => None,
        };
        row.m = match self.method {
            MethodKind::Series => series,
            MethodKind::ClosedForm => closed,
            MethodKind::Oracle => oracle,
            MethodKind::All => closed.or(series),
        }
        .unwrap_or(nan);
        if self.method == MethodKind::All {
            row.oracle = oracle;
        } else {
            row.oracle = None;
        }
        if resonant {
            row.flag = "resonance".into();
        }
        Ok(row)
    }
}

fn label(q: [u32; 3]) -> String {
    format!("{}.{}.{}", q[0], q[1], q[2])
}

/// Half the distance to the nearest neighbouring energy.
fn half_steps(e: &[f64]) -> Vec<f64> {
    (0..e.len())
        .map(|k| {
            let left = if k > 0 { e[k] - e[k - 1] } else { f64::INFINITY };
            let right = if k + 1 < e.len() { e[k + 1] - e[k] } else { f64::INFINITY };
            0.5 * left.min(right)
        })
        .collect()
}

pub fn run_scan(cfg: &ScanConfig) -> CliResult<Dataset> {
    cfg.validate()?;
    let sc = Scenario::build(cfg)?;
    let energies = cfg.energies.values();
    let halves = half_steps(&energies);
    let mut rows = Vec::with_capacity(energies.len() * sc.channels.len());
    for ch in &sc.channels {
        let part: Vec<Row> = energies.par_iter().zip(&halves).map(|(&e, &h)| sc.row(ch, e, h)).collect::<CliResult<_>>()?;
        rows.extend(part);
    }
    Ok(Dataset { config: cfg.clone(), orders: sc.orders(), with_oracle: sc.method == MethodKind::All, rows })
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

impl Dataset {
    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = ["E1", "E2", "final", "ReM", "ImM", "absM2"].map(String::from).to_vec();
        c.extend((1..=self.orders).map(|n| format!("absM2_n{n}")));
        if self.with_oracle {
            c.extend(["oracle_ReM", "oracle_ImM", "oracle_absM2"].map(String::from));
        }
        c.push("flag".into());
        c
    }

    /// Commented header: a summary line, then the configuration as TOML.
    pub fn header(&self) -> String {
        let d = self.config.numerics.damping;
        let mut s = format!(
            "# twophoton scan; damping: {}\n# configuration:\n",
            if d > 0.0 { format!("on (gamma = {d:e})") } else { "off".to_string() }
        );
        for line in self.config.to_toml().lines() {
            if line.is_empty() {
                s.push_str("#\n");
            } else {
                s.push_str(&format!("# {line}\n"));
            }
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> CliResult<()> {
        out.write_all(self.header().as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns())?;
        for r in &self.rows {
            let mut rec = vec![num(r.e1), num(r.e2), r.final_state.clone(), num(r.m.re), num(r.m.im), num(r.m.norm_sqr())];
            rec.extend(r.orders.iter().map(|&v| num(v)));
            if self.with_oracle {
                let o = r.oracle.unwrap_or(C::new(f64::NAN, f64::NAN));
                rec.extend([num(o.re), num(o.im), num(o.norm_sqr())]);
            }
            rec.push(r.flag.clone());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| CliError::Numerical(e.to_string()))
    }
}

/// Configuration echoed in a dataset header.
pub fn config_from_csv(text: &str) -> CliResult<ScanConfig> {
    let body: Vec<&str> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(2)
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect();
    ScanConfig::from_toml(&body.join("\n"))
}
