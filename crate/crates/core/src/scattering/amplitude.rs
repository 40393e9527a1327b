use num_complex::Complex64;

use super::geometry::{PhotonPair, ScatteringGeometry};
use crate::models::Hamiltonian;
use crate::numerics::Element;
use crate::opalg::{Axis, Bindings, Coefficient, Coord, OperatorExpr, LIGHT_SPEED};
use crate::series::{closure_of, expr_center_of_mass_only, reduce_to_center_of_mass, ScatteringOperatorSequence};
use crate::{Error, Result};

type C = Complex64;

/// `<f|X|i>` for the chosen pair of target states.
pub type ElementFn<'a> = dyn Fn(&OperatorExpr) -> Result<Element> + 'a;

/// Thomson term, both second-order terms, the total and partial sums.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeBreakdown {
    pub thomson: C,
    pub a12: C,
    pub a21: C,
    pub total: C,
    /// `M^(n)` for `n = 0..=orders`; only `M^(0)` for closed forms.
    pub partials: Vec<C>,
    pub particles: usize,
    pub mass: f64,
    /// Pole-softening width added to photon energies; zero unless requested.
    pub damping: f64,
    pub sign_warning: bool,
}

fn total_momentum(particles: usize, j: Axis) -> OperatorExpr {
    (0..particles).map(|t| OperatorExpr::momentum(Coord::new(t, j))).sum()
}

fn bound(b: &Bindings, name: &str) -> Result<f64> {
    Ok(Coefficient::param(name).evaluate(b)?.re)
}

fn common(h: &Hamiltonian, b: &Bindings) -> Result<(f64, f64)> {
    let m = h.masses()[0].evaluate(b)?.re;
    if h.masses().iter().any(|x| x != &h.masses()[0]) {
        return Err(Error::Unsupported("amplitudes assume particles of equal mass".into()));
    }
    Ok((m, bound(b, LIGHT_SPEED)?))
}

fn check_seed(eps1: &[f64; 3], seeded: &[bool; 3]) -> Result<()> {
    for k in 0..3 {
        if eps1[k].abs() > 1e-15 && !seeded[k] {
            return Err(Error::Unsupported(format!(
                "incident polarization has a {} component but no operators were prepared on that axis",
                Axis::ALL[k].name()
            )));
        }
    }
    Ok(())
}

/// Truncated series with precomputed `g_k(j, l) = <f|P_j O_k^(l)|i>`.
#[derive(Clone, Debug)]
pub struct SeriesAmplitude {
    g: Vec<[[C; 3]; 3]>,
    overlap: C,
    seeded: [bool; 3],
    particles: usize,
    mass: f64,
    light_speed: f64,
    sign_warning: bool,
}

impl SeriesAmplitude {
    /// `seed_axes` lists the axes on which the incident polarization may
    /// have components.
    pub fn new(h: &Hamiltonian, orders: usize, seed_axes: &[Axis], b: &Bindings, elem: &ElementFn) -> Result<Self> {
        if orders == 0 {
            return Err(Error::Domain("series order must be at least 1".into()));
        }
        let (mass, light_speed) = common(h, b)?;
        let particles = h.particle_count();
        let mut g = vec![[[C::new(0.0, 0.0); 3]; 3]; orders];
        let mut seeded = [false; 3];
        let mut sign_warning = false;
        for &l in seed_axes {
            seeded[l.index()] = true;
            let mut seq = ScatteringOperatorSequence::along(h, l)?;
            for k in 1..=orders {
                let o = seq.order(k).clone();
                if o.is_zero() {
                    break;
                }
                for j in Axis::ALL {
                    let e = elem(&(&total_momentum(particles, j) * &o))?;
                    sign_warning |= e.sign_warning;
                    g[k - 1][j.index()][l.index()] = e.value;
                }
            }
        }
        let ov = elem(&OperatorExpr::identity())?;
        Ok(Self { g, overlap: ov.value, seeded, particles, mass, light_speed, sign_warning: sign_warning || ov.sign_warning })
    }

    pub fn orders(&self) -> usize {
        self.g.len()
    }

    pub fn overlap(&self) -> C {
        self.overlap
    }

    /// `(sum ε2_j ε1_l g_k, sum ε1_j ε2_l g_k)` per order.
    fn contracted(&self, eps1: &[f64; 3], eps2: &[f64; 3]) -> Vec<(C, C)> {
        self.g
            .iter()
            .map(|gk| {
                let mut a = C::new(0.0, 0.0);
                let mut b = C::new(0.0, 0.0);
                for j in 0..3 {
                    for l in 0..3 {
                        a += gk[j][l] * eps2[j] * eps1[l];
                        b += gk[j][l] * eps1[j] * eps2[l];
                    }
                }
                (a, b)
            })
            .collect()
    }

    /// Per-order terms of `A12` and `A21`.
    pub fn order_terms(&self, geom: &ScatteringGeometry, photons: &PhotonPair, damping: f64) -> Result<Vec<(C, C)>> {
        let (eps1, eps2) = geom.polarizations();
        check_seed(&eps1, &self.seeded)?;
        let z1 = C::new(photons.e1, damping);
        let z2 = -C::new(photons.e2, damping);
        if z2.norm() == 0.0 {
            return Err(Error::Resonance(format!("E2 = 0: the series pole at E1 = {}", photons.e1)));
        }
        Ok(self
            .contracted(&eps1, &eps2)
            .into_iter()
            .enumerate()
            .map(|(k, (g12, g21))| {
                let n = (k + 1) as i32;
                (g12 / z1.powi(n) / self.light_speed, g21 / z2.powi(n) / self.light_speed)
            })
            .collect())
    }

    pub fn breakdown(&self, geom: &ScatteringGeometry, photons: &PhotonPair, damping: f64) -> Result<AmplitudeBreakdown> {
        let terms = self.order_terms(geom, photons, damping)?;
        let thomson = self.overlap * (self.particles as f64 * geom.eps_dot());
        let mut partials = vec![thomson];
        let (mut a12, mut a21) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
        for (t12, t21) in terms {
            a12 += t12;
            a21 += t21;
            partials.push(thomson - (a12 + a21) / self.mass);
        }
        Ok(AmplitudeBreakdown {
            thomson,
            a12,
            a21,
            total: *partials.last().expect("at least one order"),
            partials,
            particles: self.particles,
            mass: self.mass,
            damping,
            sign_warning: self.sign_warning,
        })
    }
}

/// Resummed amplitude for Hamiltonians with `[H,[H,O1]] = λ O1`.
///
/// For two-particle targets the operators are rewritten in center-of-mass
/// variables and `elem` must evaluate them on center-of-mass states
/// (particle index 0, mass `2m`).
#[derive(Clone, Debug)]
pub struct ClosedFormAmplitude {
    lambda: f64,
    h1: [[C; 3]; 3],
    h2: [[C; 3]; 3],
    overlap: C,
    seeded: [bool; 3],
    particles: usize,
    mass: f64,
    light_speed: f64,
    guard: f64,
}

impl ClosedFormAmplitude {
    pub fn new(h: &Hamiltonian, seed_axes: &[Axis], b: &Bindings, elem: &ElementFn) -> Result<Self> {
        let (mass, light_speed) = common(h, b)?;
        let particles = h.particle_count();
        if particles > 2 {
            return Err(Error::Unsupported("closed forms handle one or two particles".into()));
        }
        let mut h1 = [[C::new(0.0, 0.0); 3]; 3];
        let mut h2 = h1;
        let mut seeded = [false; 3];
        let mut lambda: Option<f64> = None;
        for &l in seed_axes {
            seeded[l.index()] = true;
            let mut seq = ScatteringOperatorSequence::along(h, l)?;
            let lam = closure_of(&mut seq)?
                .ok_or_else(|| Error::NotRepresentable("the double commutator does not close; use the series or an oracle".into()))?;
            let lam = lam.evaluate(b)?.re;
            match lambda {
                Some(prev) if (prev - lam).abs() > 1e-12 * prev.abs() => {
                    return Err(Error::Unsupported("axes with different closure constants".into()))
                }
                _ => lambda = Some(lam),
            }
            let mut o1 = seq.order(1).clone();
            let mut o2 = seq.order(2).clone();
            if particles == 2 {
                if !expr_center_of_mass_only(&o1) || !expr_center_of_mass_only(&o2) {
                    return Err(Error::Unsupported("transition operator has relative-coordinate content".into()));
                }
                o1 = reduce_to_center_of_mass(&o1)?;
                o2 = reduce_to_center_of_mass(&o2)?;
            }
            for j in Axis::ALL {
                let pj = OperatorExpr::momentum(Coord::new(0, j));
                h1[j.index()][l.index()] = elem(&(&pj * &o1))?.value;
                h2[j.index()][l.index()] = elem(&(&pj * &o2))?.value;
            }
        }
        let lambda = lambda.ok_or_else(|| Error::Domain("no seed axes".into()))?;
        let overlap = elem(&OperatorExpr::identity())?.value;
        Ok(Self { lambda, h1, h2, overlap, seeded, particles, mass, light_speed, guard: 1e-12 })
    }

    /// `λ = (hbar ω)²` for oscillators.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(1/c) Σ ε_a,j ε_b,l (±z h1 + h2)/(z² − λ)`
    fn resolvent(&self, z: C, sign: f64, eps_a: &[f64; 3], eps_b: &[f64; 3]) -> Result<C> {
        let den = z * z - self.lambda;
        if den.norm() <= self.guard * self.lambda.abs().max(1.0) {
            return Err(Error::Resonance(format!("photon energy {} sits on the pole E^2 = {}", z.re, self.lambda)));
        }
        let mut s = C::new(0.0, 0.0);
        for j in 0..3 {
            for l in 0..3 {
                s += (sign * z * self.h1[j][l] + self.h2[j][l]) * eps_a[j] * eps_b[l];
            }
        }
        Ok(s / den / self.light_speed)
    }

    pub fn breakdown(&self, geom: &ScatteringGeometry, photons: &PhotonPair, damping: f64) -> Result<AmplitudeBreakdown> {
        let (eps1, eps2) = geom.polarizations();
        check_seed(&eps1, &self.seeded)?;
        let a12 = self.resolvent(C::new(photons.e1, damping), 1.0, &eps2, &eps1)?;
        let a21 = self.resolvent(C::new(photons.e2, damping), -1.0, &eps1, &eps2)?;
        let thomson = self.overlap * (self.particles as f64 * geom.eps_dot());
        let total = thomson - (a12 + a21) / self.mass;
        Ok(AmplitudeBreakdown {
            thomson,
            a12,
            a21,
            total,
            partials: vec![thomson],
            particles: self.particles,
            mass: self.mass,
            damping,
            sign_warning: false,
        })
    }
}

/// `M = (ε1·ε2)(1 + (hbar ω)²/(E² − (hbar ω)²))` for Rayleigh scattering off
/// the oscillator ground state.
pub fn harmonic_rayleigh_closed(e: f64, hbar_omega: f64, geom: &ScatteringGeometry) -> Result<C> {
    if e < 0.0 {
        return Err(Error::Domain(format!("photon energy must be non-negative, got {e}")));
    }
    let w2 = hbar_omega * hbar_omega;
    let den = e * e - w2;
    if den.abs() <= 1e-12 * w2 {
        return Err(Error::Resonance(format!("E = {e} is the oscillator pole")));
    }
    Ok(C::new(geom.eps_dot() * (1.0 + w2 / den), 0.0))
}

/// `r_e² (E2/E1) |M|²`
pub fn differential_cross_section(m: C, photons: &PhotonPair, r_e: f64) -> f64 {
    r_e * r_e * (photons.e2 / photons.e1) * m.norm_sqr()
}
