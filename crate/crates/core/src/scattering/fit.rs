use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawOrder {
    First,
    Second,
}

/// Fitted `c1`, `c2` of `σ = (E2/E1) |c1 (1/E2 − 1/E1) + c2 (1/E2² + 1/E1²)|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLawFit {
    pub c1: f64,
    pub c2: f64,
    /// `‖σ − model‖ / ‖σ‖`
    pub residual: f64,
    pub window: (f64, f64),
}

impl EnergyLawFit {
    pub fn model(&self, e1: f64, e_res: f64) -> f64 {
        let e2 = e1 - e_res;
        let amp = self.c1 * (1.0 / e2 - 1.0 / e1) + self.c2 * (1.0 / (e2 * e2) + 1.0 / (e1 * e1));
        e2 / e1 * amp * amp
    }
}

/// Least-squares fit of `(E1, σ)` samples above the resonance `e_res`.
/// `c1` is reported non-negative; `c2` carries the relative sign.
pub fn fit_energy_law(samples: &[(f64, f64)], e_res: f64, order: LawOrder) -> Result<EnergyLawFit> {
    if samples.len() < 8 {
        return Err(Error::Fit(format!("need at least 8 samples, got {}", samples.len())));
    }
    if let Some((e, _)) = samples.iter().find(|(e, _)| !(*e > e_res)) {
        return Err(Error::Fit(format!("sample at E = {e} is not above the resonance {e_res}")));
    }
    let cols = match order {
        LawOrder::First => 1,
        LawOrder::Second => 3,
    };
    let n = samples.len();
    let mut a = DMatrix::zeros(n, cols);
    let mut y = DVector::zeros(n);
    for (r, &(e1, s)) in samples.iter().enumerate() {
        let e2 = e1 - e_res;
        let w = e2 / e1;
        let g = 1.0 / e2 - 1.0 / e1;
        let h = 1.0 / (e2 * e2) + 1.0 / (e1 * e1);
        let row = [w * g * g, 2.0 * w * g * h, w * h * h];
        for c in 0..cols {
            a[(r, c)] = row[c];
        }
        y[r] = s;
    }
    // column scaling keeps the normal equations well conditioned
    let scales: Vec<f64> = (0..cols).map(|c| a.column(c).norm()).collect();
    if scales.iter().any(|&s| s == 0.0) {
        return Err(Error::Fit("degenerate energy window".into()));
    }
    for c in 0..cols {
        let s = scales[c];
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 1e-12 * smax {
        return Err(Error::Fit("singular normal equations: the window does not separate the terms".into()));
    }
    let q = svd.solve(&y, 1e-14 * smax).map_err(|e| Error::Fit(e.to_string()))?;
    let q: Vec<f64> = (0..cols).map(|c| q[c] / scales[c]).collect();
    let (c1, c2) = match order {
        LawOrder::First => (q[0].max(0.0).sqrt(), 0.0),
        LawOrder::Second => {
            let c1 = q[0].max(0.0).sqrt();
            let c2 = if c1 > 0.0 { q[1] / c1 } else { q[2].max(0.0).sqrt() };
            (c1, c2)
        }
    };
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let mut fit = EnergyLawFit { c1, c2, residual: 0.0, window: (lo, hi) };
    let num: f64 = samples.iter().map(|&(e, s)| (s - fit.model(e, e_res)).powi(2)).sum();
    let den: f64 = samples.iter().map(|&(_, s)| s * s).sum();
    fit.residual = (num / den).sqrt();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(c1: f64, c2: f64, e_res: f64) -> Vec<(f64, f64)> {
        let truth = EnergyLawFit { c1, c2, residual: 0.0, window: (0.0, 0.0) };
        (0..40).map(|k| 5.0 * e_res + k as f64 * e_res).map(|e| (e, truth.model(e, e_res))).collect()
    }

    #[test]
    fn first_order_recovers_c1() {
        let f = fit_energy_law(&synth(1.0, 0.0, 2.0), 2.0, LawOrder::First).unwrap();
        assert!((f.c1 - 1.0).abs() < 1e-6);
        assert!(f.residual < 1e-10);
    }

    #[test]
    fn second_order_recovers_signs() {
        for (c1, c2) in [(1.0, 0.3), (2.0, -0.5)] {
            let f = fit_energy_law(&synth(c1, c2, 1.0), 1.0, LawOrder::Second).unwrap();
            assert!((f.c1 - c1).abs() < 1e-6 && (f.c2 - c2).abs() < 1e-6, "{f:?}");
        }
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(fit_energy_law(&synth(1.0, 0.0, 2.0)[..5], 2.0, LawOrder::First).is_err());
        let mut s = synth(1.0, 0.0, 2.0);
        s[0].0 = 1.0;
        assert!(fit_energy_law(&s, 2.0, LawOrder::First).is_err());
    }
}
