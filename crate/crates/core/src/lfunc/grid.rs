use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::riemann_siegel::{riemann_siegel_theta, rs_remainder, RS_MIN_HEIGHT};
use super::zeta::{em_length, em_tail};
use super::{evaluate_l, LFunctionKind, LFunctionSpec, LfuncError};

/// Points `start + k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Progression {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        Self { start, step, count }
    }

    /// Covers `[lo, hi]` with spacing at most `max_step`.
    pub fn covering(lo: f64, hi: f64, max_step: f64) -> Self {
        let intervals = ((hi - lo) / max_step).ceil().max(1.0) as usize;
        Self {
            start: lo,
            step: (hi - lo) / intervals as f64,
            count: intervals + 1,
        }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count.saturating_sub(1))
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

/// Points per chunk; phasors are recomputed from scratch at each chunk start.
const RESYNC: usize = 1024;

/// `Σ_n c_n e^{−i t f_n}` over an arithmetic progression of `t`, advancing
/// each phasor by the fixed factor `e^{−i·step·f_n}` between points.
#[derive(Debug, Clone, Copy)]
pub struct ProgressionSum<'a> {
    coeffs: &'a [Complex64],
    freqs: &'a [f64],
}

impl<'a> ProgressionSum<'a> {
    pub fn new(coeffs: &'a [Complex64], freqs: &'a [f64]) -> Self {
        assert_eq!(coeffs.len(), freqs.len(), "one frequency per coefficient");
        Self { coeffs, freqs }
    }

    pub fn evaluate(&self, prog: Progression) -> Vec<Complex64> {
        self.evaluate_prefix(prog, |_| self.coeffs.len())
    }

    /// Like [`evaluate`](Self::evaluate) but summing only the first `len(t)`
    /// terms at each point.
    pub fn evaluate_prefix<F>(&self, prog: Progression, len: F) -> Vec<Complex64>
    where
        F: Fn(f64) -> usize + Sync,
    {
        let chunks: Vec<usize> = (0..prog.count).step_by(RESYNC).collect();
        let parts: Vec<Vec<Complex64>> = chunks
            .par_iter()
            .map(|&k0| {
                let k1 = (k0 + RESYNC).min(prog.count);
                let t0 = prog.point(k0);
                let mut phasors: Vec<Complex64> = self
                    .coeffs
                    .iter()
                    .zip(self.freqs)
                    .map(|(c, f)| c * Complex64::from_polar(1.0, -t0 * f))
                    .collect();
                let steps: Vec<Complex64> = self
                    .freqs
                    .iter()
                    .map(|f| Complex64::from_polar(1.0, -prog.step * f))
                    .collect();
                (k0..k1)
                    .map(|k| {
                        let n = len(prog.point(k)).min(phasors.len());
                        let sum: Complex64 = phasors[..n].iter().sum();
                        for (z, d) in phasors.iter_mut().zip(&steps) {
                            *z *= d;
                        }
                        sum
                    })
                    .collect()
            })
            .collect();
        parts.into_iter().flatten().collect()
    }
}

fn zeta_rs_grid(prog: Progression) -> Vec<Complex64> {
    let tau_max = prog.end().max(prog.start) / (2.0 * PI);
    let n_max = tau_max.sqrt().floor() as usize;
    let coeffs: Vec<Complex64> = (1..=n_max)
        .map(|n| Complex64::new(1.0 / (n as f64).sqrt(), 0.0))
        .collect();
    let freqs: Vec<f64> = (1..=n_max).map(|n| (n as f64).ln()).collect();
    let sums = ProgressionSum::new(&coeffs, &freqs)
        .evaluate_prefix(prog, |t| (t / (2.0 * PI)).sqrt().floor() as usize);
    sums.into_par_iter()
        .enumerate()
        .map(|(k, s)| {
            let t = prog.point(k);
            let theta = riemann_siegel_theta(t);
            let rot = Complex64::from_polar(1.0, theta);
            let z = 2.0 * (rot * s).re + rs_remainder(t).0;
            rot.conj() * z
        })
        .collect()
}

fn zeta_em_grid(sigma: f64, prog: Progression) -> Vec<Complex64> {
    let t_max = prog.start.abs().max(prog.end().abs());
    let n = em_length(Complex64::new(sigma, t_max));
    let coeffs: Vec<Complex64> = (1..n)
        .map(|k| Complex64::new((k as f64).powf(-sigma), 0.0))
        .collect();
    let freqs: Vec<f64> = (1..n).map(|k| (k as f64).ln()).collect();
    let heads = ProgressionSum::new(&coeffs, &freqs).evaluate(prog);
    heads
        .into_par_iter()
        .enumerate()
        .map(|(k, head)| {
            let s = Complex64::new(sigma, prog.point(k));
            head + em_tail(s, n as f64).0 + (s - 1.0).inv()
        })
        .collect()
}

/// `L(σ + it)` at every point of `prog`.
///
/// ζ uses phasor recurrences (Riemann–Siegel on the critical line above
/// `RS_MIN_HEIGHT`, Euler–Maclaurin otherwise); other specs are evaluated
/// pointwise in parallel.
pub fn evaluate_on_progression(
    spec: &LFunctionSpec,
    sigma: f64,
    prog: Progression,
) -> Result<Vec<Complex64>, LfuncError> {
    if prog.count == 0 {
        return Ok(Vec::new());
    }
    let lo = prog.start.min(prog.end());
    let crosses_pole = sigma == 1.0 && lo <= 0.0 && prog.start.max(prog.end()) >= 0.0;
    if let LFunctionKind::Zeta = spec.kind() {
        if !crosses_pole {
            if sigma == 0.5 && lo >= RS_MIN_HEIGHT {
                return Ok(zeta_rs_grid(prog));
            }
            if lo > 0.0 && prog.count >= 64 {
                return Ok(zeta_em_grid(sigma, prog));
            }
        }
    }
    (0..prog.count)
        .into_par_iter()
        .map(|k| evaluate_l(spec, Complex64::new(sigma, prog.point(k))).map(|e| e.value))
        .collect()
}
