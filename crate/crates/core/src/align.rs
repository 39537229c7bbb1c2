//! Quantitative Kronecker approximation: simultaneous alignment of phases
//! `λ_n t ≈ η_n (mod 1)` over a finite window, the spacing constant `Λ` of
//! the frequencies, and the Fejér-kernel main term for `Re(e^{−iφ} log L)`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::lfunc::{LFunctionSpec, LfuncError, Progression};
use crate::numeric::{dist_to_int, pairwise_sum};

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("invalid alignment problem: {0}")]
    InvalidProblem(String),
    #[error("frequencies satisfy an integer relation with |u_n| <= {m}")]
    DependentFrequencies { m: u32 },
    #[error("Λ enumeration over {n} frequencies with M = {m} is too large and the frequencies are not log-primes")]
    TooLarge { n: usize, m: u32 },
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
}

/// `inf_t Σ ξ_n ‖λ_n t − η_n‖²` over `[t1, t2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentProblem {
    /// `λ_n`, in revolutions per unit of `t`.
    pub frequencies: Vec<f64>,
    /// `η_n`, in revolutions.
    pub phases: Vec<f64>,
    pub weights: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
    pub m: u32,
    /// Precomputed `Λ`; computed by [`lambda_min`] when absent.
    pub lambda: Option<LambdaMin>,
}

impl AlignmentProblem {
    pub fn new(
        frequencies: Vec<f64>,
        phases: Vec<f64>,
        weights: Vec<f64>,
        t1: f64,
        t2: f64,
        m: u32,
    ) -> Result<Self, AlignError> {
        let p = Self {
            frequencies,
            phases,
            weights,
            t1,
            t2,
            m,
            lambda: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AlignError> {
        let n = self.frequencies.len();
        if n == 0 || self.phases.len() != n || self.weights.len() != n {
            return Err(AlignError::InvalidProblem(format!(
                "need matching nonempty frequency/phase/weight lists, got {}/{}/{}",
                n,
                self.phases.len(),
                self.weights.len()
            )));
        }
        if self.frequencies.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(AlignError::InvalidProblem("frequencies must be positive".into()));
        }
        if self.weights.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(AlignError::InvalidProblem("weights must be positive".into()));
        }
        if self.phases.iter().any(|x| !x.is_finite()) {
            return Err(AlignError::InvalidProblem("phases must be finite".into()));
        }
        if !(self.t2 > self.t1) {
            return Err(AlignError::InvalidProblem(format!(
                "window [{}, {}] is empty",
                self.t1, self.t2
            )));
        }
        if self.m == 0 {
            return Err(AlignError::InvalidProblem("M must be positive".into()));
        }
        let mut sorted = self.frequencies.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(AlignError::InvalidProblem("frequencies must be distinct".into()));
        }
        Ok(())
    }

    pub fn objective(&self, t: f64) -> f64 {
        objective(&self.frequencies, &self.phases, &self.weights, t)
    }

    /// `Σ ξ_n λ_n`, a Lipschitz constant of the objective in `t`.
    pub fn lipschitz(&self) -> f64 {
        self.weights.iter().zip(&self.frequencies).map(|(x, l)| x * l).sum()
    }
}

fn objective(freqs: &[f64], phases: &[f64], weights: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for ((l, e), x) in freqs.iter().zip(phases).zip(weights) {
        let d = dist_to_int(l * t - e);
        acc += x * d * d;
    }
    acc
}

/// `Λ = min |Σ u_n λ_n|` over nonzero `u ∈ ℤ^N`, `|u_n| <= M`, or a lower bound for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaMin {
    pub value: f64,
    /// `log Λ`; finite even when `Λ` underflows.
    pub ln_value: f64,
    /// Set when `value` is the log-prime lower bound rather than the minimum.
    pub bound_mode: bool,
}

/// Largest `N` and `M` for exhaustive enumeration.
pub const MAX_ENUM_N: usize = 8;
pub const MAX_ENUM_M: u32 = 4;

/// The primes `p` with `λ = log p / (2π)`, if every frequency has that form.
pub fn log_prime_structure(freqs: &[f64]) -> Option<Vec<u64>> {
    freqs
        .iter()
        .map(|&l| {
            let x = (2.0 * PI * l).exp();
            if !(x.is_finite() && x < 1e15) {
                return None;
            }
            let p = x.round() as u64;
            let exact = (p as f64).ln() / (2.0 * PI);
            (is_prime(p) && (exact - l).abs() <= 1e-12 * l.max(1.0)).then_some(p)
        })
        .collect()
}

pub fn lambda_min(freqs: &[f64], m: u32) -> Result<LambdaMin, AlignError> {
    if freqs.is_empty() || m == 0 {
        return Err(AlignError::InvalidProblem("Λ needs frequencies and M >= 1".into()));
    }
    let n = freqs.len();
    if n == 1 {
        // only multiples of one frequency
        let value = freqs[0].abs();
        return Ok(LambdaMin {
            value,
            ln_value: value.ln(),
            bound_mode: false,
        });
    }
    if n <= MAX_ENUM_N && m <= MAX_ENUM_M {
        let best = enumerate_min(freqs, m);
        // relations that only fail by rounding count as relations
        let scale: f64 = freqs.iter().map(|l| l.abs()).sum::<f64>() * m as f64;
        if best <= 8.0 * f64::EPSILON * scale {
            return Err(AlignError::DependentFrequencies { m });
        }
        return Ok(LambdaMin {
            value: best,
            ln_value: best.ln(),
            bound_mode: false,
        });
    }
    match log_prime_structure(freqs) {
        Some(primes) => {
            // |Σ u_p log p| = |log(A/B)| with A, B <= (max p)^{MN}, so it is at least (max p)^{−MN}
            let max_p = *primes.iter().max().expect("nonempty");
            let ln_value = -(m as f64) * n as f64 * (max_p as f64).ln() - (2.0 * PI).ln();
            Ok(LambdaMin {
                value: ln_value.exp(),
                ln_value,
                bound_mode: true,
            })
        }
        None => Err(AlignError::TooLarge { n, m }),
    }
}

/// Exhaustive minimum over vectors whose first nonzero entry is positive.
fn enumerate_min(freqs: &[f64], m: u32) -> f64 {
    let n = freqs.len();
    let m = m as i64;
    let width = (2 * m + 1) as usize;
    let mut best = f64::INFINITY;
    for first in 0..n {
        let tail = &freqs[first + 1..];
        let total = width.pow(tail.len() as u32);
        for lead in 1..=m {
            let base = lead as f64 * freqs[first];
            let mut u = vec![-m; tail.len()];
            for _ in 0..total {
                let mut acc = base;
                for (k, l) in u.iter().zip(tail) {
                    acc += *k as f64 * l;
                }
                best = best.min(acc.abs());
                for slot in u.iter_mut() {
                    *slot += 1;
                    if *slot <= m {
                        break;
                    }
                    *slot = -m;
                }
            }
        }
    }
    best
}

/// Right-hand side `(1/4) Σ ξ_n (sin²(π/(2(M+1))) + M^N/(π(T₂−T₁)Λ))`.
pub fn chen_bound(problem: &AlignmentProblem) -> Result<f64, AlignError> {
    problem.validate()?;
    let lambda = match problem.lambda {
        Some(l) => l,
        None => lambda_min(&problem.frequencies, problem.m)?,
    };
    if lambda.value == 0.0 && lambda.ln_value == f64::NEG_INFINITY {
        return Err(AlignError::DependentFrequencies { m: problem.m });
    }
    Ok(chen_bound_with(problem, lambda))
}

fn chen_bound_with(problem: &AlignmentProblem, lambda: LambdaMin) -> f64 {
    let n = problem.frequencies.len() as f64;
    let m = problem.m as f64;
    let first = (PI / (2.0 * (m + 1.0))).sin().powi(2);
    let ln_second = n * m.ln() - PI.ln() - (problem.t2 - problem.t1).ln() - lambda.ln_value;
    0.25 * pairwise_sum(&problem.weights) * (first + ln_second.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub t_star: f64,
    pub objective: f64,
    pub chen_bound: f64,
    pub lambda_min: LambdaMin,
    pub grid_step: f64,
    pub grid_count: usize,
    pub lipschitz: f64,
}

/// Sweep chunk length.
const SWEEP_CHUNK: usize = 1 << 14;

/// Minimum of the objective over the grid `t1 + k·h` (`h <= grid_step`)
/// covering `[t1, t2]`; ties go to the lowest `t`.
pub fn align_search(problem: &AlignmentProblem, grid_step: f64) -> Result<AlignmentResult, AlignError> {
    problem.validate()?;
    let max_freq = problem.frequencies.iter().copied().fold(0.0, f64::max);
    if !(grid_step > 0.0 && grid_step <= 1.0 / (4.0 * max_freq)) {
        return Err(AlignError::InvalidProblem(format!(
            "grid step {grid_step} must lie in (0, 1/(4·max λ)] = (0, {}]",
            1.0 / (4.0 * max_freq)
        )));
    }
    let lambda = match problem.lambda {
        Some(l) => l,
        None => lambda_min(&problem.frequencies, problem.m)?,
    };
    let prog = Progression::covering(problem.t1, problem.t2, grid_step);
    let (t_star, obj) = grid_argmin(problem, prog);
    Ok(AlignmentResult {
        t_star,
        objective: obj,
        chen_bound: chen_bound_with(problem, lambda),
        lambda_min: lambda,
        grid_step: prog.step,
        grid_count: prog.count,
        lipschitz: problem.lipschitz(),
    })
}

/// Lowest-`t` minimizer of the objective over `prog`.
pub fn grid_argmin(problem: &AlignmentProblem, prog: Progression) -> (f64, f64) {
    let starts: Vec<usize> = (0..prog.count).step_by(SWEEP_CHUNK).collect();
    let best: Vec<(usize, f64)> = starts
        .par_iter()
        .map(|&k0| {
            let k1 = (k0 + SWEEP_CHUNK).min(prog.count);
            let mut best = (k0, f64::INFINITY);
            for k in k0..k1 {
                let v = problem.objective(prog.point(k));
                if v < best.1 {
                    best = (k, v);
                }
            }
            best
        })
        .collect();
    let (k, v) = best
        .into_iter()
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    (prog.point(k), v)
}

/// Main term `(1/2) Re Σ_{|log(n/x)|<1} b_L(n) n^{−s₀} e^{−iφ} (1 − |log(n/x)|)`
/// and the unscaled error size `x(τ + log t₀)/τ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionBound {
    pub main: f64,
    pub error_scale: f64,
    pub terms: usize,
}

pub fn convol_lower_bound(
    spec: &LFunctionSpec,
    s0: Complex64,
    tau: f64,
    x: f64,
    phi: f64,
) -> Result<ConvolutionBound, AlignError> {
    if !(x > 0.0) {
        return Err(AlignError::InvalidProblem(format!("x = {x} must be positive")));
    }
    let lo = ((x / E).floor() as u64 + 1).max(2);
    let hi = (E * x).ceil() as u64;
    let rot = Complex64::from_polar(1.0, -phi);
    let mut parts = Vec::new();
    for n in lo..=hi {
        let d = (n as f64 / x).ln().abs();
        if d >= 1.0 {
            continue;
        }
        let b = spec.b(n)?;
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        let ns = (-s0 * (n as f64).ln()).exp();
        parts.push(0.5 * (b * ns * rot).re * (1.0 - d));
    }
    let t0 = s0.im.abs().max(E);
    Ok(ConvolutionBound {
        main: pairwise_sum(&parts),
        error_scale: if tau > 0.0 { x * (tau + t0.ln()) / (tau * tau) } else { f64::INFINITY },
        terms: parts.len(),
    })
}
