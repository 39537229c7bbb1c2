//! Twisted moments `(1/T)∫ |L_π|^q |R|² w(t,T) dt`, the Montgomery–Vaughan
//! mean value of Dirichlet polynomials, and the off-line moment over a
//! certified zero-free window.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::arith::factorize;
use crate::lfunc::{
    evaluate_on_progression, fractional_coefficients, Exponent, LFunctionKind, LFunctionSpec, LfuncError,
    Progression,
};
use crate::numeric::{pairwise_sum, p_pow};
use crate::resonator::{evaluate_resonator_on_line, Resonator, ResonatorError, ResonatorKind};
use crate::search::GoodIntervalCertificate;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("invalid moment input: {0}")]
    InvalidInput(String),
    #[error("no zero-free certificate covers [{lo}, {hi}] at σ = {sigma} for {labels:?}")]
    Uncertified {
        labels: Vec<String>,
        sigma: f64,
        lo: f64,
        hi: f64,
    },
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Resonator(#[from] ResonatorError),
}

/// `w(t,T) = ∫_{6T/5}^{9T/5} e^{−(t−τ)²} dτ = (√π/2)(erf(9T/5 − t) − erf(6T/5 − t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightWindow {
    pub t: f64,
}

impl WeightWindow {
    pub fn new(t: f64) -> Self {
        Self { t }
    }

    pub fn lower(&self) -> f64 {
        1.2 * self.t
    }

    pub fn upper(&self) -> f64 {
        1.8 * self.t
    }

    pub fn value(&self, t: f64) -> f64 {
        weight_w(t, self.t)
    }

    /// `∫_ℝ w(t,T) dt = (3/5) T √π`.
    pub fn total_mass(&self) -> f64 {
        0.6 * self.t * PI.sqrt()
    }
}

/// The smooth window `w(t,T)`.
///
/// Written with `erfc` on the side of the window where `t` lies, so the
/// tails keep full relative precision until they underflow.
pub fn weight_w(t: f64, big_t: f64) -> f64 {
    let a = 1.8 * big_t - t;
    let b = 1.2 * big_t - t;
    let half_sqrt_pi = 0.5 * PI.sqrt();
    if b >= 0.0 {
        // t left of the window: erf(a) − erf(b) = erfc(b) − erfc(a)
        half_sqrt_pi * (erfc(b) - erfc(a))
    } else if a <= 0.0 {
        half_sqrt_pi * (erfc(-a) - erfc(-b))
    } else {
        half_sqrt_pi * (2.0 - erfc(a) - erfc(-b))
    }
}

/// Whether `w(t,T)` is below the smallest normal double (reported as 0 or subnormal).
pub fn weight_underflows(t: f64, big_t: f64) -> bool {
    weight_w(t, big_t) < f64::MIN_POSITIVE
}

/// Result of the Montgomery–Vaughan mean value computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    /// `∫_0^T |Σ a_n n^{-it}|² dt`, exact term-pair integration.
    pub integral: f64,
    /// `T Σ |a_n|²`.
    pub diagonal: f64,
    /// `Σ_{m≠n} 2|a_m a_n| / |log(m/n)|`.
    pub off_diagonal_bound: f64,
}

/// `∫_0^T |Σ a_n n^{-it}|² dt` for coefficients `a_n`, `n = 1..=len`.
pub fn mv_meanvalue(coeffs: &[Complex64], big_t: f64) -> MeanValue {
    let terms: Vec<(f64, Complex64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(i, a)| (((i + 1) as f64).ln(), *a))
        .collect();
    let diag: Vec<f64> = terms.iter().map(|(_, a)| a.norm_sqr()).collect();
    let diagonal = big_t * pairwise_sum(&diag);
    let mut pairs = Vec::new();
    let mut bound = Vec::new();
    for (i, (lm, am)) in terms.iter().enumerate() {
        for (ln_n, an) in &terms[i + 1..] {
            // (m,n) and (n,m) together: 2 Re(a_m conj(a_n) ∫_0^T e^{−iℓt} dt), ℓ = log(m/n)
            let l = lm - ln_n;
            let z = am * an.conj();
            let integral = Complex64::new((l * big_t).sin(), (l * big_t).cos() - 1.0) / l;
            pairs.push(2.0 * (z * integral).re);
            bound.push(2.0 * 2.0 * z.norm() / l.abs());
        }
    }
    MeanValue {
        integral: diagonal + pairwise_sum(&pairs),
        diagonal,
        off_diagonal_bound: pairwise_sum(&bound),
    }
}

/// Sampling of the integration range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentGrid {
    /// Step; defaults to `2π/(8 log(T/2π))`, which resolves the oscillation of ζ.
    pub step: Option<f64>,
    /// Extra range beyond `[6T/5, 9T/5]` on each side.
    pub margin: f64,
}

impl Default for MomentGrid {
    fn default() -> Self {
        Self {
            step: None,
            margin: 8.0,
        }
    }
}

impl MomentGrid {
    pub fn with_step(step: f64) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn default_step(big_t: f64) -> f64 {
        2.0 * PI / (8.0 * (big_t / (2.0 * PI)).ln().max(1.0))
    }
}

/// Which integral a [`MomentEstimate`] belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrandId {
    /// `"I"`, `"S"`, `"D"`, `"P1"`, `"P2"` or `"offline"`.
    pub kind: String,
    pub labels: Vec<String>,
    pub q: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub start: f64,
    pub step: f64,
    pub count: usize,
    pub end: f64,
}

impl From<Progression> for GridMeta {
    fn from(p: Progression) -> Self {
        Self {
            start: p.start,
            step: p.step,
            count: p.count,
            end: p.end(),
        }
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub error: f64,
    /// Trapezoid value on every other sample (step `2h`).
    pub coarse_value: f64,
    pub integrand: IntegrandId,
    pub grid: GridMeta,
    /// Closed-form comparator where one exists (e.g. `Π(1+|r(p)|²)`).
    pub comparator: Option<f64>,
}

/// Samples per evaluation block; even so that the coarse sub-grid stays aligned.
const BLOCK: usize = 1 << 18;

struct Quadrature {
    fine: f64,
    coarse: f64,
    error: f64,
}

/// Trapezoid on `prog` (odd count) with the `2h` sub-grid as Richardson partner.
fn quadrature<F>(prog: Progression, mut block_values: F) -> Result<Quadrature, MomentError>
where
    F: FnMut(Progression) -> Result<Vec<f64>, MomentError>,
{
    debug_assert!(prog.count % 2 == 1);
    let mut fine_parts = Vec::new();
    let mut coarse_parts = Vec::new();
    let mut abs_parts = Vec::new();
    let mut first = 0.0;
    let mut last = 0.0;
    let mut k0 = 0;
    while k0 < prog.count {
        let len = BLOCK.min(prog.count - k0);
        let block = Progression::new(prog.point(k0), prog.step, len);
        let values = block_values(block)?;
        if k0 == 0 {
            first = values[0];
        }
        if k0 + len == prog.count {
            last = values[len - 1];
        }
        fine_parts.push(pairwise_sum(&values));
        let even: Vec<f64> = values.iter().step_by(2).copied().collect();
        coarse_parts.push(pairwise_sum(&even));
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        abs_parts.push(pairwise_sum(&abs));
        k0 += len;
    }
    let h = prog.step;
    let fine = h * (pairwise_sum(&fine_parts) - 0.5 * (first + last));
    let coarse = 2.0 * h * (pairwise_sum(&coarse_parts) - 0.5 * (first + last));
    let rounding = 4.0 * f64::EPSILON * (prog.count as f64).sqrt() * h * pairwise_sum(&abs_parts);
    Ok(Quadrature {
        fine,
        coarse,
        error: (fine - coarse).abs() / 3.0 + rounding,
    })
}

/// Progression covering `[lo, hi]` with an even number of intervals of size at most `step`.
fn even_grid(lo: f64, hi: f64, step: f64) -> Progression {
    let mut intervals = ((hi - lo) / step).ceil().max(2.0) as usize;
    if intervals % 2 == 1 {
        intervals += 1;
    }
    Progression::new(lo, (hi - lo) / intervals as f64, intervals + 1)
}

fn window_grid(big_t: f64, grid: MomentGrid) -> Result<Progression, MomentError> {
    if !(big_t > 0.0) {
        return Err(MomentError::InvalidInput(format!("T = {big_t} must be positive")));
    }
    if !(grid.margin >= 8.0) {
        return Err(MomentError::InvalidInput(format!(
            "margin {} must be at least 8 (the window is not negligible closer in)",
            grid.margin
        )));
    }
    let step = grid.step.unwrap_or_else(|| MomentGrid::default_step(big_t));
    if !(step > 0.0) {
        return Err(MomentError::InvalidInput(format!("step {step} must be positive")));
    }
    Ok(even_grid(1.2 * big_t - grid.margin, 1.8 * big_t + grid.margin, step))
}

/// `log |L_π(σ + it)|` summed over the specs of `π` on a block.
fn log_abs_product(specs: &[&LFunctionSpec], sigma: f64, block: Progression) -> Result<Vec<f64>, MomentError> {
    let mut acc = vec![0.0; block.count];
    for spec in specs {
        if matches!(spec.kind(), LFunctionKind::Unit) {
            continue;
        }
        let values = evaluate_on_progression(spec, sigma, block)?;
        for (a, v) in acc.iter_mut().zip(values) {
            *a += v.norm().ln();
        }
    }
    Ok(acc)
}

fn select<'a>(specs: &[&'a LFunctionSpec], pi: &[usize]) -> Result<Vec<&'a LFunctionSpec>, MomentError> {
    pi.iter()
        .map(|&h| {
            specs.get(h).copied().ok_or_else(|| {
                MomentError::InvalidInput(format!("π index {h} out of range ({} specs)", specs.len()))
            })
        })
        .collect()
}

fn critical_resonator(res: &Resonator) -> Result<(), MomentError> {
    if res.kind != ResonatorKind::Critical {
        return Err(MomentError::InvalidInput(
            "twisted moments on the critical strip use the critical-line resonator".into(),
        ));
    }
    Ok(())
}

/// `I_π(σ,T) = (1/T)∫ |L_π(σ+it)|^q |R(σ+it)|² w(t,T) dt`.
pub fn twisted_moment(
    specs: &[&LFunctionSpec],
    res: &Resonator,
    pi: &[usize],
    q: f64,
    sigma: f64,
    big_t: f64,
    grid: MomentGrid,
) -> Result<MomentEstimate, MomentError> {
    critical_resonator(res)?;
    if !(q >= 0.0) {
        return Err(MomentError::InvalidInput(format!("q = {q} must be nonnegative")));
    }
    let chosen = select(specs, pi)?;
    let prog = window_grid(big_t, grid)?;
    let quad = quadrature(prog, |block| {
        let r = evaluate_resonator_on_line(res, sigma, block)?;
        let logs = if q == 0.0 {
            vec![0.0; block.count]
        } else {
            log_abs_product(&chosen, sigma, block)?
        };
        Ok((0..block.count)
            .map(|k| {
                let t = block.point(k);
                let l = if q == 0.0 { 1.0 } else { (q * logs[k]).exp() };
                l * r[k].norm_sqr() * weight_w(t, big_t) / big_t
            })
            .collect())
    })?;
    Ok(MomentEstimate {
        value: quad.fine,
        error: quad.error,
        coarse_value: quad.coarse,
        integrand: IntegrandId {
            kind: "I".into(),
            labels: chosen.iter().map(|s| s.label().to_string()).collect(),
            q,
            sigma,
        },
        grid: prog.into(),
        comparator: Some(res.product_norm()),
    })
}

/// `I_π(σ,T) / Π_p (1 + |r(p)|²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRatio {
    pub ratio: f64,
    pub ratio_error: f64,
    pub product: f64,
    pub moment: MomentEstimate,
}

pub fn moment_ratio(
    specs: &[&LFunctionSpec],
    res: &Resonator,
    pi: &[usize],
    q: f64,
    sigma: f64,
    big_t: f64,
    grid: MomentGrid,
) -> Result<MomentRatio, MomentError> {
    let moment = twisted_moment(specs, res, pi, q, sigma, big_t, grid)?;
    let product = res.product_norm();
    Ok(MomentRatio {
        ratio: moment.value / product,
        ratio_error: moment.error / product,
        product,
        moment,
    })
}

/// The off-line moment `(1/T^α)∫_{A+T^α}^{A+2T^α} |L(σ+it)/L̃(σ+it) · R(it)|² dt`
/// with its comparison product `Π_p (1 + |r(p)|² + 2p^{−σ} Re(conj(r(p)) a_{L/L̃}(p)))`.
#[allow(clippy::too_many_arguments)]
pub fn offline_twisted_moment(
    numerator: &LFunctionSpec,
    denominator: &LFunctionSpec,
    res: &Resonator,
    sigma: f64,
    a: f64,
    big_t: f64,
    alpha: f64,
    certificate: Option<&GoodIntervalCertificate>,
    step: Option<f64>,
) -> Result<MomentEstimate, MomentError> {
    if res.kind != ResonatorKind::Offline {
        return Err(MomentError::InvalidInput("the off-line moment uses the product resonator".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MomentError::InvalidInput(format!("α = {alpha} must lie in (0, 1)")));
    }
    let len = big_t.powf(alpha);
    let (lo, hi) = (a + len, a + 2.0 * len);
    let needs: Vec<&LFunctionSpec> = [numerator, denominator]
        .into_iter()
        .filter(|s| !matches!(s.kind(), LFunctionKind::Unit))
        .collect();
    let labels: Vec<String> = needs.iter().map(|s| s.label().to_string()).collect();
    let certified = needs.is_empty()
        || certificate.is_some_and(|c| c.covers(&labels, sigma, lo, hi));
    if !certified {
        return Err(MomentError::Uncertified {
            labels,
            sigma,
            lo,
            hi,
        });
    }
    let step = step.unwrap_or_else(|| MomentGrid::default_step(big_t));
    let prog = even_grid(lo, hi, step);
    let same = numerator.label() == denominator.label();
    let quad = quadrature(prog, |block| {
        let r = evaluate_resonator_on_line(res, 0.0, block)?;
        let ratio_sq: Vec<f64> = if same {
            vec![1.0; block.count]
        } else {
            let num = log_abs_product(&[numerator], sigma, block)?;
            let den = log_abs_product(&[denominator], sigma, block)?;
            num.iter().zip(&den).map(|(n, d)| (2.0 * (n - d)).exp()).collect()
        };
        Ok((0..block.count).map(|k| ratio_sq[k] * r[k].norm_sqr() / len).collect())
    })?;
    let mut comparator = 1.0;
    for s in &res.support {
        let a_ratio = numerator.a_prime(s.p)? - denominator.a_prime(s.p)?;
        comparator *= 1.0 + s.r.norm_sqr() + 2.0 * p_pow(s.p as f64, -sigma) * (s.r.conj() * a_ratio).re;
    }
    Ok(MomentEstimate {
        value: quad.fine,
        error: quad.error,
        coarse_value: quad.coarse,
        integrand: IntegrandId {
            kind: "offline".into(),
            labels: vec![numerator.label().to_string(), denominator.label().to_string()],
            q: 2.0,
            sigma,
        },
        grid: prog.into(),
        comparator: Some(comparator),
    })
}

/// Largest `X` for which the truncated products `P₁`, `P₂` are expanded.
pub const MAX_DIAGNOSTIC_LENGTH: f64 = 1e6;

/// The truncated Dirichlet polynomials `P₁`, `P₂` of `L_π^q`: coefficients
/// of `c₁` (primes in the support) and `c₂` (primes outside) for `n <= X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPowers {
    pub x: u64,
    pub p1: Vec<Complex64>,
    pub p2: Vec<Complex64>,
}

pub fn truncated_powers(
    specs: &[&LFunctionSpec],
    res: &Resonator,
    q: Exponent,
    x: f64,
) -> Result<TruncatedPowers, MomentError> {
    if !(x >= 1.0 && x <= MAX_DIAGNOSTIC_LENGTH) {
        return Err(MomentError::InvalidInput(format!(
            "truncation X = {x} outside [1, {MAX_DIAGNOSTIC_LENGTH}]"
        )));
    }
    let n_max = x.floor() as u64;
    let qv = q.value();
    let mut p1 = vec![Complex64::new(0.0, 0.0); n_max as usize];
    let mut p2 = p1.clone();
    let mut local: std::collections::HashMap<u64, Vec<Complex64>> = std::collections::HashMap::new();
    for n in 1..=n_max {
        let mut c1 = Complex64::new(1.0, 0.0);
        let mut c2 = Complex64::new(1.0, 0.0);
        for (p, k) in factorize(n) {
            if !local.contains_key(&p) {
                let nu_max = (n_max as f64).ln() / (p as f64).ln();
                let coeffs = fractional_coefficients(specs, qv, p, nu_max.floor() as usize, false)?;
                local.insert(p, coeffs.coefficients);
            }
            let c = local[&p][k as usize];
            if res.r(p) != Complex64::new(0.0, 0.0) {
                c1 *= c;
                c2 = Complex64::new(0.0, 0.0);
            } else {
                c2 *= c;
                c1 = Complex64::new(0.0, 0.0);
            }
        }
        p1[n as usize - 1] = c1;
        p2[n as usize - 1] = c2;
    }
    Ok(TruncatedPowers { x: n_max, p1, p2 })
}

/// `S_π`, `D_π` and the separate sizes of `P₁` and `P₂` at desk scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceDiagnostic {
    pub s: MomentEstimate,
    pub d: MomentEstimate,
    pub p1: MomentEstimate,
    pub p2: MomentEstimate,
    /// `D_π / S_π`.
    pub relative: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn difference_diagnostic(
    specs: &[&LFunctionSpec],
    res: &Resonator,
    pi: &[usize],
    q: Exponent,
    sigma: f64,
    big_t: f64,
    grid: MomentGrid,
) -> Result<DifferenceDiagnostic, MomentError> {
    critical_resonator(res)?;
    let chosen = select(specs, pi)?;
    let log_x = res
        .log_x
        .ok_or_else(|| MomentError::InvalidInput("resonator has no truncation length".into()))?;
    let powers = truncated_powers(&chosen, res, q, log_x.exp())?;
    let prog = window_grid(big_t, grid)?;
    let labels: Vec<String> = chosen.iter().map(|s| s.label().to_string()).collect();
    let freqs: Vec<f64> = (1..=powers.x).map(|n| (n as f64).ln()).collect();
    let shifted = |c: &[Complex64]| -> Vec<Complex64> {
        c.iter()
            .enumerate()
            .map(|(i, a)| a * p_pow((i + 1) as f64, -sigma))
            .collect()
    };
    let c1 = shifted(&powers.p1);
    let c2 = shifted(&powers.p2);
    let (u, v) = (q.u as i32, q.v as f64);

    // one pass computes the four integrands; the closure caches per block
    let run = |which: &str| -> Result<MomentEstimate, MomentError> {
        let quad = quadrature(prog, |block| {
            let r = evaluate_resonator_on_line(res, sigma, block)?;
            let s1 = crate::lfunc::ProgressionSum::new(&c1, &freqs).evaluate(block);
            let s2 = crate::lfunc::ProgressionSum::new(&c2, &freqs).evaluate(block);
            let l_u: Vec<Complex64> = if which == "D" {
                let mut acc = vec![Complex64::new(1.0, 0.0); block.count];
                for spec in &chosen {
                    let vals = evaluate_on_progression(spec, sigma, block)?;
                    for (a, x) in acc.iter_mut().zip(vals) {
                        *a *= x.powi(u);
                    }
                }
                acc
            } else {
                Vec::new()
            };
            Ok((0..block.count)
                .map(|k| {
                    let t = block.point(k);
                    let sp = s1[k] * s2[k];
                    let f = match which {
                        "S" => sp.norm(),
                        "P1" => s1[k].norm(),
                        "P2" => s2[k].norm(),
                        _ => (l_u[k] - sp.powf(v)).norm().powf(1.0 / v),
                    };
                    f * r[k].norm_sqr() * weight_w(t, big_t) / big_t
                })
                .collect())
        })?;
        Ok(MomentEstimate {
            value: quad.fine,
            error: quad.error,
            coarse_value: quad.coarse,
            integrand: IntegrandId {
                kind: which.into(),
                labels: labels.clone(),
                q: q.value(),
                sigma,
            },
            grid: prog.into(),
            comparator: None,
        })
    };
    let s = run("S")?;
    let d = run("D")?;
    let p1 = run("P1")?;
    let p2 = run("P2")?;
    let relative = if s.value > 0.0 { d.value / s.value } else { f64::INFINITY };
    Ok(DifferenceDiagnostic { s, d, p1, p2, relative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonator::{build_resonator_critical, CriticalScale};

    #[test]
    fn weight_center_symmetry_and_tails() {
        let t = 100.0;
        assert!((weight_w(150.0, t) - PI.sqrt()).abs() < 1e-10);
        for u in [0.3, 7.0, 29.0, 31.5, 40.0] {
            let a = weight_w(150.0 + u, t);
            let b = weight_w(150.0 - u, t);
            assert!((a - b).abs() <= 1e-15 * a.max(1e-300), "u = {u}");
        }
        assert!(weight_w(0.0, t) <= 1e-300);
        assert!(weight_underflows(0.0, t));
        for k in 0..50 {
            let x = 123.0 + k as f64 * 0.7;
            let w = weight_w(x, t);
            assert!(w > 0.99 * PI.sqrt() && w <= PI.sqrt() * (1.0 + 1e-15));
        }
        for k in 0..40 {
            let x = 183.0 + k as f64 * 0.5;
            assert!(weight_w(x, t) <= (-(x - 180.0).powi(2) / 2.0).exp());
        }
    }

    #[test]
    fn weight_total_mass() {
        let window = WeightWindow::new(1000.0);
        let prog = even_grid(1200.0 - 40.0, 1800.0 + 40.0, 0.05);
        let samples: Vec<f64> = prog.points().iter().map(|&t| window.value(t)).collect();
        let integral = crate::numeric::trapezoid(&samples, prog.step);
        assert!((integral / window.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mean_value_closed_forms() {
        let c = Complex64::new(0.3, -0.4);
        let mv = mv_meanvalue(&[c], 777.0);
        assert_eq!(mv.integral, c.norm_sqr() * 777.0);
        let one = Complex64::new(1.0, 0.0);
        let t = 1000.0;
        let mv = mv_meanvalue(&[one, one], t);
        let l2 = 2f64.ln();
        assert!((mv.integral - (2.0 * t + 2.0 * (t * l2).sin() / l2)).abs() < 1e-9);
        assert_eq!(mv.diagonal, 2.0 * t);
        assert!((mv.integral - mv.diagonal).abs() <= 2.0 / l2);
    }

    #[test]
    fn grid_has_even_interval_count() {
        let p = even_grid(0.0, 1.0, 0.3);
        assert_eq!(p.count % 2, 1);
        assert!(p.step <= 0.3);
    }

    #[test]
    fn empty_resonator_without_l_is_window_mass() {
        let z = LFunctionSpec::zeta();
        let res = build_resonator_critical(&[&z], CriticalScale::Height { delta: 0.2, t: 1e4 }, 1.2, 0.1).unwrap();
        assert!(res.empty_support);
        let t = 1e4;
        let m = twisted_moment(&[&z], &res, &[0], 0.0, 0.5, t, MomentGrid::default()).unwrap();
        assert!((m.value - 0.6 * PI.sqrt()).abs() < 1e-9);
        let empty_pi = twisted_moment(&[&z], &res, &[], 3.0, 0.5, t, MomentGrid::default()).unwrap();
        assert_eq!(empty_pi.value, m.value);
    }

    #[test]
    fn truncated_powers_of_zeta() {
        // ζ^{1/2} off the support: c₂(n) = τ_{1/2}(n)
        let z = LFunctionSpec::zeta();
        let res = build_resonator_critical(&[&z], CriticalScale::Height { delta: 0.2, t: 1e4 }, 1.2, 0.1).unwrap();
        let tp = truncated_powers(&[&z], &res, Exponent::new(1, 2).unwrap(), 12.0).unwrap();
        assert_eq!(tp.p1[0], Complex64::new(1.0, 0.0));
        assert!(tp.p1[1..].iter().all(|c| c.norm() == 0.0));
        assert!((tp.p2[3].re - 0.375).abs() < 1e-15); // τ_{1/2}(4) = 3/8
        assert!((tp.p2[5].re - 0.25).abs() < 1e-15); // τ_{1/2}(6) = 1/2 · 1/2
    }
}
