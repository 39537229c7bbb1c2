use num_complex::Complex64;

use super::riemann_siegel::{zeta_critical_rs, RS_MIN_HEIGHT};
use super::LfuncError;
use crate::numeric::{bernoulli_ratios, exp_m1, pairwise_sum_complex};

/// Truncation point for Euler–Maclaurin summation at height `t`.
///
/// The correction terms shrink by roughly `(|s| / 2πN)²` each, so `N ≈ |t|/4`
/// gives a ratio near 0.4 and the adaptive loop stops well inside the table.
pub(crate) fn em_length(s: Complex64) -> usize {
    (s.im.abs() / 4.0).ceil() as usize + 30 + (s.re.abs() as usize)
}

/// `(x^{1-s} − 1)/(s − 1)`, finite at `s = 1` where it equals `−log x`.
pub(crate) fn pole_free_power(s: Complex64, ln_x: f64) -> Complex64 {
    let z = (Complex64::new(1.0, 0.0) - s) * ln_x;
    if z.norm() == 0.0 {
        return Complex64::new(-ln_x, 0.0);
    }
    -exp_m1(z) / z * ln_x
}

/// Euler–Maclaurin tail `Σ_{m>=0} (x+m)^{-s}` without its pole part:
/// returns `(value − 1/(s−1), error estimate)`.
pub(crate) fn em_tail(s: Complex64, x: f64) -> (Complex64, f64) {
    let ln_x = x.ln();
    let x_pow = (-s * ln_x).exp();
    let mut acc = pole_free_power(s, ln_x) + 0.5 * x_pow;
    let inv_x2 = 1.0 / (x * x);
    // running product s (s+1) ... (s+2k-2) · x^{-s-2k+1}, kept as one factor
    // so neither part overflows at large height
    let mut pk = s * x_pow / x;
    let mut last = f64::INFINITY;
    let mut error = 0.0;
    for (k, &b) in bernoulli_ratios().iter().enumerate() {
        let term = pk * b;
        let size = term.norm();
        if size > last {
            // asymptotic series started to diverge
            error = last;
            break;
        }
        acc += term;
        error = size;
        if size <= 1e-18 * acc.norm().max(1e-300) {
            break;
        }
        last = size;
        let j = 2.0 * (k as f64 + 1.0);
        pk *= (s + j - 1.0) * (s + j) * inv_x2;
    }
    (acc, error)
}

/// `Σ_{n=lo}^{hi-1} n^{-s}`.
pub(crate) fn power_sum(s: Complex64, lo: usize, hi: usize) -> Complex64 {
    const BLOCK: usize = 4096;
    let blocks: Vec<Complex64> = (lo..hi)
        .step_by(BLOCK)
        .map(|start| {
            let end = (start + BLOCK).min(hi);
            (start..end)
                .map(|n| (-s * (n as f64).ln()).exp())
                .sum::<Complex64>()
        })
        .collect();
    pairwise_sum_complex(&blocks)
}

/// `ζ(s)` with an absolute error estimate.
pub fn zeta_with_error(s: Complex64) -> Result<(Complex64, f64), LfuncError> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(LfuncError::Pole {
            label: "zeta".into(),
            s,
        });
    }
    if s.re == 0.5 && s.im.abs() >= RS_MIN_HEIGHT {
        let (v, err) = zeta_critical_rs(s.im.abs());
        let v = if s.im < 0.0 { v.conj() } else { v };
        return Ok((v, err));
    }
    let n = em_length(s);
    let head = power_sum(s, 1, n);
    let (tail, err) = em_tail(s, n as f64);
    let pole = (s - 1.0).inv();
    let value = head + tail + pole;
    // rounding in the head grows with the number of terms and the phase size
    let rounding = f64::EPSILON * (n as f64).sqrt() * (1.0 + s.im.abs().log10().max(0.0)) * 4.0;
    Ok((value, err + rounding * value.norm().max(1.0)))
}

/// Riemann zeta function.
pub fn evaluate_zeta(s: Complex64) -> Result<Complex64, LfuncError> {
    zeta_with_error(s).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!((evaluate_zeta(c(2.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-14);
        assert!((evaluate_zeta(c(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-14);
        assert!((evaluate_zeta(c(4.0, 0.0)).unwrap().re - PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(−1) = −1/12; the head sum Σ n of size ~N²/2 cancels against the tail
        let (v, err) = zeta_with_error(c(-1.0, 0.0)).unwrap();
        assert!((v.re + 1.0 / 12.0).abs() < 1e-12);
        assert!(err < 1e-10);
        assert!(matches!(
            evaluate_zeta(c(1.0, 0.0)),
            Err(LfuncError::Pole { .. })
        ));
    }

    #[test]
    fn near_the_pole() {
        // ζ(1+ε) = 1/ε + γ + O(ε)
        let s = 1.0 + 1e-7;
        let eps = s - 1.0;
        let v = evaluate_zeta(c(s, 0.0)).unwrap().re;
        assert!((v - 1.0 / eps - 0.577_215_664_901_532_9).abs() < 1e-6);
    }

    #[test]
    fn agrees_with_direct_series_off_axis() {
        // direct summation oracle for Re s = 3 with an integral tail
        let s = c(3.0, 40.0);
        let direct: Complex64 = (1..200_000).map(|n| (-s * (n as f64).ln()).exp()).sum();
        let tail = (200_000f64).powf(-2.0) / 2.0;
        let v = evaluate_zeta(s).unwrap();
        assert!((v - direct).norm() < tail * 1.1 + 1e-14);
    }

    #[test]
    fn conjugate_symmetry_and_functional_equation() {
        let s = c(0.3, 17.0);
        let a = evaluate_zeta(s).unwrap();
        let b = evaluate_zeta(s.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
        // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)
        let one_minus = c(1.0, 0.0) - s;
        let rhs = (s * 2f64.ln() + (s - 1.0) * PI.ln() + crate::numeric::ln_gamma(one_minus)).exp()
            * (s * PI / 2.0).sin()
            * evaluate_zeta(one_minus).unwrap();
        assert!((a - rhs).norm() < 1e-11 * a.norm().max(1.0));
    }

    #[test]
    fn first_zero() {
        let v = evaluate_zeta(c(0.5, 14.134_725)).unwrap();
        assert!(v.norm() < 1e-5);
        // a refined zero is much closer
        let v = evaluate_zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(v.norm() < 1e-12);
    }
}
