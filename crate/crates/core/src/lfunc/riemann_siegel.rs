use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::numeric::ln_gamma;

/// Heights above which the critical-line ζ switches to Riemann–Siegel.
pub const RS_MIN_HEIGHT: f64 = 1.0e4;

const TAYLOR_DEGREE: usize = 72;
const CAUCHY_POINTS: usize = 256;

/// `θ(t) = arg Γ(1/4 + it/2) − (t/2) log π`, continuous with `θ(0) = 0`.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let a = t.abs();
    let v = if a < 60.0 {
        ln_gamma(Complex64::new(0.25, a / 2.0)).im - a / 2.0 * PI.ln()
    } else {
        let inv = 1.0 / a;
        let inv2 = inv * inv;
        a / 2.0 * (a / (2.0 * PI)).ln() - a / 2.0 - PI / 8.0
            + inv
                * (1.0 / 48.0
                    + inv2
                        * (7.0 / 5760.0
                            + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430_080.0 + inv2 * 511.0 / 1_216_512.0))))
    };
    v.copysign(t)
}

/// Taylor coefficients of `Ψ(1/2 + w) = −cos(2π(w² − 5/16)) / cos(2πw)` in `w`,
/// obtained from a discrete Cauchy integral on `|w| = 1` (Ψ is entire).
fn psi_taylor() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let samples: Vec<Complex64> = (0..CAUCHY_POINTS)
            .map(|j| {
                let phi = 2.0 * PI * (j as f64 + 0.5) / CAUCHY_POINTS as f64;
                let w = Complex64::from_polar(1.0, phi);
                let num = ((w * w - 5.0 / 16.0) * (2.0 * PI)).cos();
                let den = (w * (2.0 * PI)).cos();
                -num / den
            })
            .collect();
        (0..=TAYLOR_DEGREE)
            .map(|m| {
                let sum: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, f)| {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / CAUCHY_POINTS as f64;
                        f * Complex64::from_polar(1.0, -(m as f64) * phi)
                    })
                    .sum();
                // Ψ is even in w, so odd coefficients vanish
                if m % 2 == 1 {
                    0.0
                } else {
                    sum.re / CAUCHY_POINTS as f64
                }
            })
            .collect()
    })
}

/// k-th derivative of Ψ at `p = 1/2 + w`.
fn psi_derivative(w: f64, k: usize) -> f64 {
    let coeffs = psi_taylor();
    let mut acc = 0.0;
    // Horner over m = deg..k of c_m · m!/(m−k)! · w^{m−k}
    for m in (k..coeffs.len()).rev() {
        let falling: f64 = ((m - k + 1)..=m).map(|j| j as f64).product();
        acc = acc * w + coeffs[m] * falling;
    }
    acc
}

/// Riemann–Siegel correction coefficients `C_0..C_4` at fractional part `p`.
fn rs_coefficients(p: f64) -> [f64; 5] {
    let w = p - 0.5;
    let d = |k| psi_derivative(w, k);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    [
        d(0),
        -d(3) / (96.0 * pi2),
        d(2) / (64.0 * pi2) + d(6) / (18432.0 * pi4),
        -d(1) / (64.0 * pi2) - d(5) / (3840.0 * pi4) - d(9) / (5_308_416.0 * pi6),
        d(0) / (128.0 * pi2)
            + 19.0 * d(4) / (24576.0 * pi4)
            + 11.0 * d(8) / (5_898_240.0 * pi6)
            + d(12) / (2_038_431_744.0 * pi8),
    ]
}

/// Riemann–Siegel remainder `(−1)^{N−1} τ^{−1/4} Σ_k C_k τ^{−k/2}`, `τ = t/2π`.
pub(crate) fn rs_remainder(t: f64) -> (f64, usize) {
    let tau = t / (2.0 * PI);
    let a = tau.sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let c = rs_coefficients(p);
    let inv_a = 1.0 / a;
    let series = c[0] + inv_a * (c[1] + inv_a * (c[2] + inv_a * (c[3] + inv_a * c[4])));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    (sign * series / a.sqrt(), n)
}

/// Hardy's function `Z(t) = e^{iθ(t)} ζ(1/2 + it)` by Riemann–Siegel, `t > 0`.
pub fn hardy_z(t: f64) -> f64 {
    let theta = riemann_siegel_theta(t);
    let (rem, n) = rs_remainder(t);
    let main: f64 = (1..=n)
        .map(|k| {
            let kf = k as f64;
            (theta - t * kf.ln()).cos() / kf.sqrt()
        })
        .sum();
    2.0 * main + rem
}

/// `ζ(1/2 + it)` for `t >= RS_MIN_HEIGHT` with an error estimate.
pub fn zeta_critical_rs(t: f64) -> (Complex64, f64) {
    let z = hardy_z(t);
    let theta = riemann_siegel_theta(t);
    let tau = t / (2.0 * PI);
    // first omitted term is O(τ^{-11/4}); phase rounding is O(t ε)
    let err = tau.powf(-2.75) + t * f64::EPSILON * 8.0;
    (Complex64::from_polar(1.0, -theta) * z, err)
}
