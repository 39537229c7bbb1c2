//! Small numerical kernels shared across modules.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 32;

/// Tree summation; the result does not depend on how work was split.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
    }
}

/// `p^e` with the exponents that occur in closed forms evaluated exactly.
pub fn p_pow(p: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        p
    } else if e == 0.5 {
        p.sqrt()
    } else if e == -0.5 {
        1.0 / p.sqrt()
    } else if e == 2.0 {
        p * p
    } else {
        p.powf(e)
    }
}

/// Number of tabulated `B_{2k}/(2k)!` values.
pub const BERNOULLI_TERMS: usize = 120;

/// `B_{2k}/(2k)!` for `k = 1..=BERNOULLI_TERMS` (index `k - 1`), from
/// `B_{2k}/(2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}`.
pub fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=BERNOULLI_TERMS)
            .map(|k| {
                let s = 2.0 * k as f64;
                let z = zeta_even(k);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                // (2π)^{-2k} via logs to stay in range
                sign * 2.0 * z * (-s * (2.0 * PI).ln()).exp()
            })
            .collect()
    })
}

/// ζ(2k) for k >= 1 by direct summation with an Euler–Maclaurin tail.
fn zeta_even(k: usize) -> f64 {
    match k {
        1 => PI * PI / 6.0,
        2 => PI.powi(4) / 90.0,
        _ => {
            let s = 2.0 * k as f64;
            let n: f64 = 40.0;
            let head: f64 = (1..40).map(|j| (j as f64).powf(-s)).sum();
            let tail = n.powf(1.0 - s) / (s - 1.0)
                + 0.5 * n.powf(-s)
                + s / 12.0 * n.powf(-s - 1.0)
                - s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0);
            head + tail
        }
    }
}

const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Logarithm of the gamma function, continuous in `z` off the negative real
/// axis and real for `z > 0`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 12.0 && w.norm() < 24.0 {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn exp_m1(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    // e^{x+iy} - 1 = e^x (cos y - 1) + (e^x - 1) + i e^x sin y
    let ex = z.re.exp();
    let cos_m1 = -2.0 * (0.5 * z.im).sin().powi(2);
    Complex64::new(ex * cos_m1 + z.re.exp_m1(), ex * z.im.sin())
}

/// Composite trapezoid rule on equally spaced samples.
pub fn trapezoid(samples: &[f64], step: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => step * (pairwise_sum(&samples[1..n - 1]) + 0.5 * (samples[0] + samples[n - 1])),
    }
}

/// Distance from `x` to the nearest integer; half-integers give exactly 1/2.
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round_ties_even()).abs()
}
