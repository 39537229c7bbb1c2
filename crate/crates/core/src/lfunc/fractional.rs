use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LFunctionSpec, LfuncError};

/// A positive rational exponent `u/v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub u: u32,
    pub v: u32,
}

impl Exponent {
    pub fn new(u: u32, v: u32) -> Result<Self, LfuncError> {
        if u == 0 || v == 0 {
            return Err(LfuncError::InvalidInput(format!(
                "exponent {u}/{v} must be a positive rational"
            )));
        }
        Ok(Self { u, v })
    }

    pub fn value(self) -> f64 {
        self.u as f64 / self.v as f64
    }
}

/// `τ_q(p^k) = Γ(q+k)/(k! Γ(q))` by the recurrence `τ_q(p^k) = τ_q(p^{k−1})(q+k−1)/k`.
pub fn tau_q(q: f64, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (q + j as f64 - 1.0) / j as f64)
}

/// Local coefficients `c(p^ν)`, `ν <= ν_max`, of `L_π(s)^q` at one prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalCoefficients {
    pub q: f64,
    pub p: u64,
    /// Whether `p` belongs to the resonator support (coefficients of `c₁`)
    /// or not (coefficients of `c₂`).
    pub in_support: bool,
    pub coefficients: Vec<Complex64>,
}

impl FractionalCoefficients {
    /// `c₁(p^ν)`: the coefficient when `p` is in the support, zero otherwise (`ν >= 1`).
    pub fn c1(&self, nu: usize) -> Complex64 {
        self.select(nu, self.in_support)
    }

    /// `c₂(p^ν)`: the coefficient when `p` is outside the support.
    pub fn c2(&self, nu: usize) -> Complex64 {
        self.select(nu, !self.in_support)
    }

    fn select(&self, nu: usize, active: bool) -> Complex64 {
        if nu == 0 {
            Complex64::new(1.0, 0.0)
        } else if active {
            self.coefficients.get(nu).copied().unwrap_or_default()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

fn mul_truncated(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `Π_j (1 − α_j X)^{-q}` up to `X^{ν_max}`, as a product of
/// the binomial series `Σ_k τ_q(p^k) α^k X^k`.
pub fn roots_power_series(roots: &[Complex64], q: f64, nu_max: usize) -> Vec<Complex64> {
    let len = nu_max + 1;
    let tau: Vec<f64> = (0..len as u32).map(|k| tau_q(q, k)).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    acc[0] = Complex64::new(1.0, 0.0);
    for alpha in roots {
        let series: Vec<Complex64> = tau
            .iter()
            .enumerate()
            .map(|(k, &t)| alpha.powu(k as u32) * t)
            .collect();
        acc = mul_truncated(&acc, &series, len);
    }
    acc
}

/// Coefficients of `Π_j (1 − α_j X)^{-u}` for an integer `u`, built from `u`
/// copies of each geometric series.
pub fn local_factor_power(roots: &[Complex64], u: u32, nu_max: usize) -> Vec<Complex64> {
    let len = nu_max + 1;
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    acc[0] = Complex64::new(1.0, 0.0);
    for alpha in roots {
        let geometric: Vec<Complex64> = (0..len as u32).map(|k| alpha.powu(k)).collect();
        for _ in 0..u {
            acc = mul_truncated(&acc, &geometric, len);
        }
    }
    acc
}

/// `v`-fold self-convolution of a truncated power series.
pub fn self_convolve(series: &[Complex64], v: u32) -> Vec<Complex64> {
    let len = series.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return acc;
    }
    acc[0] = Complex64::new(1.0, 0.0);
    for _ in 0..v {
        acc = mul_truncated(&acc, series, len);
    }
    acc
}

/// `c(p^ν)` for `ν <= ν_max` of `Π_{h∈π} L_h(s)^q` at the prime `p`.
pub fn fractional_coefficients(
    specs: &[&LFunctionSpec],
    q: f64,
    p: u64,
    nu_max: usize,
    in_support: bool,
) -> Result<FractionalCoefficients, LfuncError> {
    let mut roots = Vec::new();
    for spec in specs {
        roots.extend(spec.local_roots(p)?);
    }
    Ok(FractionalCoefficients {
        q,
        p,
        in_support,
        coefficients: roots_power_series(&roots, q, nu_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::CuspForm;
    use proptest::prelude::*;

    #[test]
    fn tau_values() {
        assert_eq!(tau_q(0.37, 0), 1.0);
        assert_eq!(tau_q(1.0, 5), 1.0);
        assert_eq!(tau_q(0.5, 2), 3.0 / 8.0);
        // Γ-ratio oracle
        for &(q, k) in &[(0.5f64, 2u32), (1.0 / 3.0, 4), (2.5, 6)] {
            let lg = statrs::function::gamma::ln_gamma;
            let oracle = (lg(q + k as f64) - lg(k as f64 + 1.0) - lg(q)).exp();
            assert!((tau_q(q, k) - oracle).abs() < 1e-13);
        }
        assert_eq!(tau_q(2.0, 3), 4.0);
    }

    #[test]
    fn first_coefficient_is_q_times_a_p() {
        let zeta = LFunctionSpec::zeta();
        let delta = LFunctionSpec::cusp(CuspForm::Delta, 100).unwrap();
        let chi = LFunctionSpec::parse("chi:5:1", 0).unwrap();
        let specs = [&zeta, &delta, &chi];
        for p in [2u64, 3, 7, 11] {
            let f = fractional_coefficients(&specs, 2.0 / 3.0, p, 8, true).unwrap();
            let sum: Complex64 = specs.iter().map(|s| s.a_prime(p).unwrap()).sum();
            assert!((f.c1(1) - sum * (2.0 / 3.0)).norm() < 1e-14);
            assert_eq!(f.c1(0), Complex64::new(1.0, 0.0));
            assert_eq!(f.c2(1), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn square_root_of_geometric_series() {
        // log-then-exp oracle: exp(−(1/2) log(1−X)) = exp(Σ X^k/(2k))
        let zeta = LFunctionSpec::zeta();
        let f = fractional_coefficients(&[&zeta], 0.5, 2, 6, true).unwrap();
        let n = 7;
        let log_series: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { 0.5 / k as f64 }).collect();
        // exp of a power series with zero constant term: e' = l' e
        let mut exp_series = vec![0.0; n];
        exp_series[0] = 1.0;
        for m in 1..n {
            let s: f64 = (1..=m).map(|k| k as f64 * log_series[k] * exp_series[m - k]).sum();
            exp_series[m] = s / m as f64;
        }
        for (nu, e) in exp_series.iter().enumerate() {
            assert!((f.coefficients[nu].re - e).abs() < 1e-14, "nu={nu}");
        }
        assert!((f.coefficients[2].re - 0.375).abs() < 1e-15);
    }

    fn root_strategy() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((0.0f64..=1.0, 0.0f64..std::f64::consts::TAU), 1..=4)
            .prop_map(|v| v.into_iter().map(|(r, phi)| Complex64::from_polar(r, phi)).collect())
    }

    proptest! {
        #[test]
        fn power_identity(roots in root_strategy(), which in 0usize..3) {
            let (u, v) = [(1, 2), (1, 3), (2, 3)][which];
            let c = roots_power_series(&roots, u as f64 / v as f64, 6);
            let lhs = self_convolve(&c, v);
            let rhs = local_factor_power(&roots, u, 6);
            for (a, b) in lhs.iter().zip(&rhs) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
