use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::characters::DirichletCharacter;
use super::primes::{gcd, sieve_primes};
use super::ArithError;

/// Dirichlet coefficients `a(1..=N_max)` in analytic normalisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    label: String,
    values: Vec<Complex64>,
    multiplicative: bool,
    normalization: String,
}

impl CoefficientSeries {
    pub fn new(
        label: impl Into<String>,
        values: Vec<Complex64>,
        multiplicative: bool,
        normalization: impl Into<String>,
    ) -> Self {
        Self {
            label: label.into(),
            values,
            multiplicative,
            normalization: normalization.into(),
        }
    }

    /// `a(n) = 1` for every `n`.
    pub fn zeta(n_max: usize) -> Self {
        Self::new(
            "zeta",
            vec![Complex64::new(1.0, 0.0); n_max],
            true,
            "analytic normalisation",
        )
    }

    pub fn from_character(chi: &DirichletCharacter, n_max: usize) -> Self {
        let values = (1..=n_max as u64).map(|n| chi.value(n)).collect();
        Self::new(chi.label(), values, true, "analytic normalisation")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn is_multiplicative(&self) -> bool {
        self.multiplicative
    }

    pub fn normalization(&self) -> &str {
        &self.normalization
    }

    /// Values `a(1), a(2), ...`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<Complex64> {
        if n == 0 {
            None
        } else {
            self.values.get(n - 1).copied()
        }
    }

    /// Checks `a(mn) = a(m)a(n)` on every coprime pair with `mn <= N_max`;
    /// returns the first failing pair.
    pub fn check_multiplicative(&self, tol: f64) -> Result<(), (usize, usize)> {
        let n_max = self.n_max();
        for m in 2..=n_max {
            for n in m..=n_max / m {
                if gcd(m as u64, n as u64) != 1 {
                    continue;
                }
                let lhs = self.values[m * n - 1];
                let rhs = self.values[m - 1] * self.values[n - 1];
                if (lhs - rhs).norm() > tol * (1.0 + rhs.norm()) {
                    return Err((m, n));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: Complex64,
    /// Set when no prime lies below the cutoff.
    pub empty: bool,
    pub prime_count: usize,
}

/// `(log x / x) Σ_{p<=x} a_A(p) conj(a_B(p))`.
pub fn coeff_correlation(
    a: &CoefficientSeries,
    b: &CoefficientSeries,
    x: f64,
) -> Result<Correlation, ArithError> {
    if x < 2.0 {
        return Ok(Correlation {
            value: Complex64::new(0.0, 0.0),
            empty: true,
            prime_count: 0,
        });
    }
    let limit = x.floor() as usize;
    for s in [a, b] {
        if s.n_max() < limit {
            return Err(ArithError::SeriesTooShort {
                label: s.label().to_string(),
                available: s.n_max(),
                needed: limit,
            });
        }
    }
    let primes = sieve_primes(limit as u64)?;
    let terms: Vec<Complex64> = primes
        .primes()
        .iter()
        .map(|&p| a.values[p as usize - 1] * b.values[p as usize - 1].conj())
        .collect();
    let sum = crate::numeric::pairwise_sum_complex(&terms);
    Ok(Correlation {
        value: sum * (x.ln() / x),
        empty: false,
        prime_count: primes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::dirichlet_character;

    #[test]
    fn empty_cutoff() {
        let z = CoefficientSeries::zeta(10);
        let c = coeff_correlation(&z, &z, 1.0).unwrap();
        assert!(c.empty);
        assert_eq!(c.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn short_series_rejected() {
        let z = CoefficientSeries::zeta(10);
        assert!(matches!(
            coeff_correlation(&z, &z, 100.0),
            Err(ArithError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn small_cutoff_by_hand() {
        let z = CoefficientSeries::zeta(10);
        let c = coeff_correlation(&z, &z, 10.0).unwrap();
        assert!((c.value.re - 4.0 * 10f64.ln() / 10.0).abs() < 1e-15);
        assert_eq!(c.prime_count, 4);
    }

    #[test]
    fn character_series_multiplicative() {
        let chi = dirichlet_character(12, &[1, 0]).unwrap();
        let s = CoefficientSeries::from_character(&chi, 500);
        assert!(s.check_multiplicative(1e-12).is_ok());
        assert_eq!(s.get(0), None);
        assert_eq!(s.get(1), Some(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn detects_non_multiplicative() {
        let mut values = vec![Complex64::new(1.0, 0.0); 20];
        values[5] = Complex64::new(2.0, 0.0);
        let s = CoefficientSeries::new("bad", values, true, "");
        assert_eq!(s.check_multiplicative(1e-12), Err((2, 3)));
    }
}
