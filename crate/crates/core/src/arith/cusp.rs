use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::primes::sieve_primes;
use super::series::CoefficientSeries;
use super::ArithError;

/// Supported level-one holomorphic cusp forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspForm {
    /// The discriminant form of weight 12.
    Delta,
}

impl CuspForm {
    pub fn weight(self) -> u32 {
        match self {
            CuspForm::Delta => 12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CuspForm::Delta => "delta",
        }
    }
}

impl FromStr for CuspForm {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "delta" | "Δ" | "tau" | "ramanujan" => Ok(CuspForm::Delta),
            _ => Err(ArithError::UnsupportedForm(s.to_string())),
        }
    }
}

/// `η(z)^3 / q^{1/8} = Σ_m (-1)^m (2m+1) q^{m(m+1)/2}` as sparse (exponent, coefficient) pairs.
fn eta_cubed_terms(max_exp: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    let mut m = 0usize;
    loop {
        let e = m * (m + 1) / 2;
        if e > max_exp {
            break;
        }
        let c = (2 * m + 1) as i128;
        out.push((e, if m % 2 == 0 { c } else { -c }));
        m += 1;
    }
    out
}

/// Integer Fourier coefficients `c(0..=n_max)` of the form (c(0) = 0).
pub fn raw_cusp_coefficients(form: CuspForm, n_max: usize) -> Result<Vec<i128>, ArithError> {
    match form {
        CuspForm::Delta => delta_coefficients(n_max),
    }
}

fn delta_coefficients(n_max: usize) -> Result<Vec<i128>, ArithError> {
    let mut out = vec![0i128; n_max + 1];
    if n_max == 0 {
        return Ok(out);
    }
    // Δ = q · (η³/q^{1/8})^8, so c(n) is the coefficient of q^{n-1} in the eighth power.
    let len = n_max;
    let sparse = eta_cubed_terms(len - 1);
    let mut acc = vec![0i128; len];
    for &(e, c) in &sparse {
        acc[e] = c;
    }
    for _ in 1..8 {
        let mut next = vec![0i128; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(e, c) in &sparse {
                let j = i + e;
                if j >= len {
                    break;
                }
                let prod = a.checked_mul(c).ok_or(ArithError::Overflow {
                    form: form_name(),
                    n: j + 1,
                })?;
                next[j] = next[j].checked_add(prod).ok_or(ArithError::Overflow {
                    form: form_name(),
                    n: j + 1,
                })?;
            }
        }
        acc = next;
    }
    out[1..].copy_from_slice(&acc);
    Ok(out)
}

fn form_name() -> String {
    CuspForm::Delta.name().to_string()
}

/// Coefficients in analytic normalisation `a(n) = c(n)/n^{(k-1)/2}`, with the
/// Deligne bound `|a(p)| <= 2` checked at every prime up to `n_max`.
pub fn cuspform_coefficients(form: CuspForm, n_max: usize) -> Result<CoefficientSeries, ArithError> {
    let raw = raw_cusp_coefficients(form, n_max)?;
    let shift = (form.weight() as f64 - 1.0) / 2.0;
    let values: Vec<Complex64> = (1..=n_max)
        .map(|n| Complex64::new(raw[n] as f64 / (n as f64).powf(shift), 0.0))
        .collect();
    if n_max >= 2 {
        for &p in sieve_primes(n_max as u64)?.primes() {
            let v = values[p as usize - 1].re;
            if v.abs() > 2.0 + 1e-9 {
                return Err(ArithError::DeligneViolation {
                    form: form.name().to_string(),
                    p,
                    value: v.abs(),
                });
            }
        }
    }
    Ok(CoefficientSeries::new(
        format!("cusp:{}", form.name()),
        values,
        true,
        format!(
            "analytic normalisation a(n) = c(n)/n^{}",
            (form.weight() - 1) as f64 / 2.0
        ),
    ))
}
