use num_complex::Complex64;

use super::zeta::{em_length, em_tail, zeta_with_error};
use super::LfuncError;
use crate::arith::DirichletCharacter;
use crate::numeric::pairwise_sum_complex;

/// `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)` with each Hurwitz zeta summed by
/// Euler–Maclaurin. Returns the value and an absolute error estimate.
pub(crate) fn dirichlet_with_error(
    chi: &DirichletCharacter,
    s: Complex64,
    label: &str,
) -> Result<(Complex64, f64), LfuncError> {
    let q = chi.modulus();
    if q == 1 {
        return zeta_with_error(s);
    }
    let pole_weight: Complex64 = chi.values().iter().sum();
    let has_pole = pole_weight.norm() > 1e-9;
    if has_pole && s == Complex64::new(1.0, 0.0) {
        return Err(LfuncError::Pole {
            label: label.to_string(),
            s,
        });
    }
    let m = em_length(s);
    let qf = q as f64;
    let q_pow = (-s * qf.ln()).exp();

    // head: Σ_{n < qm} χ(n) n^{-s}, blocked for pairwise accumulation
    const BLOCK: u64 = 4096;
    let limit = q * m as u64;
    let blocks: Vec<Complex64> = (1..limit)
        .step_by(BLOCK as usize)
        .map(|start| {
            let end = (start + BLOCK).min(limit);
            (start..end)
                .map(|n| {
                    let c = chi.value(n);
                    if c.norm_sqr() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * (-s * (n as f64).ln()).exp()
                    }
                })
                .sum::<Complex64>()
        })
        .collect();
    let head = pairwise_sum_complex(&blocks);

    // tails ζ(s, m + a/q) for each residue, pole part collected separately
    let mut tail = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for a in 1..q {
        let c = chi.value(a);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let (t, e) = em_tail(s, m as f64 + a as f64 / qf);
        tail += c * t;
        err += e;
    }
    let mut value = head + q_pow * tail;
    if has_pole {
        value += q_pow * pole_weight / (s - 1.0);
    }
    let rounding = f64::EPSILON * (limit as f64).sqrt() * 8.0 * value.norm().max(1.0);
    Ok((value, err * q_pow.norm() + rounding))
}

/// Dirichlet L-function `L(s, χ)`.
pub fn evaluate_dirichlet_l(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64, LfuncError> {
    dirichlet_with_error(chi, s, &chi.label()).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{characters_mod, dirichlet_character, factorize};
    use crate::lfunc::evaluate_zeta;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn leibniz_and_catalan() {
        let chi = dirichlet_character(4, &[1]).unwrap();
        let v = evaluate_dirichlet_l(&chi, c(1.0, 0.0)).unwrap();
        assert!((v.re - PI / 4.0).abs() < 1e-13 && v.im.abs() < 1e-15);
        let v = evaluate_dirichlet_l(&chi, c(2.0, 0.0)).unwrap();
        // oracle: alternating series Σ_{k<10^6} (−1)^k/(2k+1)², averaged partial sums
        let mut s = 0.0;
        let mut prev = 0.0;
        for k in 0..1_000_000u64 {
            prev = s;
            let term = 1.0 / ((2 * k + 1) as f64).powi(2);
            s += if k % 2 == 0 { term } else { -term };
        }
        let oracle = 0.5 * (s + prev);
        assert!((v.re - oracle).abs() < 1e-12);
        assert!((v.re - 0.915_965_594_2).abs() < 1e-10);
    }

    #[test]
    fn trivial_character_is_zeta() {
        let chi = dirichlet_character(1, &[]).unwrap();
        let s = c(2.0, 3.0);
        let d = evaluate_dirichlet_l(&chi, s).unwrap() - evaluate_zeta(s).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn principal_characters_remove_euler_factors() {
        for q in [3u64, 4, 6, 12, 15] {
            let principal = &characters_mod(q).unwrap()[0];
            for s in [c(2.0, 3.0), c(0.5, 20.0), c(0.8, -7.0)] {
                let mut expected = evaluate_zeta(s).unwrap();
                for (p, _) in factorize(q) {
                    expected *= 1.0 - (-s * (p as f64).ln()).exp();
                }
                let v = evaluate_dirichlet_l(principal, s).unwrap();
                assert!((v - expected).norm() < 1e-10 * expected.norm().max(1.0), "q={q} s={s}");
            }
        }
        let principal = &characters_mod(5).unwrap()[0];
        assert!(evaluate_dirichlet_l(principal, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn complex_character_near_one() {
        // a nonprincipal character is regular at s = 1; nearby values are continuous
        let chi = dirichlet_character(5, &[1]).unwrap();
        let at_one = evaluate_dirichlet_l(&chi, c(1.0, 0.0)).unwrap();
        let near = evaluate_dirichlet_l(&chi, c(1.0 + 1e-9, 0.0)).unwrap();
        assert!((at_one - near).norm() < 1e-8);
        // direct partial sums converge (slowly) to the same value
        let direct: Complex64 = (1..2_000_001u64).map(|n| chi.value(n) / n as f64).sum();
        assert!((at_one - direct).norm() < 1e-5);
    }
}
