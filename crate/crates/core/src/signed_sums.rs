//! Signed prime sums `(−1)^{j(h)} Σ_p Re(conj(r(p)) a_h(p)) / ((1+|r(p)|²) p^σ)`
//! of the off-line resonator, split into diagonal and cross terms, and the
//! measured cutoff `x_ε` past which prime correlations settle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::sieve_primes;
use crate::lfunc::{LFunctionSpec, LfuncError};
use crate::numeric::{p_pow, pairwise_sum};
use crate::resonator::{Resonator, ResonatorError, ResonatorKind, ResonatorParams};

/// Which list a spec belongs to: `j(h) = 1` for large values, `2` for small.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Large,
    Small,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Large => -1.0,
            Side::Small => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedSumEntry {
    pub label: String,
    pub side: Side,
    /// Full signed sum; the three parts below add up to it.
    pub value: f64,
    /// The `g = h` part.
    pub diagonal: f64,
    /// Parts from the other specs on the same list.
    pub cross_same: f64,
    /// Parts from the specs on the opposite list.
    pub cross_other: f64,
    pub comparator: f64,
    pub ratio: f64,
    /// `|diagonal| > |cross_same| + |cross_other|`.
    pub dominant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedPrimeSumReport {
    pub sigma: f64,
    pub t: f64,
    pub c: f64,
    pub primes: usize,
    /// `"(log T)^(1-σ)/log log T"` or `"log log log T"`.
    pub comparator_kind: String,
    pub entries: Vec<SignedSumEntry>,
}

impl SignedPrimeSumReport {
    /// `min_h |value_h| / comparator`, the measured exponent constant.
    pub fn measured_constant(&self) -> f64 {
        self.entries.iter().map(|e| e.ratio.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// `(log T)^{1−σ}/log log T`, or `log log log T` at `σ = 1`.
pub fn comparator_scale(sigma: f64, t: f64) -> f64 {
    let lt = t.ln();
    if sigma == 1.0 {
        lt.ln().ln()
    } else {
        lt.powf(1.0 - sigma) / lt.ln()
    }
}

pub fn signed_prime_sums(
    large: &[&LFunctionSpec],
    small: &[&LFunctionSpec],
    res: &Resonator,
    sigma: f64,
    t: f64,
) -> Result<SignedPrimeSumReport, ResonatorError> {
    let c = match (&res.kind, &res.params) {
        (ResonatorKind::Offline, ResonatorParams::Offline { c, .. }) => *c,
        _ => {
            return Err(ResonatorError::InvalidParameter(
                "signed prime sums need the off-line resonator".into(),
            ))
        }
    };
    let sides: Vec<(&LFunctionSpec, Side)> = large
        .iter()
        .map(|s| (*s, Side::Large))
        .chain(small.iter().map(|s| (*s, Side::Small)))
        .collect();
    // a_g(p) for every spec at every support prime
    let coeffs: Vec<Vec<Complex64>> = sides
        .iter()
        .map(|(spec, _)| {
            res.support
                .iter()
                .map(|sp| spec.a_prime(sp.p))
                .collect::<Result<Vec<_>, LfuncError>>()
        })
        .collect::<Result<_, _>>()?;
    let damp: Vec<f64> = res
        .support
        .iter()
        .map(|sp| 1.0 / ((1.0 + sp.r.norm_sqr()) * p_pow(sp.p as f64, sigma)))
        .collect();
    let comparator = comparator_scale(sigma, t);
    let mut entries = Vec::new();
    for (h, (spec, side)) in sides.iter().enumerate() {
        let mut parts = [Vec::new(), Vec::new(), Vec::new()];
        for (g, (_, g_side)) in sides.iter().enumerate() {
            // contribution of r's g-component: ±a_g(p)/C
            let g_sign = if *g_side == Side::Large { 1.0 } else { -1.0 };
            let slot = if g == h {
                0
            } else if g_side == side {
                1
            } else {
                2
            };
            let terms: Vec<f64> = (0..res.support.len())
                .map(|i| side.sign() * g_sign / c * (coeffs[g][i].conj() * coeffs[h][i]).re * damp[i])
                .collect();
            parts[slot].push(pairwise_sum(&terms));
        }
        let diagonal = pairwise_sum(&parts[0]);
        let cross_same = pairwise_sum(&parts[1]);
        let cross_other = pairwise_sum(&parts[2]);
        let value = diagonal + cross_same + cross_other;
        entries.push(SignedSumEntry {
            label: spec.label().to_string(),
            side: *side,
            value,
            diagonal,
            cross_same,
            cross_other,
            comparator,
            ratio: value / comparator,
            dominant: diagonal.abs() > cross_same.abs() + cross_other.abs(),
        });
    }
    Ok(SignedPrimeSumReport {
        sigma,
        t,
        c,
        primes: res.support.len(),
        comparator_kind: if sigma == 1.0 {
            "log log log T".into()
        } else {
            "(log T)^(1-σ)/log log T".into()
        },
        entries,
    })
}

/// `(log x / x) Σ_{p<=x} a_h(p) conj(a_g(p))` against its limit (1 if `h = g`, else 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCheck {
    pub h: String,
    pub g: String,
    pub value: Complex64,
    pub limit: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XEpsCalibration {
    /// `None` when no power of ten up to the cap satisfies the tolerance.
    pub x_eps: Option<f64>,
    pub eps: f64,
    /// Correlations at `x_eps` (or at the cap when calibration failed).
    pub checks: Vec<CorrelationCheck>,
}

/// Pairwise prime correlations of `specs` at cutoff `x`.
pub fn prime_correlations(specs: &[&LFunctionSpec], x: f64) -> Result<Vec<CorrelationCheck>, LfuncError> {
    let table = sieve_primes(x.floor().max(2.0) as u64)?;
    let primes = table.primes();
    let coeffs: Vec<Vec<Complex64>> = specs
        .iter()
        .map(|s| primes.par_iter().map(|&p| s.a_prime(p)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let scale = x.ln() / x;
    let mut out = Vec::new();
    for (i, h) in specs.iter().enumerate() {
        for (j, g) in specs.iter().enumerate().skip(i) {
            let re: Vec<f64> = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| (a * b.conj()).re).collect();
            let im: Vec<f64> = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| (a * b.conj()).im).collect();
            let value = Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * scale;
            let limit = if i == j { 1.0 } else { 0.0 };
            out.push(CorrelationCheck {
                h: h.label().to_string(),
                g: g.label().to_string(),
                value,
                limit,
                deviation: (value - limit).norm(),
            });
        }
    }
    Ok(out)
}

/// Smallest `x = 10^k` (`k >= 1`, `x <= x_max`) at which every pairwise
/// correlation is within `eps` of its limit.
pub fn calibrate_x_eps(specs: &[&LFunctionSpec], eps: f64, x_max: f64) -> Result<XEpsCalibration, LfuncError> {
    let mut x = 10.0;
    let mut last = Vec::new();
    while x <= x_max {
        let checks = prime_correlations(specs, x)?;
        if checks.iter().all(|c| c.deviation <= eps) {
            return Ok(XEpsCalibration {
                x_eps: Some(x),
                eps,
                checks,
            });
        }
        last = checks;
        x *= 10.0;
    }
    Ok(XEpsCalibration {
        x_eps: None,
        eps,
        checks: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonator::build_resonator_offline;

    #[test]
    fn single_zeta_closed_form() {
        let z = LFunctionSpec::zeta();
        let (c, t, beta, sigma) = (3.0, 1e5, 10.0, 0.75);
        let res = build_resonator_offline(&[&z], &[], beta, t, c, 2.0).unwrap();
        let rep = signed_prime_sums(&[&z], &[], &res, sigma, t).unwrap();
        let e = &rep.entries[0];
        let hi = beta * t.ln();
        let oracle: f64 = (2..=hi as u64)
            .filter(|&n| crate::arith::is_prime(n))
            .map(|p| -(1.0 / c) / ((1.0 + 1.0 / (c * c)) * (p as f64).powf(sigma)))
            .sum();
        assert!((e.value - oracle).abs() < 1e-12 * oracle.abs());
        assert!(e.value < 0.0);
        assert_eq!(e.cross_same, 0.0);
        assert!(e.dominant);
    }

    #[test]
    fn small_side_is_negative_too() {
        let z = LFunctionSpec::zeta();
        let res = build_resonator_offline(&[], &[&z], 10.0, 1e5, 4.0, 2.0).unwrap();
        let rep = signed_prime_sums(&[], &[&z], &res, 0.75, 1e5).unwrap();
        assert!(rep.entries[0].value < 0.0);
        assert_eq!(rep.entries[0].side, Side::Small);
    }

    #[test]
    fn comparator_at_one() {
        let t: f64 = 1e8;
        assert_eq!(comparator_scale(1.0, t), t.ln().ln().ln());
        assert!((comparator_scale(0.5, t) - t.ln().sqrt() / t.ln().ln()).abs() < 1e-14);
    }

    #[test]
    fn parts_add_up_and_scale_with_c() {
        let a = LFunctionSpec::parse("chi:5:1", 0).unwrap();
        let b = LFunctionSpec::parse("chi:5:2", 0).unwrap();
        let z = LFunctionSpec::zeta();
        let t = 1e6;
        let r4 = build_resonator_offline(&[&a, &b], &[&z], 20.0, t, 4.0, 10.0).unwrap();
        let r8 = build_resonator_offline(&[&a, &b], &[&z], 20.0, t, 8.0, 10.0).unwrap();
        let s4 = signed_prime_sums(&[&a, &b], &[&z], &r4, 0.8, t).unwrap();
        let s8 = signed_prime_sums(&[&a, &b], &[&z], &r8, 0.8, t).unwrap();
        let max_r2 = r4.support.iter().map(|s| s.r.norm_sqr()).fold(0.0, f64::max);
        for (e4, e8) in s4.entries.iter().zip(&s8.entries) {
            assert!((e4.diagonal + e4.cross_same + e4.cross_other - e4.value).abs() < 1e-12);
            // halving r halves each term up to the (1 + |r|²) damping
            let rel = (e4.diagonal / (2.0 * e8.diagonal) - 1.0).abs();
            assert!(rel <= max_r2 + 1e-12, "{rel}");
        }
    }

    #[test]
    fn cross_terms_of_characters_are_small() {
        // direct prime-sum oracle for the cross term of two characters mod 5
        let a = LFunctionSpec::parse("chi:5:1", 0).unwrap();
        let b = LFunctionSpec::parse("chi:5:2", 0).unwrap();
        let (t, beta, c, sigma) = (1e6, 20.0, 4.0, 0.8);
        let res = build_resonator_offline(&[&a, &b], &[], beta, t, c, 10.0).unwrap();
        let rep = signed_prime_sums(&[&a, &b], &[], &res, sigma, t).unwrap();
        let mut oracle = 0.0;
        for sp in &res.support {
            let (xa, xb) = (a.a_prime(sp.p).unwrap(), b.a_prime(sp.p).unwrap());
            oracle -= (xb.conj() * xa).re / c / ((1.0 + sp.r.norm_sqr()) * (sp.p as f64).powf(sigma));
        }
        let e = &rep.entries[0];
        assert!((e.cross_same - oracle).abs() < 1e-12);
        let scale = (beta * t.ln()).powf(1.0 - sigma) / t.ln().ln();
        assert!(e.cross_same.abs() <= 0.1 * scale);
    }

    #[test]
    fn x_eps_for_zeta_and_chi4() {
        let z = LFunctionSpec::zeta();
        let chi = LFunctionSpec::parse("chi:4:1", 0).unwrap();
        let cal = calibrate_x_eps(&[&z, &chi], 0.1, 1e6).unwrap();
        let x = cal.x_eps.expect("calibrates below 10^6");
        assert!(x >= 100.0);
        assert!(cal.checks.iter().all(|c| c.deviation <= 0.1));
    }
}
