use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::lfunc::{evaluate_l, Exponent, LFunctionSpec, Progression};
use resonance_core::moments::{
    difference_diagnostic, moment_ratio, mv_meanvalue, offline_twisted_moment, twisted_moment, weight_w,
    MomentError, MomentGrid,
};
use resonance_core::numeric::trapezoid;
use resonance_core::resonator::{
    build_resonator_critical, build_resonator_offline, CriticalScale, Resonator,
};
use resonance_core::search::certify_good_interval;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn empty_critical(z: &LFunctionSpec, t: f64) -> Resonator {
    let res = build_resonator_critical(&[z], CriticalScale::Height { delta: 0.2, t }, 1.2, 0.1).unwrap();
    assert!(res.empty_support);
    res
}

#[test]
fn mean_value_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = 2000.0;
    for _ in 0..5 {
        let n = rng.gen_range(1..=10);
        let coeffs: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let mv = mv_meanvalue(&coeffs, t);
        let prog = Progression::covering(0.0, t, 0.01);
        let samples: Vec<f64> = prog
            .points()
            .iter()
            .map(|&x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * Complex64::from_polar(1.0, -x * ((i + 1) as f64).ln()))
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect();
        let brute = trapezoid(&samples, prog.step);
        assert!((brute - mv.integral).abs() < 1e-6 * t, "{brute} vs {}", mv.integral);
        assert!((mv.integral - mv.diagonal).abs() <= mv.off_diagonal_bound + 1e-9);
    }
}

#[test]
fn second_moment_of_zeta() {
    // mean of |ζ(1/2+it)|² is log(t/2π) + 2γ
    let z = LFunctionSpec::zeta();
    let t = 1e4;
    let res = empty_critical(&z, t);
    let ratio = moment_ratio(&[&z], &res, &[0], 2.0, 0.5, t, MomentGrid::default()).unwrap();
    let prog = Progression::covering(1.2 * t - 8.0, 1.8 * t + 8.0, 0.05);
    let samples: Vec<f64> = prog
        .points()
        .iter()
        .map(|&x| weight_w(x, t) * ((x / (2.0 * PI)).ln() + 2.0 * EULER_GAMMA) / t)
        .collect();
    let oracle = trapezoid(&samples, prog.step);
    assert_eq!(ratio.product, 1.0);
    assert!(ratio.ratio > 0.0);
    assert!((ratio.ratio / oracle - 1.0).abs() < 0.05, "{} vs {oracle}", ratio.ratio);
}

#[test]
fn halving_the_step_stays_within_error() {
    let z = LFunctionSpec::zeta();
    let t = 2000.0;
    let res = build_resonator_critical(&[&z], CriticalScale::Direct { script_l: 8.0 }, 1.2, 0.1).unwrap();
    let h = MomentGrid::default_step(t);
    let coarse = twisted_moment(&[&z], &res, &[0], 2.0, 0.5, t, MomentGrid::with_step(h)).unwrap();
    let fine = twisted_moment(&[&z], &res, &[0], 2.0, 0.5, t, MomentGrid::with_step(h / 2.0)).unwrap();
    assert!(coarse.error >= 0.0);
    assert!((coarse.value - fine.value).abs() <= coarse.error, "{coarse:?} {fine:?}");
    let json = serde_json::to_string(&fine).unwrap();
    assert!(json.contains("\"step\""));
}

#[test]
fn cauchy_schwarz_on_a_product() {
    let z = LFunctionSpec::zeta();
    let chi = LFunctionSpec::parse("chi:4:1", 0).unwrap();
    let t = 1000.0;
    let res = build_resonator_critical(&[&z, &chi], CriticalScale::Direct { script_l: 8.0 }, 1.2, 0.1).unwrap();
    let g = MomentGrid::default();
    let both = twisted_moment(&[&z, &chi], &res, &[0, 1], 1.0, 0.5, t, g).unwrap();
    let first = twisted_moment(&[&z, &chi], &res, &[0], 2.0, 0.5, t, g).unwrap();
    let second = twisted_moment(&[&z, &chi], &res, &[1], 2.0, 0.5, t, g).unwrap();
    let bound = (first.value * second.value).sqrt();
    assert!(both.value <= bound + both.error, "{} > {bound}", both.value);
}

#[test]
fn resonator_mean_square_is_diagonal() {
    // q = 0: (1/T)∫|R|²w = Σ|r(n)|²·(3/5)√π + off-diagonal terms with |ŵ(ℓ)| <= 2√π e^{−ℓ²/4}/|ℓ|
    let z = LFunctionSpec::zeta();
    let t = 1e4;
    let res = build_resonator_critical(&[&z], CriticalScale::Direct { script_l: 8.0 }, 1.2, 0.1).unwrap();
    let terms = res.expansion_terms().unwrap();
    assert!(terms.len() > 1);
    let m = twisted_moment(&[&z], &res, &[0], 0.0, 0.5, t, MomentGrid::default()).unwrap();
    let diag: f64 = terms.iter().map(|e| e.r.norm_sqr()).sum::<f64>() * 0.6 * PI.sqrt();
    let mut off = 0.0;
    for a in terms {
        for b in terms {
            if a.n != b.n {
                let l = (a.n as f64 / b.n as f64).ln().abs();
                off += a.r.norm() * b.r.norm() * 2.0 * PI.sqrt() * (-l * l / 4.0).exp() / l / t;
            }
        }
    }
    assert!((m.value - diag).abs() <= off + m.error + 1e-12, "{} vs {diag} ± {off}", m.value);
}

#[test]
fn offline_moment_needs_certificate_and_matches_mean_value() {
    let z = LFunctionSpec::zeta();
    let one = LFunctionSpec::unit();
    let t = 1.2e4;
    let alpha: f64 = 0.99;
    let a = 1.5 * t;
    let res = build_resonator_offline(&[&z], &[], 1.0, t, 1e9, 1e9).unwrap();
    assert!(res.empty_support);
    assert!(matches!(
        offline_twisted_moment(&z, &one, &res, 0.8, a, t, alpha, None, None),
        Err(MomentError::Uncertified { .. })
    ));
    // identical numerator and denominator: the integrand is |R(it)|² and needs no certificate
    let same = offline_twisted_moment(&one, &one, &res, 0.8, a, t, alpha, None, None).unwrap();
    assert!((same.value - 1.0).abs() < 1e-9);
    assert_eq!(same.comparator, Some(1.0));

    let cert = certify_good_interval(&[&z], 0.75, t, alpha, a).unwrap();
    assert!(cert.certified);
    let m = offline_twisted_moment(&z, &one, &res, 0.8, a, t, alpha, Some(&cert), None).unwrap();
    let zeta_16 = evaluate_l(&z, Complex64::new(1.6, 0.0)).unwrap().value.re;
    assert!((m.value / zeta_16 - 1.0).abs() < 0.1, "{} vs ζ(1.6) = {zeta_16}", m.value);
}

#[test]
fn offline_same_spec_companion_is_product_norm() {
    let z = LFunctionSpec::zeta();
    let t = 1e5;
    let res = build_resonator_offline(&[&z], &[], 20.0, t, 4.0, 2.0).unwrap();
    let m = offline_twisted_moment(&z, &z, &res, 0.8, 1.5 * t, t, 0.3, None, None);
    // ζ/ζ still names ζ, so a certificate is required
    assert!(m.is_err());
    let cert = certify_good_interval(&[&z], 0.6, t, 0.3, 1.5 * t).unwrap();
    let m = offline_twisted_moment(&z, &z, &res, 0.8, 1.5 * t, t, 0.3, Some(&cert), None).unwrap();
    assert!((m.comparator.unwrap() / res.product_norm() - 1.0).abs() < 1e-12);
}

#[test]
fn difference_diagnostic_reports_both_factors() {
    let z = LFunctionSpec::zeta();
    let t = 2000.0;
    let res = build_resonator_critical(&[&z], CriticalScale::Direct { script_l: 8.0 }, 1.2, 0.1).unwrap();
    let d = difference_diagnostic(&[&z], &res, &[0], Exponent::new(1, 1).unwrap(), 0.5, t, MomentGrid::default());
    // X is astronomically large here, so the diagnostic refuses to expand
    assert!(matches!(d, Err(MomentError::InvalidInput(_))));
    let res = build_resonator_critical(&[&z], CriticalScale::Height { delta: 0.6, t }, 1.2, 0.1).unwrap();
    let d = difference_diagnostic(&[&z], &res, &[0], Exponent::new(1, 1).unwrap(), 0.5, t, MomentGrid::default())
        .unwrap();
    assert!(d.s.value > 0.0 && d.p1.value > 0.0 && d.p2.value > 0.0);
    assert!(d.d.value >= 0.0);
    assert!(d.relative.is_finite());
}
