use std::f64::consts::{E, PI};

use resonance_core::arith::sieve_primes;
use resonance_core::lfunc::LFunctionSpec;
use resonance_core::search::{
    certify_good_interval, proximity_tau, search_critical, search_kronecker, search_offline, CriticalOptions,
    GoodIntervalCertificate, KroneckerOptions, OfflineOptions, PipelineId,
};

fn zeta_certificate(sigma0: f64, t: f64, alpha: f64) -> GoodIntervalCertificate {
    let z = LFunctionSpec::zeta();
    let cert = certify_good_interval(&[&z], sigma0, t, alpha, 1.5 * t).unwrap();
    assert!(cert.certified);
    cert
}

/// `Σ_{x/e < p < e·x} cos(t log p − φ) / p^σ₀`, summed directly.
fn window_cosine_sum(x: f64, sigma0: f64, t: f64, phi: f64) -> (f64, f64) {
    let table = sieve_primes((E * x).ceil() as u64).unwrap();
    let mut cos_sum = 0.0;
    let mut plain = 0.0;
    for &p in table.primes() {
        let pf = p as f64;
        if pf > x / E && pf < E * x {
            let w = pf.powf(-sigma0);
            plain += w;
            cos_sum += w * (t * pf.ln() - phi).cos();
        }
    }
    (cos_sum, plain)
}

#[test]
fn aligned_point_satisfies_the_cosine_inequality() {
    let z = LFunctionSpec::zeta();
    let (sigma0, t) = (0.75, 1e4);
    let cert = zeta_certificate(sigma0, t, 0.5);
    let report = search_kronecker(&[&z], sigma0, t, &[0.0], 1.0, 1, Some(&cert), &KroneckerOptions::default()).unwrap();
    assert_eq!(report.pipeline, PipelineId::Kronecker);
    let align = report.diagnostics.alignment.as_ref().unwrap();
    let entry = &report.kronecker[0];
    let t0 = report.best_t.unwrap();
    assert_eq!(t0, align.t_star);
    assert!(t0 >= report.window.0 && t0 <= report.window.1);

    // cos(2πx) >= 1 − 2π²‖x‖² summed with the weights p^{−σ₀}
    let (cos_sum, plain) = window_cosine_sum(entry.x_h, sigma0, t0, 0.0);
    assert!((cos_sum - entry.aligned_cos_sum).abs() < 1e-9 * plain);
    assert!((plain - entry.plain_sum).abs() < 1e-9 * plain);
    assert!(cos_sum >= plain - 2.0 * PI * PI * align.objective - 1e-9, "{cos_sum} vs {plain} − 2π²·{}", align.objective);

    let tau = proximity_tau(t, sigma0);
    assert!((entry.t_h - t0).abs() <= tau + 1e-9);
    assert!(entry.t_h >= cert.interval.0 && entry.t_h <= cert.interval.1);
}

#[test]
fn flipped_target_flips_the_aligned_sum() {
    let z = LFunctionSpec::zeta();
    let (sigma0, t) = (0.75, 1e4);
    let cert = zeta_certificate(sigma0, t, 0.5);
    let opts = KroneckerOptions::default();
    let up = search_kronecker(&[&z], sigma0, t, &[0.0], 1.0, 1, Some(&cert), &opts).unwrap();
    let down = search_kronecker(&[&z], sigma0, t, &[PI], 1.0, 1, Some(&cert), &opts).unwrap();
    let x = up.kronecker[0].x_h;
    let (at_up, _) = window_cosine_sum(x, sigma0, up.best_t.unwrap(), 0.0);
    let (at_down, _) = window_cosine_sum(x, sigma0, down.best_t.unwrap(), 0.0);
    assert!(at_up > 0.0);
    assert!(at_down <= -0.5 * at_up, "{at_down} vs {at_up}");
}

#[test]
fn critical_search_is_deterministic_and_exports_csv() {
    let z = LFunctionSpec::zeta();
    let options = CriticalOptions {
        script_l: Some(8.0),
        ..CriticalOptions::default()
    };
    let a = search_critical(&[&z], 1e4, 0.1, 1.2, 4000, &options).unwrap();
    let b = search_critical(&[&z], 1e4, 0.1, 1.2, 4000, &options).unwrap();
    assert_eq!(a, b);
    assert!(!a.diagnostics.empty_resonator);
    assert_eq!(a.controls.len(), 5);
    let guided = a.guided.as_ref().unwrap();
    assert_eq!(guided.candidates.len(), 64);
    for arm in std::iter::once(guided).chain(&a.controls) {
        for c in &arm.candidates {
            assert!(c.t >= a.window.0 && c.t <= a.window.1);
        }
    }
    let csv = a.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 1 + 64 * 6);
    assert!(csv.lines().next().unwrap().starts_with("arm,seed,seed_t,t,r_abs"));
    // H = 1 leaves the predicted threshold undefined
    assert!(a.threshold.value.is_none());
}

#[test]
fn offline_threshold_at_the_edge_of_the_strip() {
    let z = LFunctionSpec::zeta();
    let t = 1e4;
    let cert = zeta_certificate(0.6, t, 0.3);
    let options = OfflineOptions {
        grid_count: Some(2000),
        ..OfflineOptions::default()
    };
    let report = search_offline(&[&z], &[], 1.0, t, 20.0, 4.0, Some(&cert), &options).unwrap();
    assert_eq!(report.threshold.formula, "(log log T)^D");
    let d = report.threshold.d;
    let expected = t.ln().ln().powf(d);
    assert!((report.threshold.value.unwrap() / expected - 1.0).abs() < 1e-12);
    assert!(report.best_t.is_some_and(|bt| bt >= cert.inner_window().0 && bt <= cert.inner_window().1));
}

#[test]
fn nonempty_resonator_beats_uniform_controls() {
    // at T = 10^6 the default scale leaves the support empty; 𝓛 = 8 forces primes 67, 71, 73
    let z = LFunctionSpec::zeta();
    let t = 1e6;
    let options = CriticalOptions {
        script_l: Some(8.0),
        ..CriticalOptions::default()
    };
    let grid = resonance_core::search::default_grid_count(t, t);
    let report = search_critical(&[&z], t, 0.1, 1.2, grid, &options).unwrap();
    assert!(!report.diagnostics.empty_resonator);
    assert!(report.guided_wins() >= 4, "{} wins", report.guided_wins());
}
