//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N ...: PASS|FAIL` line. Run with `--nocapture` to see them.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resonance_core::align::{align_search, grid_argmin, AlignmentProblem};
use resonance_core::arith::{characters_mod, CoefficientSeries, coeff_correlation};
use resonance_core::lfunc::{
    count_zeros_rectangle, evaluate_l, local_factor_power, locate_zero, roots_power_series, self_convolve,
    LFunctionSpec, Progression, Rectangle,
};
use resonance_core::moments::{moment_ratio, mv_meanvalue, MomentGrid};
use resonance_core::numeric::trapezoid;
use resonance_core::resonator::{build_resonator_critical, prime_sum_estimates, CriticalScale};
use resonance_core::search::{
    assert_disjoint_windows, certify_good_interval, default_grid_count, kronecker_centers, search_critical,
    search_kronecker, search_offline, CriticalOptions, KroneckerOptions, OfflineOptions, SearchReport,
};

const CATALAN: f64 = 0.915_965_594_177_219_015;
const FIRST_ZERO: f64 = 14.134_725_141_734_693;

fn verdict(n: u32, name: &str, pass: bool, started: Instant, detail: &str) -> bool {
    println!(
        "criterion {n:>2} {name}: {} ({:.1} s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    pass
}

#[test]
fn criterion_01_mean_value_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let t = 1e4;
    let prog = Progression::covering(0.0, t, 0.01);
    let points = prog.points();
    let mut worst_quad = 0.0f64;
    let mut bound_ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        let coeffs: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let mv = mv_meanvalue(&coeffs, t);
        let samples: Vec<f64> = points
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
        worst_quad = worst_quad.max((brute - mv.integral).abs() / t);
        let diag: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>() * t;
        let mut off = 0.0;
        for (i, a) in coeffs.iter().enumerate() {
            for (j, b) in coeffs.iter().enumerate() {
                if i != j {
                    off += 2.0 * a.norm() * b.norm() / (((i + 1) as f64) / ((j + 1) as f64)).ln().abs();
                }
            }
        }
        bound_ok &= (mv.integral - diag).abs() <= off + 1e-9 * t;
    }
    let pass = worst_quad < 1e-6 && bound_ok;
    let detail = format!("max |quad − closed form|/T = {worst_quad:.2e}, off-diagonal bound held: {bound_ok}");
    assert!(verdict(1, "mean-value oracle", pass, started, &detail));
}

#[test]
fn criterion_02_orthogonality() {
    let started = Instant::now();
    let x = 1e6;
    let n = x as usize;
    let mut series = vec![CoefficientSeries::zeta(n)];
    for q in [4, 5] {
        for chi in characters_mod(q).unwrap() {
            if !chi.is_principal() {
                series.push(CoefficientSeries::from_character(&chi, n));
            }
        }
    }
    let mut worst_diag = 0.0f64;
    let mut worst_off = 0.0f64;
    for (i, a) in series.iter().enumerate() {
        for (j, b) in series.iter().enumerate() {
            let c = coeff_correlation(a, b, x).unwrap().value;
            if i == j {
                worst_diag = worst_diag.max((c - 1.0).norm());
            } else {
                worst_off = worst_off.max(c.norm());
            }
        }
    }
    let pass = worst_diag <= 0.1 && worst_off <= 0.05;
    let detail = format!(
        "{} series, max diagonal deviation {worst_diag:.4}, max off-diagonal {worst_off:.4}",
        series.len()
    );
    assert!(verdict(2, "orthogonality", pass, started, &detail));
}

#[test]
fn criterion_03_estimate_suite() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let res = build_resonator_critical(&[&z], CriticalScale::Direct { script_l: 25.0 }, 1.2, 0.1).unwrap();
    let report = prime_sum_estimates(&res, &[&z], 0.5).unwrap();
    let get = |id: &str| report.entries.iter().find(|e| e.id == id).unwrap();
    let in_band = |r: Option<f64>| r.is_some_and(|r| (0.5..=1.5).contains(&r));
    let square = get("square-sum");
    let twisted = get("twisted-sum");
    let shifted = get("shifted-square-sum");
    let max_r = get("max-coefficient");
    let checks = [
        in_band(square.ratio),
        in_band(twisted.ratio),
        shifted.computed == 0.0,
        max_r.computed < 0.5,
    ];
    let detail = format!(
        "square-sum ratio {:?}, twisted-sum ratio {:?}, shifted-square-sum {}, max |r(p)| {:.4}",
        square.ratio, twisted.ratio, shifted.computed, max_r.computed
    );
    assert!(verdict(3, "resonator prime-sum estimates", checks.iter().all(|&c| c), started, &detail));
}

#[test]
fn criterion_04_fractional_coefficients() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let nu = 6;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let d = rng.gen_range(1..=2);
        let roots: Vec<Complex64> = (0..d)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        for (u, v) in [(1u32, 2u32), (1, 3), (2, 3)] {
            let c = roots_power_series(&roots, u as f64 / v as f64, nu);
            let lhs = self_convolve(&c, v);
            // oracle: u-fold product of the geometric series Σ (αX)^k
            let mut rhs = vec![Complex64::new(0.0, 0.0); nu + 1];
            rhs[0] = Complex64::new(1.0, 0.0);
            for alpha in &roots {
                for _ in 0..u {
                    let mut next = vec![Complex64::new(0.0, 0.0); nu + 1];
                    for i in 0..=nu {
                        for k in 0..=nu - i {
                            next[i + k] += rhs[i] * alpha.powu(k as u32);
                        }
                    }
                    rhs = next;
                }
            }
            let direct = local_factor_power(&roots, u, nu);
            for k in 0..=nu {
                worst = worst.max((lhs[k] - rhs[k]).norm()).max((direct[k] - rhs[k]).norm());
            }
        }
    }
    let detail = format!("max coefficient error {worst:.2e}");
    assert!(verdict(4, "fractional coefficients", worst <= 1e-10, started, &detail));
}

#[test]
fn criterion_05_evaluator_precision() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let chi = LFunctionSpec::parse("chi:4:1", 0).unwrap();
    let at = |s: &LFunctionSpec, re: f64| evaluate_l(s, Complex64::new(re, 0.0)).unwrap().value;
    let errors = [
        (at(&z, 2.0) - PI * PI / 6.0).norm(),
        (at(&z, 0.0) + 0.5).norm(),
        (at(&chi, 1.0) - PI / 4.0).norm(),
        (at(&chi, 2.0) - CATALAN).norm(),
    ];
    let rect = Rectangle {
        sigma_low: 0.25,
        sigma_high: 0.75,
        t1: 13.5,
        t2: 14.5,
    };
    let zero = locate_zero(&z, rect, 1e-8).unwrap().unwrap();
    let zero_err = (zero - Complex64::new(0.5, FIRST_ZERO)).norm();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let pass = worst <= 1e-9 && zero_err <= 1e-6;
    let detail = format!("max value error {worst:.2e}, first zero located at {zero} (error {zero_err:.2e})");
    assert!(verdict(5, "evaluator precision", pass, started, &detail));
}

#[test]
fn criterion_06_zero_counting() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let three = count_zeros_rectangle(&z, 0.4, 10.0, 30.0).unwrap().count;
    let none = count_zeros_rectangle(&z, 0.6, 10.0, 100.0).unwrap().count;
    let cert = certify_good_interval(&[&z], 0.6, 1e4, 0.3, 1.5e4).unwrap();
    let pass = three == 3 && none == 0 && cert.certified;
    let detail = format!("counts {three} and {none}, certificate {}", cert.certified);
    assert!(verdict(6, "zero counting", pass, started, &detail));
}

#[test]
fn criterion_07_kronecker_solver() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
    let mut bound_ok = 0;
    let mut refine_ok = 0;
    let total = 200;
    for _ in 0..total {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=3);
        let mut chosen = primes.to_vec();
        for i in 0..n {
            let j = rng.gen_range(i..chosen.len());
            chosen.swap(i, j);
        }
        chosen.truncate(n);
        let freqs: Vec<f64> = chosen.iter().map(|&p| (p as f64).ln() / (2.0 * PI)).collect();
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let t1 = rng.gen_range(0.0..1e4);
        let problem = AlignmentProblem::new(freqs.clone(), phases, weights, t1, t1 + 2e4, m).unwrap();
        let max_freq = freqs.iter().copied().fold(0.0, f64::max);
        let r = align_search(&problem, 1.0 / (8.0 * max_freq)).unwrap();
        if r.objective <= r.chen_bound {
            bound_ok += 1;
        }
        let fine = Progression::covering(problem.t1, problem.t2, r.grid_step / 10.0);
        let (_, fine_obj) = grid_argmin(&problem, fine);
        if r.objective - fine_obj < r.lipschitz * r.grid_step {
            refine_ok += 1;
        }
    }
    let pass = bound_ok == total && refine_ok == total;
    let detail = format!("objective <= bound in {bound_ok}/{total}, finer grid within Lipschitz slack in {refine_ok}/{total}");
    assert!(verdict(7, "Kronecker solver", pass, started, &detail));
}

fn arm_summary(report: &SearchReport) -> String {
    let guided = report.guided.as_ref().map(|g| g.best.score).unwrap_or(f64::NAN);
    let controls: Vec<String> = report.controls.iter().map(|c| format!("{:.3}", c.best.score)).collect();
    format!(
        "guided {guided:.3} vs controls [{}], empty resonator {}",
        controls.join(", "),
        report.diagnostics.empty_resonator
    )
}

#[test]
fn criterion_08_two_arm_critical() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let chi = LFunctionSpec::parse("chi:4:1", 0).unwrap();
    let t = 1e6;
    let grid = default_grid_count(t, t);
    let mut pass = true;
    let mut details = Vec::new();
    for specs in [vec![&z], vec![&z, &chi]] {
        let report = search_critical(&specs, t, 0.1, 1.2, grid, &CriticalOptions::default()).unwrap();
        let wins = report.guided_wins();
        pass &= wins >= 4;
        details.push(format!("H={}: {wins}/5 wins ({})", specs.len(), arm_summary(&report)));
    }
    assert!(verdict(8, "two-arm search on the critical line", pass, started, &details.join("; ")));
}

#[test]
fn criterion_09_two_arm_offline() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let t = 1e5;
    let cert = certify_good_interval(&[&z], 0.6, t, 0.5, 1.5 * t).unwrap();
    assert!(cert.certified);
    let opts = OfflineOptions::default();
    let large = search_offline(&[&z], &[], 0.75, t, 20.0, 4.0, Some(&cert), &opts).unwrap();
    let small = search_offline(&[], &[&z], 0.75, t, 20.0, 4.0, Some(&cert), &opts).unwrap();
    let (wl, ws) = (large.guided_wins(), small.guided_wins());
    let pass = wl >= 4 && ws >= 4;
    let detail = format!(
        "large: {wl}/5 ({}); small: {ws}/5 ({})",
        arm_summary(&large),
        arm_summary(&small)
    );
    assert!(verdict(9, "two-arm search off the critical line", pass, started, &detail));
}

#[test]
fn criterion_10_kronecker_pipeline() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let t = 1e5;
    let cert = certify_good_interval(&[&z], 0.75, t, 0.5, 1.5 * t).unwrap();
    assert!(cert.certified);
    let opts = KroneckerOptions::default();
    let aligned = search_kronecker(&[&z], 0.75, t, &[0.0], 1.0, 1, Some(&cert), &opts).unwrap();
    let flipped = search_kronecker(&[&z], 0.75, t, &[PI], 1.0, 1, Some(&cert), &opts).unwrap();
    let e0 = &aligned.kronecker[0];
    let e1 = &flipped.kronecker[0];
    let sign_ok = e0.main_term > 0.0 && e1.main_term > 0.0;
    let magnitude_ok = e0.main_term >= 0.5 * e0.plain_sum;

    let chi4 = LFunctionSpec::parse("chi:4:1", 0).unwrap();
    let chi5 = LFunctionSpec::parse("chi:5:1", 0).unwrap();
    let centers = kronecker_centers(t, 1.0, 1, 3);
    let three = [&z, &chi4, &chi5];
    let cert3 = certify_good_interval(&three, 0.75, t, 0.5, 1.5 * t).unwrap();
    let disjoint = assert_disjoint_windows(&centers).is_ok()
        && search_kronecker(&three, 0.75, t, &[0.0; 3], 1.0, 1, Some(&cert3), &opts).is_ok();

    let pass = sign_ok && magnitude_ok && disjoint;
    let detail = format!(
        "φ=0 main term {:.4} vs 0.5·Σp^(-σ₀) = {:.4}; φ=π main term {:.4}; H=3 windows disjoint: {disjoint}",
        e0.main_term,
        0.5 * e0.plain_sum,
        e1.main_term
    );
    assert!(verdict(10, "Kronecker pipeline", pass, started, &detail));
}

#[test]
fn criterion_11_moment_ratio_growth() {
    let started = Instant::now();
    let z = LFunctionSpec::zeta();
    let ratio = |t: f64| {
        let res = build_resonator_critical(&[&z], CriticalScale::Height { delta: 0.2, t }, 1.2, 0.1).unwrap();
        moment_ratio(&[&z], &res, &[0], 2.0, 0.5, t, MomentGrid::default()).unwrap()
    };
    let low = ratio(1e4);
    let high = ratio(1e6);
    let pass = high.ratio > low.ratio;
    let detail = format!(
        "ratio at 1e4 = {:.4} ± {:.1e}, at 1e6 = {:.4} ± {:.1e}",
        low.ratio, low.ratio_error, high.ratio, high.ratio_error
    );
    assert!(verdict(11, "moment ratio growth", pass, started, &detail));
}
