//! Quick invariant suite behind the `verify` subcommand.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use resonance_core::align::{align_search, AlignmentProblem};
use resonance_core::lfunc::{
    count_zeros_rectangle, evaluate_l, roots_power_series, self_convolve, LFunctionSpec, Progression,
};
use resonance_core::moments::{mv_meanvalue, weight_w, WeightWindow};
use resonance_core::numeric::trapezoid;
use resonance_core::resonator::{build_resonator_critical, prime_sum_estimates, CriticalScale};
use resonance_core::signed_sums::prime_correlations;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run_verify(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let coeffs: Vec<Complex64> = (0..8)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    out.push(check("mean-value-off-diagonal", || {
        let mv = mv_meanvalue(&coeffs, 1000.0);
        let gap = (mv.integral - mv.diagonal).abs();
        Ok((gap <= mv.off_diagonal_bound + 1e-9, format!("|I - D| = {gap:.3e} <= {:.3e}", mv.off_diagonal_bound)))
    }));

    out.push(check("prime-orthogonality", || {
        let z = LFunctionSpec::zeta();
        let chi = LFunctionSpec::parse("chi:4:1", 0).map_err(|e| e.to_string())?;
        let checks = prime_correlations(&[&z, &chi], 1e6).map_err(|e| e.to_string())?;
        let worst = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
        Ok((worst < 0.15, format!("max deviation at x = 1e6: {worst:.4}")))
    }));

    out.push(check("estimate-suite-shape", || {
        let z = LFunctionSpec::zeta();
        let res = build_resonator_critical(&[&z], CriticalScale::Direct { script_l: 25.0 }, 1.2, 0.1)
            .map_err(|e| e.to_string())?;
        let report = prime_sum_estimates(&res, &[&z], 0.5).map_err(|e| e.to_string())?;
        let finite = report.entries.iter().all(|e| e.computed.is_finite());
        Ok((report.entries.len() == 6 && finite, format!("{} entries", report.entries.len())))
    }));

    out.push(check("fractional-self-convolution", || {
        // ((1 - X)^{-1/2})² = (1 - X)^{-1}
        let half = roots_power_series(&[Complex64::new(1.0, 0.0)], 0.5, 12);
        let sq = self_convolve(&half, 2);
        let err = sq.iter().map(|c| (c - 1.0).norm()).fold(0.0, f64::max);
        Ok((err < 1e-12, format!("max error {err:.2e}")))
    }));

    out.push(check("zeta-values", || {
        let z = LFunctionSpec::zeta();
        let two = evaluate_l(&z, Complex64::new(2.0, 0.0)).map_err(|e| e.to_string())?.value;
        let zero = evaluate_l(&z, Complex64::new(0.5, 14.134_725_141_734_693)).map_err(|e| e.to_string())?.value;
        let e2 = (two.re - PI * PI / 6.0).abs() + two.im.abs();
        Ok((e2 < 1e-10 && zero.norm() < 1e-8, format!("|ζ(2) - π²/6| = {e2:.1e}, |ζ(ρ₁)| = {:.1e}", zero.norm())))
    }));

    out.push(check("zero-count", || {
        // ordinates 14.13, 21.02, 25.01 lie in [10, 30]
        let z = LFunctionSpec::zeta();
        let c = count_zeros_rectangle(&z, 0.25, 10.0, 30.0).map_err(|e| e.to_string())?;
        Ok((c.count == 3, format!("{} zeros, winding {:.6}", c.count, c.winding)))
    }));

    out.push(check("chen-bound", || {
        let mut ok = true;
        let mut worst = f64::NEG_INFINITY;
        for primes in [[2u64, 3].as_slice(), &[2, 3, 5]] {
            let freqs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln() / (2.0 * PI)).collect();
            let phases: Vec<f64> = primes.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let weights = vec![1.0; primes.len()];
            let problem =
                AlignmentProblem::new(freqs.clone(), phases, weights, 0.0, 2000.0, 1).map_err(|e| e.to_string())?;
            let step = 1.0 / (8.0 * freqs.iter().copied().fold(0.0, f64::max));
            let r = align_search(&problem, step).map_err(|e| e.to_string())?;
            let slack = r.objective - (r.chen_bound + r.lipschitz * r.grid_step / 2.0);
            worst = worst.max(slack);
            ok &= slack <= 0.0;
        }
        Ok((ok, format!("max objective - bound = {worst:.3e}")))
    }));

    out.push(check("weight-mass", || {
        let t = 1000.0;
        let w = WeightWindow::new(t);
        let prog = Progression::covering(w.lower() - 10.0, w.upper() + 10.0, 0.01);
        let samples: Vec<f64> = prog.points().iter().map(|&x| weight_w(x, t)).collect();
        let mass = trapezoid(&samples, prog.step);
        let rel = (mass / w.total_mass() - 1.0).abs();
        let bounded = samples.iter().all(|&v| v >= 0.0 && v.is_finite());
        Ok((rel < 1e-9 && bounded, format!("relative mass error {rel:.2e}")))
    }));

    out
}
