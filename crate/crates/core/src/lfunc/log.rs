use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{evaluate_l, evaluate_zeta, LFunctionSpec, LfuncError};

/// Continuation path for `log L`: from the anchor `σ_a` (on the real axis)
/// vertically to `σ_a + it`, then horizontally to `s = σ + it`.
///
/// On `Re s = σ_a` the Euler-log series satisfies
/// `|log L| <= degree · log ζ(σ_a) < π`, so the continuous branch along the
/// vertical leg coincides with the principal logarithm and that leg needs no
/// stepping. Only the horizontal leg is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBranchPath {
    pub anchor: f64,
}

impl Default for LogBranchPath {
    fn default() -> Self {
        Self { anchor: 2.0 }
    }
}

const MAX_PHASE_STEP: f64 = FRAC_PI_4;
const MIN_STEP: f64 = 1e-9;
const MAX_STEP: f64 = 0.25;

/// Continuous logarithm of `L(s)` along `path`.
pub fn log_l(spec: &LFunctionSpec, s: Complex64, path: LogBranchPath) -> Result<Complex64, LfuncError> {
    if spec.degree() == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if path.anchor <= 1.0 {
        return Err(LfuncError::InvalidInput(format!(
            "log anchor {} must lie right of the line Re s = 1",
            path.anchor
        )));
    }
    let bound = spec.degree() as f64 * evaluate_zeta(Complex64::new(path.anchor, 0.0))?.re.ln();
    if bound >= PI {
        return Err(LfuncError::InvalidInput(format!(
            "anchor {} too close to 1 for degree {}",
            path.anchor,
            spec.degree()
        )));
    }

    let eval = |sigma: f64| -> Result<Complex64, LfuncError> {
        evaluate_l(spec, Complex64::new(sigma, s.im)).map(|e| e.value)
    };
    let zero_error = |sigma: f64| LfuncError::ZeroCrossing {
        label: spec.label().to_string(),
        s: Complex64::new(sigma, s.im),
    };

    let mut x = path.anchor;
    let mut lx = eval(x)?;
    let mut acc = lx.ln();
    let target = s.re;
    let mut h: f64 = 0.05;
    while (target - x).abs() > 0.0 {
        let dir = (target - x).signum();
        let step = h.min((target - x).abs());
        let next = if step == (target - x).abs() { target } else { x + dir * step };
        let mid = 0.5 * (x + next);
        let l_next = eval(next)?;
        let l_mid = eval(mid)?;
        let scale = lx.norm().max(l_next.norm());
        if l_next.norm() <= 1e-12 * scale || l_mid.norm() <= 1e-12 * scale {
            return Err(zero_error(mid));
        }
        let full = (l_next / lx).ln();
        let split = (l_mid / lx).ln() + (l_next / l_mid).ln();
        if full.im.abs() > MAX_PHASE_STEP || (full - split).norm() > 1e-9 {
            h = step / 2.0;
            if h < MIN_STEP {
                return Err(zero_error(x));
            }
            continue;
        }
        acc += split;
        x = next;
        lx = l_next;
        h = (step * 1.5).min(MAX_STEP);
    }

    // pin the result to the exact value of L(s), keeping the tracked branch
    let arg = lx.arg();
    let k = ((acc.im - arg) / (2.0 * PI)).round();
    Ok(Complex64::new(lx.norm().ln(), arg + 2.0 * PI * k))
}
