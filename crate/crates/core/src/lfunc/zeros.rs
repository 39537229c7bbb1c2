use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{evaluate_l, LFunctionSpec, LfuncError};

/// Right edge used for zero counting; every supported L-function is
/// zero-free to the right of `Re s = 1`.
pub const RIGHT_EDGE: f64 = 3.0;

const MAX_NUDGES: usize = 6;
const NUDGE: f64 = 1.6e-4;
const MIN_STEP: f64 = 1e-7;
const MAX_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub sigma_low: f64,
    pub sigma_high: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Rectangle {
    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_low + self.sigma_high),
            0.5 * (self.t1 + self.t2),
        )
    }

    fn contains_strictly(&self, s: Complex64) -> bool {
        s.re > self.sigma_low && s.re < self.sigma_high && s.im > self.t1 && s.im < self.t2
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.sigma_low, self.t1),
            Complex64::new(self.sigma_high, self.t1),
            Complex64::new(self.sigma_high, self.t2),
            Complex64::new(self.sigma_low, self.t2),
        ]
    }
}

/// Result of an argument-principle count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: u32,
    /// Total change of `arg L` around the contour divided by `2π`.
    pub winding: f64,
    pub poles_inside: u32,
    pub evaluations: usize,
    pub nudges: usize,
    /// The contour actually integrated (after any nudging).
    pub rectangle: Rectangle,
}

enum TrackFailure {
    Close(Complex64),
    Fatal(LfuncError),
}

/// Phase change of `L` along the straight segment `a → b`, by adaptive
/// stepping with at most `π/4` of phase per step and a midpoint consistency
/// check.
fn track_segment(
    spec: &LFunctionSpec,
    a: Complex64,
    b: Complex64,
    evaluations: &mut usize,
) -> Result<f64, TrackFailure> {
    let eval = |s: Complex64, n: &mut usize| -> Result<Complex64, TrackFailure> {
        *n += 1;
        match evaluate_l(spec, s) {
            Ok(e) => Ok(e.value),
            Err(LfuncError::Pole { .. }) => Err(TrackFailure::Close(s)),
            Err(e) => Err(TrackFailure::Fatal(e)),
        }
    };
    let length = (b - a).norm();
    if length == 0.0 {
        return Ok(0.0);
    }
    let dir = (b - a) / length;
    let min_step = MIN_STEP.min(length * 1e-4);
    let mut x = 0.0;
    let mut lx = eval(a, evaluations)?;
    let mut phase = 0.0;
    let mut h = 0.05f64.min(length);
    while x < length {
        let step = h.min(length - x);
        let next = if x + step >= length { length } else { x + step };
        let l_next = eval(a + dir * next, evaluations)?;
        let l_mid = eval(a + dir * (0.5 * (x + next)), evaluations)?;
        let scale = lx.norm().max(l_next.norm()).max(1e-300);
        if l_next.norm() < 1e-10 * scale || l_mid.norm() < 1e-10 * scale {
            return Err(TrackFailure::Close(a + dir * (0.5 * (x + next))));
        }
        let full = (l_next / lx).arg();
        let split = (l_mid / lx).arg() + (l_next / l_mid).arg();
        if full.abs() > FRAC_PI_4 || (full - split).abs() > 1e-9 {
            h = step / 2.0;
            if h < min_step {
                return Err(TrackFailure::Close(a + dir * x));
            }
            continue;
        }
        phase += split;
        x = next;
        lx = l_next;
        h = (step * 1.5).min(MAX_STEP);
    }
    Ok(phase)
}

fn winding_number(
    spec: &LFunctionSpec,
    rect: &Rectangle,
    evaluations: &mut usize,
) -> Result<f64, TrackFailure> {
    let c = rect.corners();
    let mut total = 0.0;
    for i in 0..4 {
        total += track_segment(spec, c[i], c[(i + 1) % 4], evaluations)?;
    }
    Ok(total / (2.0 * PI))
}

fn poles_inside(spec: &LFunctionSpec, rect: &Rectangle) -> u32 {
    if spec.pole_order() > 0 && rect.contains_strictly(Complex64::new(1.0, 0.0)) {
        spec.pole_order()
    } else {
        0
    }
}

/// Counts zeros of `L` (with multiplicity) in an arbitrary rectangle.
pub fn count_in_rectangle(spec: &LFunctionSpec, rect: Rectangle) -> Result<ZeroCount, LfuncError> {
    if !(rect.t2 >= rect.t1) || !(rect.sigma_high > rect.sigma_low) {
        return Err(LfuncError::InvalidInput(format!(
            "degenerate rectangle {rect:?}"
        )));
    }
    if rect.t2 == rect.t1 {
        return Ok(ZeroCount {
            count: 0,
            winding: 0.0,
            poles_inside: 0,
            evaluations: 0,
            nudges: 0,
            rectangle: rect,
        });
    }
    let mut evaluations = 0;
    let mut last_close = Complex64::new(f64::NAN, f64::NAN);
    // small boxes (zero location) get proportionally small nudges
    let nudge = NUDGE.min(0.02 * (rect.t2 - rect.t1).min(rect.sigma_high - rect.sigma_low));
    for attempt in 0..=MAX_NUDGES {
        let mut r = rect;
        if attempt > 0 {
            // alternate outward and inward shifts of growing size, all <= 1e-3
            let d = nudge * attempt as f64 * if attempt % 2 == 1 { 1.0 } else { -1.0 };
            r.sigma_low -= d;
            r.sigma_high += d;
            r.t1 -= d;
            r.t2 += d;
        }
        match winding_number(spec, &r, &mut evaluations) {
            Ok(w) => {
                let rounded = w.round();
                if (w - rounded).abs() > 0.05 {
                    last_close = r.center();
                    continue;
                }
                let poles = poles_inside(spec, &r);
                let zeros = rounded + poles as f64;
                if zeros < 0.0 {
                    continue;
                }
                return Ok(ZeroCount {
                    count: zeros as u32,
                    winding: w,
                    poles_inside: poles,
                    evaluations,
                    nudges: attempt,
                    rectangle: r,
                });
            }
            Err(TrackFailure::Close(s)) => last_close = s,
            Err(TrackFailure::Fatal(e)) => return Err(e),
        }
    }
    Err(LfuncError::ContourTooClose {
        label: spec.label().to_string(),
        attempts: MAX_NUDGES,
        detail: format!("last difficulty near s = {last_close}"),
    })
}

/// Number of zeros with `Re ρ >= σ_low` and `t1 <= Im ρ <= t2`, from the
/// winding number of `L` around the rectangle with right edge `Re s = 3`.
pub fn count_zeros_rectangle(
    spec: &LFunctionSpec,
    sigma_low: f64,
    t1: f64,
    t2: f64,
) -> Result<ZeroCount, LfuncError> {
    if t2 < t1 {
        return Err(LfuncError::InvalidInput(format!("t2 = {t2} < t1 = {t1}")));
    }
    if sigma_low >= RIGHT_EDGE {
        return Err(LfuncError::InvalidInput(format!(
            "sigma_low = {sigma_low} must be below {RIGHT_EDGE}"
        )));
    }
    count_in_rectangle(
        spec,
        Rectangle {
            sigma_low,
            sigma_high: RIGHT_EDGE,
            t1,
            t2,
        },
    )
}

/// Locates one zero inside `rect` by repeated bisection of the rectangle,
/// returning the center of a box of size at most `tol`.
pub fn locate_zero(
    spec: &LFunctionSpec,
    rect: Rectangle,
    tol: f64,
) -> Result<Option<Complex64>, LfuncError> {
    let mut r = count_in_rectangle(spec, rect)?;
    if r.count == 0 {
        return Ok(None);
    }
    let mut box_ = r.rectangle;
    loop {
        let width = box_.sigma_high - box_.sigma_low;
        let height = box_.t2 - box_.t1;
        if width.max(height) <= tol {
            return Ok(Some(box_.center()));
        }
        let (first, second) = if height >= width {
            let mid = 0.5 * (box_.t1 + box_.t2);
            (
                Rectangle { t2: mid, ..box_ },
                Rectangle { t1: mid, ..box_ },
            )
        } else {
            let mid = 0.5 * (box_.sigma_low + box_.sigma_high);
            (
                Rectangle {
                    sigma_high: mid,
                    ..box_
                },
                Rectangle {
                    sigma_low: mid,
                    ..box_
                },
            )
        };
        r = count_in_rectangle(spec, first)?;
        if r.count > 0 {
            box_ = r.rectangle;
            continue;
        }
        r = count_in_rectangle(spec, second)?;
        if r.count > 0 {
            box_ = r.rectangle;
            continue;
        }
        // the zero sits on the shared edge; report the current box
        return Ok(Some(box_.center()));
    }
}
