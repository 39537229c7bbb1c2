//! Extreme-value search pipelines.
//!
//! * `critical`: large values of `min_h |L_h(1/2+it)|` on `[T, 2T]`, guided by
//!   the peaks of the critical-line resonator.
//! * `offline`: large values of `min(min_large |L_h|, 1/max_small |L_h|)` at
//!   `σ + it` on a certified zero-free window, guided by the product resonator.
//! * `kronecker`: phase alignment of the primes in disjoint windows so that
//!   `Re(e^{−iφ_h} log L_h(σ₀+it_h))` is large for every `h`.
//!
//! Each large-value pipeline compares a guided arm against seeded uniform
//! control arms evaluated with the same local refinement.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{
    align_search, convol_lower_bound, lambda_min, AlignError, AlignmentProblem, AlignmentResult,
};
use crate::arith::sieve_primes;
use crate::lfunc::{
    count_zeros_rectangle, evaluate_l, locate_zero, LFunctionKind, LFunctionSpec, LfuncError, Progression,
    Rectangle,
};
use crate::moments::MomentGrid;
use crate::resonator::{
    build_resonator_critical, build_resonator_offline, evaluate_resonator_on_line, CriticalScale, Resonator,
    ResonatorError, DEFAULT_EPS_P,
};
use crate::signed_sums::{comparator_scale, signed_prime_sums, SignedPrimeSumReport};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search input: {0}")]
    InvalidInput(String),
    #[error("a zero-free certificate covering [{lo}, {hi}] at σ = {sigma} is required")]
    CertificateRequired { sigma: f64, lo: f64, hi: f64 },
    #[error("prime window ({lo}, {hi}) for `{label}` contains no usable prime")]
    DegenerateWindow { label: String, lo: f64, hi: f64 },
    #[error("prime windows {h} and {g} overlap")]
    OverlappingWindows { h: usize, g: usize },
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Resonator(#[from] ResonatorError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

// ---------------------------------------------------------------------------
// zero-free certificates

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecZeroCount {
    pub label: String,
    pub count: u32,
    pub winding: f64,
    pub evaluations: usize,
    pub nudges: usize,
    pub rectangle: Rectangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRejection {
    pub label: String,
    pub count: u32,
    /// Approximate location of one zero in the rectangle.
    pub zero: Option<Complex64>,
}

/// A window `[A + T^α/2, A + 5T^α/2]` on which every listed L-function has no
/// zero with real part at least `σ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodIntervalCertificate {
    pub spec_labels: Vec<String>,
    pub sigma0: f64,
    pub t: f64,
    pub alpha: f64,
    pub a: f64,
    pub interval: (f64, f64),
    pub counts: Vec<SpecZeroCount>,
    pub certified: bool,
    pub rejections: Vec<ZeroRejection>,
}

impl GoodIntervalCertificate {
    /// `[A + T^α, A + 2T^α]`, the window the off-line pipelines work on.
    pub fn inner_window(&self) -> (f64, f64) {
        let len = self.t.powf(self.alpha);
        (self.a + len, self.a + 2.0 * len)
    }

    pub fn covers(&self, labels: &[String], sigma: f64, lo: f64, hi: f64) -> bool {
        self.certified
            && sigma >= self.sigma0
            && lo >= self.interval.0
            && hi <= self.interval.1
            && labels.iter().all(|l| self.spec_labels.contains(l))
    }
}

pub const ZERO_LOCATION_TOL: f64 = 1e-6;

pub fn certify_good_interval(
    specs: &[&LFunctionSpec],
    sigma0: f64,
    t: f64,
    alpha: f64,
    a: f64,
) -> Result<GoodIntervalCertificate, SearchError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SearchError::InvalidInput(format!("α = {alpha} must lie in (0, 1)")));
    }
    if !(t > 0.0 && a >= 1.25 * t && a <= 1.75 * t) {
        return Err(SearchError::InvalidInput(format!(
            "A = {a} must lie in [5T/4, 7T/4] for T = {t}"
        )));
    }
    let len = t.powf(alpha);
    let interval = (a + 0.5 * len, a + 2.5 * len);
    let mut counts = Vec::new();
    let mut rejections = Vec::new();
    let mut labels = Vec::new();
    for spec in specs {
        if matches!(spec.kind(), LFunctionKind::Unit) {
            continue;
        }
        labels.push(spec.label().to_string());
        let zc = count_zeros_rectangle(spec, sigma0, interval.0, interval.1)?;
        if zc.count > 0 {
            rejections.push(ZeroRejection {
                label: spec.label().to_string(),
                count: zc.count,
                zero: locate_zero(spec, zc.rectangle, ZERO_LOCATION_TOL)?,
            });
        }
        counts.push(SpecZeroCount {
            label: spec.label().to_string(),
            count: zc.count,
            winding: zc.winding,
            evaluations: zc.evaluations,
            nudges: zc.nudges,
            rectangle: zc.rectangle,
        });
    }
    Ok(GoodIntervalCertificate {
        spec_labels: labels,
        sigma0,
        t,
        alpha,
        a,
        interval,
        counts,
        certified: rejections.is_empty(),
        rejections,
    })
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineId {
    Critical,
    Offline,
    Kronecker,
}

/// Candidate-selection settings shared by the two-arm pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmOptions {
    /// Candidates per arm.
    pub k: usize,
    /// One control arm per seed.
    pub seeds: Vec<u64>,
    /// Refinement points on each side of a candidate.
    pub refine: usize,
}

impl Default for ArmOptions {
    fn default() -> Self {
        Self {
            k: 64,
            seeds: vec![1, 2, 3, 4, 5],
            refine: 4,
        }
    }
}

/// Seed of the uniform draw that replaces the guided arm when `R` is constant.
pub const FALLBACK_SEED: u64 = 0x5EED_F00D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "pipeline")]
pub enum SearchParameters {
    Critical {
        t: f64,
        delta: f64,
        lambda: f64,
        eps_p: f64,
        script_l: Option<f64>,
        grid_count: usize,
        arms: ArmOptions,
    },
    Offline {
        sigma: f64,
        t: f64,
        beta: f64,
        c: f64,
        x_eps: f64,
        large: usize,
        small: usize,
        a: f64,
        alpha: f64,
        grid_count: usize,
        arms: ArmOptions,
    },
    Kronecker {
        sigma0: f64,
        t: f64,
        phis: Vec<f64>,
        c: f64,
        m: u32,
        a: f64,
        alpha: f64,
        align_step: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Grid point or random draw the candidate started from.
    pub seed_t: f64,
    /// `|R|` at `seed_t`.
    pub r_abs: f64,
    /// Best point of the refinement stencil.
    pub t: f64,
    /// Per-spec `|L_h|` at `t`.
    pub values: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    /// `"guided"`, `"fallback"` or `"control"`.
    pub name: String,
    pub seed: Option<u64>,
    pub candidates: Vec<Candidate>,
    pub best: Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub formula: String,
    /// Constant used in the formula; measured for the off-line pipeline.
    pub d: f64,
    pub scale: f64,
    /// `None` when the formula degenerates (one function in the critical pipeline).
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerEntry {
    pub label: String,
    pub phi: f64,
    pub x_h: f64,
    /// Open prime window `(x_h/e, e·x_h)`.
    pub window: (f64, f64),
    pub primes: usize,
    /// `Σ_{p in window} p^{−σ₀}`.
    pub plain_sum: f64,
    /// `Σ_{p in window} |a(p)| p^{−σ₀}`.
    pub weight_sum: f64,
    /// `Σ_{p in window} |a(p)| p^{−σ₀} cos(arg a(p) − φ − t₀ log p)` at the aligned `t₀`.
    pub aligned_cos_sum: f64,
    /// Fejér main term at the aligned `t₀`.
    pub main_at_t0: f64,
    /// `t_h`: the maximizer of the main term within `τ` of `t₀`.
    pub t_h: f64,
    pub main_term: f64,
    pub error_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub support_size: usize,
    pub empty_resonator: bool,
    pub product_norm: f64,
    pub max_r_abs: Option<f64>,
    pub grid_start: Option<f64>,
    pub grid_step: Option<f64>,
    pub grid_count: Option<usize>,
    pub warnings: Vec<String>,
    pub signed_sums: Option<SignedPrimeSumReport>,
    pub alignment: Option<AlignmentResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub pipeline: PipelineId,
    pub specs: Vec<String>,
    pub parameters: SearchParameters,
    pub window: (f64, f64),
    pub guided: Option<Arm>,
    pub controls: Vec<Arm>,
    pub best_t: Option<f64>,
    pub best_values: Vec<f64>,
    pub kronecker: Vec<KroneckerEntry>,
    pub threshold: Threshold,
    pub diagnostics: Diagnostics,
}

impl SearchReport {
    /// Number of control arms whose best score the guided best strictly exceeds.
    pub fn guided_wins(&self) -> usize {
        match &self.guided {
            Some(g) => self.controls.iter().filter(|c| g.best.score > c.best.score).count(),
            None => 0,
        }
    }

    /// Rows `arm, seed, seed_t, t, |R|, |L_1|, …` for plotting.
    pub fn to_csv(&self) -> Result<String, SearchError> {
        let err = |e: csv::Error| SearchError::Csv(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["arm".to_string(), "seed".into(), "seed_t".into(), "t".into(), "r_abs".into()];
        header.extend(self.specs.iter().map(|s| format!("abs_{s}")));
        header.push("score".into());
        w.write_record(&header).map_err(err)?;
        for arm in self.guided.iter().chain(&self.controls) {
            for c in &arm.candidates {
                let mut row = vec![
                    arm.name.clone(),
                    arm.seed.map(|s| s.to_string()).unwrap_or_default(),
                    c.seed_t.to_string(),
                    c.t.to_string(),
                    c.r_abs.to_string(),
                ];
                row.extend(c.values.iter().map(|v| v.to_string()));
                row.push(c.score.to_string());
                w.write_record(&row).map_err(err)?;
            }
        }
        for k in &self.kronecker {
            let mut row = vec![
                "kronecker".to_string(),
                String::new(),
                k.t_h.to_string(),
                k.t_h.to_string(),
                String::new(),
            ];
            row.extend(self.specs.iter().map(|s| if *s == k.label { k.main_term.to_string() } else { String::new() }));
            row.push(k.main_term.to_string());
            w.write_record(&row).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| SearchError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| SearchError::Csv(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// shared two-arm machinery

/// Evaluation block for `|R|` on the search grid.
const GRID_BLOCK: usize = 1 << 18;

/// Top `k` local maxima of `|R|` on `prog`, highest first, lowest `t` on ties.
fn resonator_peaks(
    res: &Resonator,
    sigma: f64,
    prog: Progression,
    k: usize,
) -> Result<(Vec<(f64, f64)>, f64), SearchError> {
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    let mut max_abs: f64 = 0.0;
    let mut k0 = 0;
    while k0 < prog.count {
        // one extra point on each side so that block edges see their neighbours
        let lo = k0.saturating_sub(1);
        let hi = (k0 + GRID_BLOCK + 1).min(prog.count);
        let block = Progression::new(prog.point(lo), prog.step, hi - lo);
        let vals: Vec<f64> = evaluate_resonator_on_line(res, sigma, block)?
            .iter()
            .map(|z| z.norm())
            .collect();
        let end = (k0 + GRID_BLOCK).min(prog.count);
        for idx in k0..end {
            let v = vals[idx - lo];
            max_abs = max_abs.max(v);
            let left = if idx == 0 { f64::NEG_INFINITY } else { vals[idx - 1 - lo] };
            let right = if idx + 1 == prog.count { f64::NEG_INFINITY } else { vals[idx + 1 - lo] };
            if v >= left && v > right {
                peaks.push((idx, v));
            }
        }
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        peaks.truncate(k);
        k0 = end;
    }
    Ok((peaks.into_iter().map(|(i, v)| (prog.point(i), v)).collect(), max_abs))
}

fn uniform_draws(lo: f64, hi: f64, k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Evaluates `score` on a stencil around each start point and keeps the best.
fn build_arm<F>(
    name: &str,
    seed: Option<u64>,
    starts: &[(f64, f64)],
    window: (f64, f64),
    half_width: f64,
    refine: usize,
    score: &F,
) -> Result<Arm, SearchError>
where
    F: Fn(f64) -> Result<(Vec<f64>, f64), SearchError>,
{
    let mut candidates = Vec::with_capacity(starts.len());
    for &(t0, r_abs) in starts {
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        for j in -(refine as i64)..=(refine as i64) {
            let t = if refine == 0 {
                t0
            } else {
                (t0 + half_width * j as f64 / refine as f64).clamp(window.0, window.1)
            };
            let (values, s) = score(t)?;
            let better = match &best {
                None => true,
                Some((bt, _, bs)) => s > *bs || (s == *bs && t < *bt),
            };
            if better {
                best = Some((t, values, s));
            }
        }
        let (t, values, s) = best.expect("stencil is nonempty");
        candidates.push(Candidate {
            seed_t: t0,
            r_abs,
            t,
            values,
            score: s,
        });
    }
    let best = candidates
        .iter()
        .fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if b.score > c.score || (b.score == c.score && b.t <= c.t) => Some(b),
            _ => Some(c),
        })
        .cloned()
        .ok_or_else(|| SearchError::InvalidInput("arm has no candidates".into()))?;
    Ok(Arm {
        name: name.into(),
        seed,
        candidates,
        best,
    })
}

struct TwoArm {
    guided: Arm,
    controls: Vec<Arm>,
    max_r_abs: Option<f64>,
    warnings: Vec<String>,
}

fn run_two_arms<F>(
    res: &Resonator,
    r_sigma: f64,
    window: (f64, f64),
    grid: Progression,
    half_width: f64,
    arms: &ArmOptions,
    score: F,
) -> Result<TwoArm, SearchError>
where
    F: Fn(f64) -> Result<(Vec<f64>, f64), SearchError>,
{
    if arms.k == 0 {
        return Err(SearchError::InvalidInput("candidate count must be positive".into()));
    }
    let mut warnings = Vec::new();
    let (guided, max_r_abs) = if res.empty_support {
        warnings.push("resonator support is empty (R ≡ 1); guided arm falls back to uniform sampling".into());
        let starts: Vec<(f64, f64)> = uniform_draws(window.0, window.1, arms.k, FALLBACK_SEED)
            .into_iter()
            .map(|t| (t, 1.0))
            .collect();
        (
            build_arm("fallback", Some(FALLBACK_SEED), &starts, window, half_width, arms.refine, &score)?,
            None,
        )
    } else {
        let (peaks, max_abs) = resonator_peaks(res, r_sigma, grid, arms.k)?;
        if peaks.is_empty() {
            return Err(SearchError::InvalidInput("resonator grid has no interior peak".into()));
        }
        (
            build_arm("guided", None, &peaks, window, half_width, arms.refine, &score)?,
            Some(max_abs),
        )
    };
    let mut controls = Vec::new();
    for &seed in &arms.seeds {
        let starts: Vec<(f64, f64)> = uniform_draws(window.0, window.1, arms.k, seed)
            .into_iter()
            .map(|t| (t, f64::NAN))
            .collect();
        let mut arm = build_arm("control", Some(seed), &starts, window, half_width, arms.refine, &score)?;
        // |R| at control points is not evaluated
        for c in &mut arm.candidates {
            c.r_abs = 0.0;
        }
        arm.best.r_abs = 0.0;
        controls.push(arm);
    }
    Ok(TwoArm {
        guided,
        controls,
        max_r_abs,
        warnings,
    })
}

fn abs_values(specs: &[&LFunctionSpec], sigma: f64, t: f64) -> Result<Vec<f64>, SearchError> {
    specs
        .iter()
        .map(|s| Ok(evaluate_l(s, Complex64::new(sigma, t))?.value.norm()))
        .collect()
}

/// Half-width of the refinement stencil: half the mean gap between zeros of ζ at height `t`.
fn refine_half_width(t: f64) -> f64 {
    PI / (t / (2.0 * PI)).ln().max(1.0)
}

// ---------------------------------------------------------------------------
// critical line

/// Settings of the critical pipeline beyond `(T, Δ, λ, grid_count)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalOptions {
    pub eps_p: f64,
    /// Fixes 𝓛 directly instead of deriving it from `T^Δ`.
    pub script_l: Option<f64>,
    pub arms: ArmOptions,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            eps_p: DEFAULT_EPS_P,
            script_l: None,
            arms: ArmOptions::default(),
        }
    }
}

/// Number of grid points that resolves ζ-scale oscillation on `[T, 2T]`.
pub fn default_grid_count(t: f64, len: f64) -> usize {
    (len / MomentGrid::default_step(t)).ceil() as usize + 1
}

/// Admissible constant for the critical threshold: `1/2` for Dirichlet
/// L-functions, `(1/2 − θ)/(3 + θ)` with `θ = 7/64` otherwise.
pub fn critical_threshold_constant(specs: &[&LFunctionSpec]) -> f64 {
    let gl1 = specs
        .iter()
        .all(|s| matches!(s.kind(), LFunctionKind::Zeta | LFunctionKind::Dirichlet(_) | LFunctionKind::Unit));
    if gl1 {
        0.5
    } else {
        let theta = 7.0 / 64.0;
        (0.5 - theta) / (3.0 + theta)
    }
}

pub fn search_critical(
    specs: &[&LFunctionSpec],
    t: f64,
    delta: f64,
    lambda: f64,
    grid_count: usize,
    options: &CriticalOptions,
) -> Result<SearchReport, SearchError> {
    if grid_count < 3 {
        return Err(SearchError::InvalidInput(format!(
            "grid count {grid_count} must be at least 3"
        )));
    }
    if specs.is_empty() {
        return Err(SearchError::InvalidInput("at least one L-function is required".into()));
    }
    let scale = match options.script_l {
        Some(script_l) => CriticalScale::Direct { script_l },
        None => CriticalScale::Height { delta, t },
    };
    let res = build_resonator_critical(specs, scale, lambda, options.eps_p)?;
    let window = (t, 2.0 * t);
    let grid = Progression::new(t, t / (grid_count - 1) as f64, grid_count);
    let two = run_two_arms(
        &res,
        0.5,
        window,
        grid,
        refine_half_width(t),
        &options.arms,
        |x| {
            let v = abs_values(specs, 0.5, x)?;
            let s = v.iter().copied().fold(f64::INFINITY, f64::min);
            Ok((v, s))
        },
    )?;
    let h = specs.len() as f64;
    let d = critical_threshold_constant(specs);
    let scale = t.ln() / t.ln().ln();
    let threshold = Threshold {
        formula: "exp(sqrt(D log T / (H(H-1) log log T)))".into(),
        d,
        scale,
        value: (h > 1.0).then(|| (d * scale / (h * (h - 1.0))).sqrt().exp()),
    };
    let mut warnings = two.warnings;
    if h == 1.0 {
        warnings.push("H(H-1) = 0: the simultaneous threshold is not defined for one function".into());
    }
    Ok(SearchReport {
        pipeline: PipelineId::Critical,
        specs: specs.iter().map(|s| s.label().to_string()).collect(),
        parameters: SearchParameters::Critical {
            t,
            delta,
            lambda,
            eps_p: options.eps_p,
            script_l: options.script_l,
            grid_count,
            arms: options.arms.clone(),
        },
        window,
        best_t: Some(two.guided.best.t),
        best_values: two.guided.best.values.clone(),
        guided: Some(two.guided),
        controls: two.controls,
        kronecker: Vec::new(),
        threshold,
        diagnostics: Diagnostics {
            support_size: res.support.len(),
            empty_resonator: res.empty_support,
            product_norm: res.product_norm(),
            max_r_abs: two.max_r_abs,
            grid_start: Some(grid.start),
            grid_step: Some(grid.step),
            grid_count: Some(grid.count),
            warnings,
            signed_sums: None,
            alignment: None,
        },
    })
}

// ---------------------------------------------------------------------------
// off the critical line

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineOptions {
    pub x_eps: f64,
    /// Grid points over the window; `None` resolves both ζ-scale and prime-scale oscillation.
    pub grid_count: Option<usize>,
    pub arms: ArmOptions,
}

impl Default for OfflineOptions {
    fn default() -> Self {
        Self {
            x_eps: 2.0,
            grid_count: None,
            arms: ArmOptions::default(),
        }
    }
}

fn required_certificate<'a>(
    certificate: Option<&'a GoodIntervalCertificate>,
    specs: &[&LFunctionSpec],
    sigma: f64,
) -> Result<(&'a GoodIntervalCertificate, (f64, f64)), SearchError> {
    let labels: Vec<String> = specs
        .iter()
        .filter(|s| !matches!(s.kind(), LFunctionKind::Unit))
        .map(|s| s.label().to_string())
        .collect();
    match certificate {
        Some(c) => {
            let (lo, hi) = c.inner_window();
            if c.covers(&labels, sigma, lo, hi) {
                Ok((c, (lo, hi)))
            } else {
                Err(SearchError::CertificateRequired { sigma, lo, hi })
            }
        }
        None => Err(SearchError::CertificateRequired {
            sigma,
            lo: f64::NAN,
            hi: f64::NAN,
        }),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn search_offline(
    large: &[&LFunctionSpec],
    small: &[&LFunctionSpec],
    sigma: f64,
    t: f64,
    beta: f64,
    c: f64,
    certificate: Option<&GoodIntervalCertificate>,
    options: &OfflineOptions,
) -> Result<SearchReport, SearchError> {
    if !(sigma > 0.5 && sigma <= 1.0) {
        return Err(SearchError::InvalidInput(format!("σ = {sigma} must lie in (1/2, 1]")));
    }
    let all: Vec<&LFunctionSpec> = large.iter().chain(small).copied().collect();
    let (cert, window) = required_certificate(certificate, &all, sigma)?;
    let res = build_resonator_offline(large, small, beta, t, c, options.x_eps)?;
    let max_log_p = res.support.last().map(|s| (s.p as f64).ln()).unwrap_or(1.0);
    let len = window.1 - window.0;
    let step = MomentGrid::default_step(t).min(2.0 * PI / (8.0 * max_log_p));
    let grid_count = options
        .grid_count
        .unwrap_or_else(|| (len / step).ceil() as usize + 1)
        .max(3);
    let grid = Progression::new(window.0, len / (grid_count - 1) as f64, grid_count);
    let n_large = large.len();
    let two = run_two_arms(
        &res,
        0.0,
        window,
        grid,
        refine_half_width(t),
        &options.arms,
        |x| {
            let v = abs_values(&all, sigma, x)?;
            let big = v[..n_large].iter().copied().fold(f64::INFINITY, f64::min);
            let small_max = v[n_large..].iter().copied().fold(0.0, f64::max);
            let inv = if v.len() > n_large { 1.0 / small_max } else { f64::INFINITY };
            Ok((v, big.min(inv)))
        },
    )?;
    let sums = signed_prime_sums(large, small, &res, sigma, t)?;
    let d = if sums.entries.is_empty() || res.empty_support {
        0.0
    } else {
        sums.measured_constant()
    };
    let lt = t.ln();
    let (formula, scale, value) = if sigma == 1.0 {
        ("(log log T)^D".to_string(), lt.ln(), lt.ln().powf(d))
    } else {
        let scale = comparator_scale(sigma, t);
        ("exp(D (log T)^(1-σ) / log log T)".to_string(), scale, (d * scale).exp())
    };
    Ok(SearchReport {
        pipeline: PipelineId::Offline,
        specs: all.iter().map(|s| s.label().to_string()).collect(),
        parameters: SearchParameters::Offline {
            sigma,
            t,
            beta,
            c,
            x_eps: options.x_eps,
            large: large.len(),
            small: small.len(),
            a: cert.a,
            alpha: cert.alpha,
            grid_count,
            arms: options.arms.clone(),
        },
        window,
        best_t: Some(two.guided.best.t),
        best_values: two.guided.best.values.clone(),
        guided: Some(two.guided),
        controls: two.controls,
        kronecker: Vec::new(),
        threshold: Threshold {
            formula,
            d,
            scale,
            value: Some(value),
        },
        diagnostics: Diagnostics {
            support_size: res.support.len(),
            empty_resonator: res.empty_support,
            product_norm: res.product_norm(),
            max_r_abs: two.max_r_abs,
            grid_start: Some(grid.start),
            grid_step: Some(grid.step),
            grid_count: Some(grid.count),
            warnings: two.warnings,
            signed_sums: Some(sums),
            alignment: None,
        },
    })
}

// ---------------------------------------------------------------------------
// Kronecker alignment

/// `x_h = e^{2h} log T/(C M)`, `h = 1..=count`.
pub fn kronecker_centers(t: f64, c: f64, m: u32, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|h| (2.0 * h as f64).exp() * t.ln() / (c * m as f64))
        .collect()
}

/// Checks that the open windows `(x_h/e, e·x_h)` are pairwise disjoint.
pub fn assert_disjoint_windows(centers: &[f64]) -> Result<(), SearchError> {
    for h in 0..centers.len() {
        for g in h + 1..centers.len() {
            let (a, b) = (centers[h].min(centers[g]), centers[h].max(centers[g]));
            // E·a and b/E agree up to rounding when the centers are e² apart
            if E * a > (b / E) * (1.0 + 1e-12) {
                return Err(SearchError::OverlappingWindows { h: h + 1, g: g + 1 });
            }
        }
    }
    Ok(())
}

/// `τ = (log T)^{(1+σ₀)/2} sqrt(log log T)`.
pub fn proximity_tau(t: f64, sigma0: f64) -> f64 {
    let lt = t.ln();
    lt.powf(0.5 * (1.0 + sigma0)) * lt.ln().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerOptions {
    /// Alignment grid step; defaults to `1/(8 max λ_n)`.
    pub align_step: Option<f64>,
}

impl Default for KroneckerOptions {
    fn default() -> Self {
        Self { align_step: None }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn search_kronecker(
    specs: &[&LFunctionSpec],
    sigma0: f64,
    t: f64,
    phis: &[f64],
    c: f64,
    m: u32,
    certificate: Option<&GoodIntervalCertificate>,
    options: &KroneckerOptions,
) -> Result<SearchReport, SearchError> {
    if specs.is_empty() || phis.len() != specs.len() {
        return Err(SearchError::InvalidInput(format!(
            "need one phase per L-function, got {} phases for {} functions",
            phis.len(),
            specs.len()
        )));
    }
    if !(c > 0.0) || m == 0 {
        return Err(SearchError::InvalidInput("C and M must be positive".into()));
    }
    let (cert, window) = required_certificate(certificate, specs, sigma0)?;
    let centers = kronecker_centers(t, c, m, specs.len());
    assert_disjoint_windows(&centers)?;
    let top = E * centers.last().copied().expect("nonempty");
    let table = sieve_primes(top.ceil().max(2.0) as u64).map_err(LfuncError::from)?;

    struct Block {
        primes: Vec<u64>,
        a: Vec<Complex64>,
    }
    let mut blocks = Vec::new();
    let (mut freqs, mut phases, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for (h, spec) in specs.iter().enumerate() {
        let (lo, hi) = (centers[h] / E, E * centers[h]);
        let mut primes = Vec::new();
        let mut a = Vec::new();
        for &p in table.range(lo, hi) {
            let pf = p as f64;
            if pf <= lo || pf >= hi {
                continue;
            }
            let ap = spec.a_prime(p)?;
            if ap.norm() == 0.0 {
                continue;
            }
            freqs.push(pf.ln() / (2.0 * PI));
            phases.push((ap.arg() - phis[h]) / (2.0 * PI));
            weights.push(ap.norm() / pf.powf(sigma0));
            primes.push(p);
            a.push(ap);
        }
        if primes.is_empty() {
            return Err(SearchError::DegenerateWindow {
                label: spec.label().to_string(),
                lo,
                hi,
            });
        }
        blocks.push(Block { primes, a });
    }
    let mut problem = AlignmentProblem::new(freqs, phases, weights, window.0, window.1, m)?;
    problem.lambda = Some(lambda_min(&problem.frequencies, m)?);
    let max_freq = problem.frequencies.iter().copied().fold(0.0, f64::max);
    let align_step = options.align_step.unwrap_or(1.0 / (8.0 * max_freq));
    let alignment = align_search(&problem, align_step)?;
    let t0 = alignment.t_star;

    let tau = proximity_tau(t, sigma0);
    let (lo_ref, hi_ref) = ((t0 - tau).max(cert.interval.0), (t0 + tau).min(cert.interval.1));
    let mut entries = Vec::new();
    for (h, spec) in specs.iter().enumerate() {
        let x = centers[h];
        let block = &blocks[h];
        let mut plain = 0.0;
        let mut weight_sum = 0.0;
        let mut cos_sum = 0.0;
        for (&p, a) in block.primes.iter().zip(&block.a) {
            let pf = p as f64;
            let w = pf.powf(-sigma0);
            plain += w;
            weight_sum += a.norm() * w;
            cos_sum += a.norm() * w * (a.arg() - phis[h] - t0 * pf.ln()).cos();
        }
        let main_at = |tt: f64| convol_lower_bound(spec, Complex64::new(sigma0, tt), tau, x, phis[h]);
        let at_t0 = main_at(t0)?;
        // the main term oscillates with frequencies up to log(e·x)/(2π)
        let step = 2.0 * PI / (8.0 * (E * x).ln());
        let prog = Progression::covering(lo_ref, hi_ref, step);
        let mut best = (t0, at_t0.main);
        for k in 0..prog.count {
            let tt = prog.point(k);
            let v = main_at(tt)?.main;
            if v > best.1 || (v == best.1 && tt < best.0) {
                best = (tt, v);
            }
        }
        entries.push(KroneckerEntry {
            label: spec.label().to_string(),
            phi: phis[h],
            x_h: x,
            window: (x / E, E * x),
            primes: block.primes.len(),
            plain_sum: plain,
            weight_sum,
            aligned_cos_sum: cos_sum,
            main_at_t0: at_t0.main,
            t_h: best.0,
            main_term: best.1,
            error_scale: at_t0.error_scale,
        });
    }
    for e in &entries {
        for f in &entries {
            if (e.t_h - f.t_h).abs() > 2.0 * tau {
                return Err(SearchError::InvalidInput(format!(
                    "proximity violated: |t_{} − t_{}| > 2τ",
                    e.label, f.label
                )));
            }
        }
    }
    let lt = t.ln();
    Ok(SearchReport {
        pipeline: PipelineId::Kronecker,
        specs: specs.iter().map(|s| s.label().to_string()).collect(),
        parameters: SearchParameters::Kronecker {
            sigma0,
            t,
            phis: phis.to_vec(),
            c,
            m,
            a: cert.a,
            alpha: cert.alpha,
            align_step,
        },
        window: cert.interval,
        guided: None,
        controls: Vec::new(),
        best_t: Some(t0),
        best_values: entries.iter().map(|e| e.main_term).collect(),
        kronecker: entries,
        threshold: Threshold {
            formula: "(log T)^(1-σ₀) / log log T".into(),
            d: 1.0,
            scale: lt.powf(1.0 - sigma0) / lt.ln(),
            value: Some(lt.powf(1.0 - sigma0) / lt.ln()),
        },
        diagnostics: Diagnostics {
            support_size: problem.frequencies.len(),
            empty_resonator: false,
            product_norm: 1.0,
            max_r_abs: None,
            grid_start: Some(window.0),
            grid_step: Some(alignment.grid_step),
            grid_count: Some(alignment.grid_count),
            warnings: Vec::new(),
            signed_sums: None,
            alignment: Some(alignment),
        },
    })
}
