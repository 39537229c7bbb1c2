//! Resonator Dirichlet polynomials and the prime sums that control them.
//!
//! Two constructions are provided. The critical-line resonator
//! `R(s) = Σ_{n<=X} r(n) n^{1/2-s}` has `r(p) = a_L(p)·𝓛/(√p log p)` on a
//! window of primes `[𝓛², exp((log 𝓛)²)]`. The off-line resonator
//! `R(s) = Π_p (1 + r(p) p^{-s})` has `C·r(p)` equal to the signed sum of
//! the coefficients of the "large" and "small" lists on `[x_ε, β log T]`.

use std::f64::consts::E;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::sieve_primes;
use crate::lfunc::{LFunctionSpec, LfuncError, Progression, ProgressionSum};
use crate::numeric::{p_pow, pairwise_sum};

#[derive(Debug, Error)]
pub enum ResonatorError {
    #[error("invalid resonator parameter: {0}")]
    InvalidParameter(String),
    #[error("squarefree expansion exceeds {limit} terms; evaluate with a smaller X or raise the limit")]
    ExpansionTooLarge { limit: usize },
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonatorKind {
    Critical,
    Offline,
}

/// How the length scale 𝓛 of a critical resonator is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CriticalScale {
    /// `X = T^Δ`, `𝓛 = sqrt(log X · log log X / (κ_L λ))`.
    Height { delta: f64, t: f64 },
    /// 𝓛 given directly; `log X` is recovered from `𝓛² κ_L λ = log X · log log X`.
    Direct { script_l: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ResonatorParams {
    Critical {
        scale: CriticalScale,
        lambda: f64,
        eps_p: f64,
    },
    Offline {
        beta: f64,
        t: f64,
        c: f64,
        x_eps: f64,
        large: usize,
        small: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportPrime {
    pub p: u64,
    pub r: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub n: u64,
    pub r: Complex64,
}

/// Default cap on the number of squarefree terms enumerated for `R`.
pub const DEFAULT_EXPANSION_LIMIT: usize = 2_000_000;

/// Default ε in the coefficient-growth condition defining the support.
pub const DEFAULT_EPS_P: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonator {
    pub kind: ResonatorKind,
    pub params: ResonatorParams,
    pub spec_labels: Vec<String>,
    /// `Σ_h κ_h` over the specs the resonator was built from.
    pub kappa_l: f64,
    /// 𝓛 (critical kind).
    pub script_l: Option<f64>,
    /// `log X` (critical kind).
    pub log_x: Option<f64>,
    pub support: Vec<SupportPrime>,
    /// Set when the prime window contains no admissible prime, so `R ≡ 1`.
    pub empty_support: bool,
    /// `r(n)` for squarefree `n <= X` built from the support, ascending in `n`.
    /// `None` when the expansion would exceed the term limit.
    pub expansion: Option<Vec<ExpansionTerm>>,
}

fn invalid(msg: impl Into<String>) -> ResonatorError {
    ResonatorError::InvalidParameter(msg.into())
}

/// Solves `y log y = c` for `y > e`.
fn solve_y_log_y(c: f64) -> f64 {
    let mut y = (c / c.ln().max(1.0)).max(E);
    for _ in 0..60 {
        let f = y * y.ln() - c;
        let next = y - f / (y.ln() + 1.0);
        if (next - y).abs() <= 1e-15 * y {
            return next;
        }
        y = next.max(E);
    }
    y
}

fn coefficient_sum(specs: &[&LFunctionSpec], p: u64) -> Result<Complex64, LfuncError> {
    specs.iter().map(|s| s.a_prime(p)).sum()
}

/// Builds the critical-line resonator.
pub fn build_resonator_critical(
    specs: &[&LFunctionSpec],
    scale: CriticalScale,
    lambda: f64,
    eps_p: f64,
) -> Result<Resonator, ResonatorError> {
    build_resonator_critical_with_limit(specs, scale, lambda, eps_p, DEFAULT_EXPANSION_LIMIT)
}

pub fn build_resonator_critical_with_limit(
    specs: &[&LFunctionSpec],
    scale: CriticalScale,
    lambda: f64,
    eps_p: f64,
    expansion_limit: usize,
) -> Result<Resonator, ResonatorError> {
    if specs.is_empty() {
        return Err(invalid("at least one L-function is required"));
    }
    if !(lambda > 1.0) {
        return Err(invalid(format!("λ = {lambda} must exceed 1")));
    }
    if !(eps_p > 0.0 && eps_p < 1.0) {
        return Err(invalid(format!("ε_P = {eps_p} must lie in (0, 1)")));
    }
    let kappa_l: f64 = specs.iter().map(|s| s.kappa()).sum();
    if !(kappa_l > 0.0) {
        return Err(invalid("κ_L must be positive"));
    }
    let (log_x, script_l) = match scale {
        CriticalScale::Height { delta, t } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(invalid(format!("Δ = {delta} must lie in (0, 1)")));
            }
            if !(t > E.powf(E)) {
                return Err(invalid(format!("T = {t} must exceed e^e")));
            }
            let log_x = delta * t.ln();
            if log_x <= 1.0 {
                return Err(invalid(format!(
                    "X = T^Δ = {} must exceed e so that log log X > 0",
                    log_x.exp()
                )));
            }
            (log_x, (log_x * log_x.ln() / (kappa_l * lambda)).sqrt())
        }
        CriticalScale::Direct { script_l } => {
            if !(script_l > 1.0) {
                return Err(invalid(format!("𝓛 = {script_l} must exceed 1")));
            }
            (solve_y_log_y(script_l * script_l * kappa_l * lambda), script_l)
        }
    };

    let lo = script_l * script_l;
    let hi = script_l.ln().powi(2).exp();
    let mut support = Vec::new();
    if hi >= 2.0 && hi >= lo {
        let table = sieve_primes(hi.floor().max(2.0) as u64).map_err(LfuncError::from)?;
        for &p in table.range(lo, hi) {
            let pf = p as f64;
            let cap = pf.ln().powf(1.0 - eps_p);
            let mut admissible = true;
            for s in specs {
                if s.a_prime(p)?.norm() > cap {
                    admissible = false;
                    break;
                }
            }
            if !admissible {
                continue;
            }
            let a = coefficient_sum(specs, p)?;
            support.push(SupportPrime {
                p,
                r: a * (script_l / (pf.sqrt() * pf.ln())),
            });
        }
    }
    let expansion = expand_squarefree(&support, log_x, expansion_limit);
    Ok(Resonator {
        kind: ResonatorKind::Critical,
        params: ResonatorParams::Critical {
            scale,
            lambda,
            eps_p,
        },
        spec_labels: specs.iter().map(|s| s.label().to_string()).collect(),
        kappa_l,
        script_l: Some(script_l),
        log_x: Some(log_x),
        empty_support: support.is_empty(),
        support,
        expansion,
    })
}

/// All squarefree products of support primes with `log n <= log_x`, by
/// depth-first generation with pruning. `None` if more than `limit` terms.
fn expand_squarefree(support: &[SupportPrime], log_x: f64, limit: usize) -> Option<Vec<ExpansionTerm>> {
    // a little slack so that n = X itself is not lost to rounding in the logs
    let bound = log_x + 1e-12 * log_x.abs().max(1.0);
    let logs: Vec<f64> = support.iter().map(|s| (s.p as f64).ln()).collect();
    let mut out = vec![ExpansionTerm {
        n: 1,
        r: Complex64::new(1.0, 0.0),
    }];
    // stack of (next prime index, log n, n, r(n))
    let mut stack = vec![(0usize, 0.0f64, 1u64, Complex64::new(1.0, 0.0))];
    while let Some((start, log_n, n, r)) = stack.pop() {
        for i in start..support.len() {
            let l = log_n + logs[i];
            if l > bound {
                // primes are ascending, so later ones overshoot too
                break;
            }
            let m = n.checked_mul(support[i].p)?;
            let rm = r * support[i].r;
            out.push(ExpansionTerm { n: m, r: rm });
            if out.len() > limit {
                return None;
            }
            stack.push((i + 1, l, m, rm));
        }
    }
    out.sort_by_key(|t| t.n);
    Some(out)
}

/// Builds the off-line (product) resonator.
///
/// `C·r(p) = Σ_{large} a_h(p) − Σ_{small} a_h(p)` for primes in
/// `[x_ε, β log T]`; no truncation of the product is applied.
pub fn build_resonator_offline(
    large: &[&LFunctionSpec],
    small: &[&LFunctionSpec],
    beta: f64,
    t: f64,
    c: f64,
    x_eps: f64,
) -> Result<Resonator, ResonatorError> {
    if !(beta > 0.0) {
        return Err(invalid(format!("β = {beta} must be positive")));
    }
    if !(c > 0.0) {
        return Err(invalid(format!("C = {c} must be positive")));
    }
    if !(x_eps >= 2.0) {
        return Err(invalid(format!("x_ε = {x_eps} must be at least 2")));
    }
    if !(t > 1.0) {
        return Err(invalid(format!("T = {t} must exceed 1")));
    }
    if large.is_empty() && small.is_empty() {
        return Err(invalid("at least one L-function is required"));
    }
    let hi = beta * t.ln();
    let mut support = Vec::new();
    if hi >= x_eps {
        let table = sieve_primes(hi.floor().max(2.0) as u64).map_err(LfuncError::from)?;
        for &p in table.range(x_eps, hi) {
            let r = (coefficient_sum(large, p)? - coefficient_sum(small, p)?) / c;
            support.push(SupportPrime { p, r });
        }
    }
    let kappa_l = large.iter().chain(small).map(|s| s.kappa()).sum();
    Ok(Resonator {
        kind: ResonatorKind::Offline,
        params: ResonatorParams::Offline {
            beta,
            t,
            c,
            x_eps,
            large: large.len(),
            small: small.len(),
        },
        spec_labels: large.iter().chain(small).map(|s| s.label().to_string()).collect(),
        kappa_l,
        script_l: None,
        log_x: None,
        empty_support: support.is_empty(),
        support,
        expansion: None,
    })
}

impl Resonator {
    /// `r(p)`, zero off the support.
    pub fn r(&self, p: u64) -> Complex64 {
        self.support
            .binary_search_by_key(&p, |s| s.p)
            .map(|i| self.support[i].r)
            .unwrap_or_default()
    }

    /// `Π_p (1 + |r(p)|²)`.
    pub fn product_norm(&self) -> f64 {
        self.support.iter().map(|s| 1.0 + s.r.norm_sqr()).product()
    }

    /// `Σ_{n<=X} |r(n)|²` (critical kind), or the full product for the off-line kind.
    pub fn coefficient_norm(&self) -> Result<f64, ResonatorError> {
        match self.kind {
            ResonatorKind::Offline => Ok(self.product_norm()),
            ResonatorKind::Critical => {
                let terms = self.expansion_terms()?;
                let sq: Vec<f64> = terms.iter().map(|t| t.r.norm_sqr()).collect();
                Ok(pairwise_sum(&sq))
            }
        }
    }

    /// The squarefree expansion, or an error if it was too large to enumerate.
    pub fn expansion_terms(&self) -> Result<&[ExpansionTerm], ResonatorError> {
        self.expansion
            .as_deref()
            .ok_or(ResonatorError::ExpansionTooLarge {
                limit: DEFAULT_EXPANSION_LIMIT,
            })
    }

    /// Largest `n` with `r(n) != 0` (critical kind) or product of the support.
    pub fn max_support(&self) -> f64 {
        match &self.expansion {
            Some(e) => e.last().map_or(1.0, |t| t.n as f64),
            None => self.support.iter().map(|s| s.p as f64).product(),
        }
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `R` at `1/2 + it` (critical kind: `Σ r(n) n^{-it}`) or at `it`
/// (off-line kind: `Π_p (1 + r(p) p^{-it})`).
pub fn evaluate_resonator(res: &Resonator, t: f64) -> Result<Complex64, ResonatorError> {
    match res.kind {
        ResonatorKind::Critical => {
            let terms = res.expansion_terms()?;
            let parts: Vec<Complex64> = terms
                .iter()
                .map(|e| e.r * Complex64::from_polar(1.0, -t * (e.n as f64).ln()))
                .collect();
            Ok(crate::numeric::pairwise_sum_complex(&parts))
        }
        ResonatorKind::Offline => Ok(res
            .support
            .iter()
            .map(|s| 1.0 + s.r * Complex64::from_polar(1.0, -t * (s.p as f64).ln()))
            .product()),
    }
}

/// `R` on every point of an arithmetic progression of heights, on the
/// line where [`evaluate_resonator`] is defined.
pub fn evaluate_resonator_on(res: &Resonator, prog: Progression) -> Result<Vec<Complex64>, ResonatorError> {
    let sigma = match res.kind {
        ResonatorKind::Critical => 0.5,
        ResonatorKind::Offline => 0.0,
    };
    evaluate_resonator_on_line(res, sigma, prog)
}

/// `R(σ + it)` over a progression of `t`.
pub fn evaluate_resonator_on_line(
    res: &Resonator,
    sigma: f64,
    prog: Progression,
) -> Result<Vec<Complex64>, ResonatorError> {
    match res.kind {
        ResonatorKind::Critical => {
            let terms = res.expansion_terms()?;
            let coeffs: Vec<Complex64> = terms
                .iter()
                .map(|e| e.r * p_pow(e.n as f64, 0.5 - sigma))
                .collect();
            let freqs: Vec<f64> = terms.iter().map(|e| (e.n as f64).ln()).collect();
            Ok(ProgressionSum::new(&coeffs, &freqs).evaluate(prog))
        }
        ResonatorKind::Offline => {
            let weights: Vec<Complex64> = res
                .support
                .iter()
                .map(|s| s.r * p_pow(s.p as f64, -sigma))
                .collect();
            Ok((0..prog.count)
                .into_par_iter()
                .map(|k| {
                    let t = prog.point(k);
                    res.support
                        .iter()
                        .zip(&weights)
                        .map(|(s, w)| 1.0 + w * Complex64::from_polar(1.0, -t * (s.p as f64).ln()))
                        .product()
                })
                .collect())
        }
    }
}

/// One line of the prime-sum estimate report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateEntry {
    pub id: String,
    pub description: String,
    /// Spec the entry refers to, for per-function estimates.
    pub spec: Option<String>,
    pub computed: f64,
    /// Leading term (or order of magnitude) the estimate predicts, when one exists.
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

impl EstimateEntry {
    fn new(id: &str, description: &str, spec: Option<&str>, computed: f64, predicted: Option<f64>) -> Self {
        let ratio = predicted.filter(|p| *p != 0.0 && p.is_finite()).map(|p| computed / p);
        Self {
            id: id.into(),
            description: description.into(),
            spec: spec.map(str::to_string),
            computed,
            predicted,
            ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeProductReport {
    pub sigma: f64,
    pub q: f64,
    /// Indices (into the spec list) of the functions in the product `L_π`.
    pub pi: Vec<usize>,
    /// `ℛ(σ) = Π_p (1 + |r(p)|² p^{1−2σ})`.
    pub script_r: f64,
    /// `𝓕_π(σ)`.
    pub script_f: f64,
    /// Half-width `η = (log 𝓛)^{-3}` of the σ-range the asymptotics assume.
    pub eta: Option<f64>,
    /// Set when σ lies outside `[1/2 − η, 1/2 + η]`.
    pub sigma_warning: Option<String>,
    pub entries: Vec<EstimateEntry>,
}

fn eta_of(res: &Resonator) -> Option<f64> {
    res.script_l.map(|l| l.ln().powi(-3))
}

/// `ℛ(σ)` and `𝓕_π(σ)` with `c₁(p) = q Σ_{h∈π} a_h(p)`.
pub fn prime_products(
    res: &Resonator,
    specs: &[&LFunctionSpec],
    pi: &[usize],
    q: f64,
    sigma: f64,
) -> Result<PrimeProductReport, ResonatorError> {
    for &h in pi {
        if h >= specs.len() {
            return Err(invalid(format!("π index {h} out of range ({} specs)", specs.len())));
        }
    }
    let eta = eta_of(res);
    let sigma_warning = eta.and_then(|eta| {
        ((sigma - 0.5).abs() > eta).then(|| {
            format!("σ = {sigma} lies outside [1/2 − η, 1/2 + η] with η = {eta:.3e}")
        })
    });
    let mut factors = 1.0;
    let mut f_terms = Vec::with_capacity(res.support.len());
    for s in &res.support {
        let pf = s.p as f64;
        let r2 = s.r.norm_sqr() * p_pow(pf, 1.0 - 2.0 * sigma);
        factors *= 1.0 + r2;
        let a: Complex64 = pi.iter().map(|&h| specs[h].a_prime(s.p)).sum::<Result<_, _>>()?;
        let c1 = a * q;
        f_terms.push((s.r.conj() * c1).re / (p_pow(pf, 2.0 * sigma - 0.5) * (1.0 + r2)));
    }
    Ok(PrimeProductReport {
        sigma,
        q,
        pi: pi.to_vec(),
        script_r: factors,
        script_f: pairwise_sum(&f_terms),
        eta,
        sigma_warning,
        entries: Vec::new(),
    })
}

/// Direct prime sums for the six resonator estimates, with their predicted
/// leading terms (critical kind only).
pub fn prime_sum_estimates(
    res: &Resonator,
    specs: &[&LFunctionSpec],
    sigma: f64,
) -> Result<PrimeProductReport, ResonatorError> {
    let (Some(log_x), ResonatorParams::Critical { lambda, .. }) = (res.log_x, &res.params) else {
        return Err(invalid("the estimate suite applies to critical-line resonators"));
    };
    let lambda = *lambda;
    let kappa_l = res.kappa_l;
    let ll = log_x.ln();
    let lll = ll.ln();
    let mut base = prime_products(res, specs, &(0..specs.len()).collect::<Vec<_>>(), 1.0, sigma)?;
    let mut entries = Vec::new();

    let max_r = res.support.iter().map(|s| s.r.norm()).fold(0.0, f64::max);
    entries.push(EstimateEntry::new(
        "max-coefficient",
        "max over the support of |r(p)| (tends to 0)",
        None,
        max_r,
        None,
    ));

    let sq: Vec<f64> = res.support.iter().map(|s| s.r.norm_sqr()).collect();
    entries.push(EstimateEntry::new(
        "square-sum",
        "Σ |r(p)|² against (1/(2λ)) log X / log log X",
        None,
        pairwise_sum(&sq),
        Some(log_x / (2.0 * lambda * ll)),
    ));

    for spec in specs {
        let mut twisted = Vec::new();
        let mut abs_terms = Vec::new();
        let mut shifted = Vec::new();
        for s in &res.support {
            let pf = s.p as f64;
            let a = spec.a_prime(s.p)?;
            let r2 = s.r.norm_sqr();
            let num = (s.r.conj() * a).re;
            twisted.push(num / (p_pow(pf, 0.5) * (1.0 + r2)));
            abs_terms.push(a.norm() * s.r.norm() / p_pow(pf, 0.5));
            shifted.push(num / (p_pow(pf, 2.0 * sigma - 0.5) * (1.0 + r2 / p_pow(pf, 2.0 * sigma - 1.0))));
        }
        let label = spec.label();
        let twisted_sum = pairwise_sum(&twisted);
        entries.push(EstimateEntry::new(
            "twisted-sum",
            "Σ Re(conj(r(p)) a_h(p)) / (√p (1 + |r(p)|²)) against κ_h sqrt(log X / (κ_L λ log log X))",
            Some(label),
            twisted_sum,
            Some(spec.kappa() * (log_x / (kappa_l * lambda * ll)).sqrt()),
        ));
        entries.push(EstimateEntry::new(
            "absolute-sum",
            "Σ |a_h(p)| |r(p)| / √p against the order sqrt(log X log log log X / log log X)",
            Some(label),
            pairwise_sum(&abs_terms),
            (lll > 0.0).then(|| (log_x * lll / ll).sqrt()),
        ));
        let shifted_sum = pairwise_sum(&shifted);
        entries.push(EstimateEntry::new(
            "shift-difference",
            "difference of the twisted sums at 1/2 and σ against the order (2σ−1) sqrt(log X) (log log X)²",
            Some(label),
            twisted_sum - shifted_sum,
            Some((2.0 * sigma - 1.0) * log_x.sqrt() * ll * ll),
        ));
    }

    let shifted_sq: Vec<f64> = res
        .support
        .iter()
        .map(|s| s.r.norm_sqr() * (1.0 - p_pow(s.p as f64, 1.0 - 2.0 * sigma)))
        .collect();
    entries.push(EstimateEntry::new(
        "shifted-square-sum",
        "Σ |r(p)|² (1 − p^{1−2σ}) against (2σ−1) (1/λ) log X",
        None,
        pairwise_sum(&shifted_sq),
        Some((2.0 * sigma - 1.0) * log_x / lambda),
    ));

    // keep a stable order: global entries first, then per-spec ones by id
    let order = |id: &str| match id {
        "max-coefficient" => 0,
        "square-sum" => 1,
        "twisted-sum" => 2,
        "absolute-sum" => 3,
        "shifted-square-sum" => 4,
        _ => 5,
    };
    entries.sort_by_key(|e| order(&e.id));
    base.entries = entries;
    Ok(base)
}
