//! Run configuration: every subcommand's parameters, shared between the
//! command line and JSON config files.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use resonance_core::lfunc::{Exponent, DEFAULT_CUSP_COEFFICIENTS};

pub const CONFIG_VERSION: u32 = 1;

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "RESONANCE_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "config_version")]
    pub format_version: u32,
    /// L-functions, e.g. `zeta`, `chi:4:1`, `cusp:delta`.
    #[serde(default = "default_specs")]
    pub specs: Vec<String>,
    #[serde(default = "default_cusp")]
    pub cusp_coefficients: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    pub command: Command,
}

fn config_version() -> u32 {
    CONFIG_VERSION
}

fn default_specs() -> Vec<String> {
    vec!["zeta".into()]
}

fn default_cusp() -> usize {
    DEFAULT_CUSP_COEFFICIENTS
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Primes up to a limit.
    Sieve(SieveArgs),
    /// Dirichlet coefficients of each spec.
    Coeffs(CoeffsArgs),
    /// Build and serialize a resonator.
    Resonate(ResonateArgs),
    /// Prime-sum estimates of the critical resonator.
    Estimates(EstimatesArgs),
    /// Twisted moments and moment ratios.
    Moments(MomentsArgs),
    /// Zero-free interval certificate.
    Certify(CertifyArgs),
    /// Resonance-guided large values on the critical line.
    SearchCritical(SearchCriticalArgs),
    /// Large and small values off the critical line.
    SearchOffline(SearchOfflineArgs),
    /// Phase alignment over disjoint prime windows.
    SearchKronecker(SearchKroneckerArgs),
    /// Quantitative Kronecker solver on an explicit problem.
    Align(AlignArgs),
    /// Quick invariant suite.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sieve(_) => "sieve",
            Command::Coeffs(_) => "coeffs",
            Command::Resonate(_) => "resonate",
            Command::Estimates(_) => "estimates",
            Command::Moments(_) => "moments",
            Command::Certify(_) => "certify",
            Command::SearchCritical(_) => "search-critical",
            Command::SearchOffline(_) => "search-offline",
            Command::SearchKronecker(_) => "search-kronecker",
            Command::Align(_) => "align",
            Command::Verify(_) => "verify",
        }
    }
}

/// Defaults for config files come from the same attributes as the flags.
macro_rules! clap_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                <$t as Parser>::parse_from(["resonance"])
            }
        }
    )*};
}

clap_default!(
    SieveArgs,
    CoeffsArgs,
    ResonateArgs,
    EstimatesArgs,
    MomentsArgs,
    CertifyArgs,
    SearchCriticalArgs,
    SearchOfflineArgs,
    SearchKroneckerArgs,
    AlignArgs,
    VerifyArgs
);

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SieveArgs {
    #[arg(long, default_value_t = 1000)]
    pub limit: u64,
    /// Include the primes themselves in the report.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
}

/// How 𝓛 is chosen for critical-line resonators.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalScaleArgs {
    #[arg(long, default_value_t = 1e6)]
    pub t: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Fix 𝓛 directly; overrides `t` and `delta` for the resonator.
    #[arg(long)]
    pub script_l: Option<f64>,
    #[arg(long, default_value_t = 1.2)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps_p: f64,
}

impl Default for CriticalScaleArgs {
    fn default() -> Self {
        Self {
            t: 1e6,
            delta: 0.1,
            script_l: None,
            lambda: 1.2,
            eps_p: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ResonatorChoice {
    Critical,
    Offline,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonateArgs {
    #[arg(long, value_enum, default_value_t = ResonatorChoice::Critical)]
    pub kind: ResonatorChoice,
    #[command(flatten)]
    pub scale: CriticalScaleArgs,
    /// Off-line: prime window ends at β log T.
    #[arg(long, default_value_t = 20.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, default_value_t = 2.0)]
    pub x_eps: f64,
    /// Off-line: functions to make large (default: all specs).
    #[arg(long, value_delimiter = ',')]
    pub large: Vec<String>,
    /// Off-line: functions to make small.
    #[arg(long, value_delimiter = ',')]
    pub small: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatesArgs {
    #[command(flatten)]
    pub scale: CriticalScaleArgs,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub scale: CriticalScaleArgs,
    /// Exponent `u/v` (or an integer).
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Indices of the specs in the product (default: all).
    #[arg(long, value_delimiter = ',')]
    pub pi: Vec<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Also compute the truncated-product difference diagnostic.
    #[arg(long)]
    pub diagnostic: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 1e5)]
    pub t: f64,
    #[arg(long, default_value_t = 0.6)]
    pub sigma0: f64,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// Window offset A (default 3T/2).
    #[arg(long)]
    pub a: Option<f64>,
}

impl Default for WindowArgs {
    fn default() -> Self {
        Self {
            t: 1e5,
            sigma0: 0.6,
            alpha: 0.3,
            a: None,
        }
    }
}

impl WindowArgs {
    pub fn offset(&self) -> f64 {
        self.a.unwrap_or(1.5 * self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArmArgs {
    #[arg(long, default_value_t = 64)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 4)]
    pub refine: usize,
}

impl Default for ArmArgs {
    fn default() -> Self {
        Self {
            k: 64,
            seeds: vec![1, 2, 3, 4, 5],
            refine: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchCriticalArgs {
    #[command(flatten)]
    pub scale: CriticalScaleArgs,
    /// Grid points over [T, 2T] (default: resolves ζ-scale oscillation).
    #[arg(long)]
    pub grid_count: Option<usize>,
    #[command(flatten)]
    pub arms: ArmArgs,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOfflineArgs {
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 0.75)]
    pub sigma: f64,
    #[arg(long, default_value_t = 20.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, default_value_t = 2.0)]
    pub x_eps: f64,
    #[arg(long, value_delimiter = ',')]
    pub large: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub small: Vec<String>,
    #[arg(long)]
    pub grid_count: Option<usize>,
    #[command(flatten)]
    pub arms: ArmArgs,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchKroneckerArgs {
    #[command(flatten)]
    pub window: WindowArgs,
    /// Target angles φ_h, one per spec (default 0).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phis: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long)]
    pub align_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignArgs {
    /// Frequencies λ_n; alternatively give `--primes` for λ = log p / 2π.
    #[arg(long, value_delimiter = ',')]
    pub frequencies: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phases: Vec<f64>,
    /// Weights ξ_n (default 1).
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub t1: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub t2: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Grid step (default 1/(8 max λ)).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Seed of the randomized checks.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

pub fn parse_exponent(text: &str) -> Result<Exponent, String> {
    let (u, v) = match text.split_once('/') {
        Some((u, v)) => (u.trim(), v.trim()),
        None => (text.trim(), "1"),
    };
    let u: u32 = u.parse().map_err(|_| format!("bad exponent numerator in `{text}`"))?;
    let v: u32 = v.parse().map_err(|_| format!("bad exponent denominator in `{text}`"))?;
    Exponent::new(u, v).map_err(|e| e.to_string())
}

/// Every violated precondition of `config`, checked before dispatch.
pub fn validate(config: &RunConfig) -> Vec<String> {
    let mut v = Vec::new();
    let mut need = |ok: bool, msg: String| {
        if !ok {
            v.push(msg);
        }
    };
    need(
        config.format_version == CONFIG_VERSION,
        format!("format_version {} is not {CONFIG_VERSION}", config.format_version),
    );
    need(!config.specs.is_empty(), "at least one spec is required".into());
    let scale_checks = |s: &CriticalScaleArgs, need: &mut dyn FnMut(bool, String)| {
        need(s.lambda > 1.0, format!("lambda = {} must exceed 1", s.lambda));
        need(s.eps_p > 0.0 && s.eps_p < 1.0, format!("eps_p = {} must lie in (0, 1)", s.eps_p));
        match s.script_l {
            Some(l) => need(l > 1.0, format!("script_l = {l} must exceed 1")),
            None => {
                need(s.delta > 0.0 && s.delta < 1.0, format!("delta = {} must lie in (0, 1)", s.delta));
                need(s.t > 15.2, format!("t = {} must exceed e^e", s.t));
            }
        }
    };
    let window_checks = |w: &WindowArgs, need: &mut dyn FnMut(bool, String)| {
        need(w.t > 0.0, format!("t = {} must be positive", w.t));
        need(w.alpha > 0.0 && w.alpha < 1.0, format!("alpha = {} must lie in (0, 1)", w.alpha));
        let a = w.offset();
        need(
            a >= 1.25 * w.t && a <= 1.75 * w.t,
            format!("a = {a} must lie in [5T/4, 7T/4]"),
        );
        need(w.sigma0 < 3.0, format!("sigma0 = {} must be below 3", w.sigma0));
    };
    let arm_checks = |a: &ArmArgs, need: &mut dyn FnMut(bool, String)| {
        need(a.k > 0, "k must be positive".into());
    };
    match &config.command {
        Command::Sieve(a) => need(a.limit >= 2, format!("limit = {} must be at least 2", a.limit)),
        Command::Coeffs(a) => need(a.n_max >= 1, "n_max must be positive".into()),
        Command::Resonate(a) => match a.kind {
            ResonatorChoice::Critical => scale_checks(&a.scale, &mut need),
            ResonatorChoice::Offline => {
                need(a.beta > 0.0, format!("beta = {} must be positive", a.beta));
                need(a.c > 0.0, format!("c = {} must be positive", a.c));
                need(a.x_eps >= 2.0, format!("x_eps = {} must be at least 2", a.x_eps));
                need(a.scale.t > 1.0, format!("t = {} must exceed 1", a.scale.t));
            }
        },
        Command::Estimates(a) => scale_checks(&a.scale, &mut need),
        Command::Moments(a) => {
            scale_checks(&a.scale, &mut need);
            if let Err(e) = parse_exponent(&a.q) {
                need(false, e);
            }
            for &h in &a.pi {
                need(h < config.specs.len(), format!("pi index {h} out of range"));
            }
            if let Some(s) = a.step {
                need(s > 0.0, format!("step = {s} must be positive"));
            }
        }
        Command::Certify(a) => window_checks(&a.window, &mut need),
        Command::SearchCritical(a) => {
            scale_checks(&a.scale, &mut need);
            need(a.scale.t > 15.2, format!("t = {} must exceed e^e", a.scale.t));
            if let Some(g) = a.grid_count {
                need(g >= 3, format!("grid_count = {g} must be at least 3"));
            }
            arm_checks(&a.arms, &mut need);
        }
        Command::SearchOffline(a) => {
            window_checks(&a.window, &mut need);
            need(a.sigma > 0.5 && a.sigma <= 1.0, format!("sigma = {} must lie in (1/2, 1]", a.sigma));
            need(a.sigma >= a.window.sigma0, format!("sigma = {} is below sigma0", a.sigma));
            need(a.beta > 0.0, format!("beta = {} must be positive", a.beta));
            need(a.c > 0.0, format!("c = {} must be positive", a.c));
            need(a.x_eps >= 2.0, format!("x_eps = {} must be at least 2", a.x_eps));
            arm_checks(&a.arms, &mut need);
        }
        Command::SearchKronecker(a) => {
            window_checks(&a.window, &mut need);
            need(
                a.phis.is_empty() || a.phis.len() == config.specs.len(),
                format!("{} phases for {} specs", a.phis.len(), config.specs.len()),
            );
            need(a.c > 0.0, format!("c = {} must be positive", a.c));
            need(a.m >= 1, "m must be positive".into());
        }
        Command::Align(a) => {
            let n = if a.primes.is_empty() { a.frequencies.len() } else { a.primes.len() };
            need(n > 0, "frequencies or primes are required".into());
            need(
                a.frequencies.is_empty() || a.primes.is_empty(),
                "give frequencies or primes, not both".into(),
            );
            need(
                a.phases.is_empty() || a.phases.len() == n,
                format!("{} phases for {n} frequencies", a.phases.len()),
            );
            need(
                a.weights.is_empty() || a.weights.len() == n,
                format!("{} weights for {n} frequencies", a.weights.len()),
            );
            need(a.t2 > a.t1, format!("window [{}, {}] is empty", a.t1, a.t2));
            need(a.m >= 1, "m must be positive".into());
        }
        Command::Verify(_) => {}
    }
    v
}
