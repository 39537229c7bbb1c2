//! Dispatch of a validated [`RunConfig`] to the core pipelines.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use resonance_core::align::{align_search, AlignError, AlignmentProblem};
use resonance_core::arith::{cuspform_coefficients, sieve_primes, ArithError, CoefficientCache, CuspForm};
use resonance_core::lfunc::{LFunctionKind, LFunctionSpec, LfuncError};
use resonance_core::moments::{difference_diagnostic, moment_ratio, MomentError, MomentGrid};
use resonance_core::resonator::{
    build_resonator_critical, build_resonator_offline, prime_sum_estimates, CriticalScale, Resonator, ResonatorError,
};
use resonance_core::search::{
    certify_good_interval, default_grid_count, search_critical, search_kronecker, search_offline, ArmOptions,
    CriticalOptions, KroneckerOptions, OfflineOptions, SearchError,
};

use crate::config::{
    parse_exponent, validate, ArmArgs, Command, CriticalScaleArgs, ResonatorChoice, RunConfig, CACHE_ENV,
};
use crate::verify::run_verify;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration")]
    Config(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Resonator(#[from] ResonatorError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("{failed} verification check(s) failed")]
    VerifyFailed { failed: usize, report: Value },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Arith(_) => "arith",
            CliError::Lfunc(_) => "lfunc",
            CliError::Resonator(_) => "resonator",
            CliError::Moment(_) => "moments",
            CliError::Search(_) => "search",
            CliError::Align(_) => "align",
            CliError::VerifyFailed { .. } => "verify",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// The machine-readable error object written on failure.
    pub fn to_json(&self) -> Value {
        let violations = match self {
            CliError::Config(v) => v.clone(),
            _ => Vec::new(),
        };
        let mut obj = json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "violations": violations,
            }
        });
        if let CliError::VerifyFailed { report, .. } = self {
            obj["error"]["report"] = report.clone();
        }
        obj
    }
}

/// Result of one run: the report body and optional CSV rows.
pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Io(e.to_string()))
}

/// Cache directory: the environment variable wins over the config.
pub fn cache_dir(config: &RunConfig) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| config.cache_dir.clone())
}

fn resolve_spec(text: &str, config: &RunConfig) -> Result<LFunctionSpec, CliError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    if let (["cusp", form], Some(dir)) = (parts.as_slice(), cache_dir(config)) {
        let form: CuspForm = form.parse()?;
        let n = config.cusp_coefficients;
        let label = format!("cusp:{}", form.name());
        let series = CoefficientCache::new(dir).get_or_insert_with(&label, n, || cuspform_coefficients(form, n))?;
        return Ok(LFunctionSpec::cusp_from_series(form, series));
    }
    Ok(LFunctionSpec::parse(text, config.cusp_coefficients)?)
}

fn resolve_all(texts: &[String], config: &RunConfig) -> Result<Vec<LFunctionSpec>, CliError> {
    texts.iter().map(|t| resolve_spec(t, config)).collect()
}

/// Spec-resolution problems, reported together with the other violations.
fn spec_violations(config: &RunConfig) -> Vec<String> {
    let mut lists: Vec<&String> = config.specs.iter().collect();
    match &config.command {
        Command::Resonate(a) => lists.extend(a.large.iter().chain(&a.small)),
        Command::SearchOffline(a) => lists.extend(a.large.iter().chain(&a.small)),
        _ => {}
    }
    lists
        .into_iter()
        .filter_map(|t| {
            // cusp specs are only checked by name here; computing them is deferred
            let parsed = if t.starts_with("cusp:") {
                t[5..].parse::<CuspForm>().map(|_| ()).map_err(|e| e.to_string())
            } else {
                LFunctionSpec::parse(t, 0).map(|_| ()).map_err(|e| e.to_string())
            };
            parsed.err().map(|e| format!("spec `{t}`: {e}"))
        })
        .collect()
}

fn critical_resonator(specs: &[&LFunctionSpec], s: &CriticalScaleArgs) -> Result<Resonator, CliError> {
    let scale = match s.script_l {
        Some(script_l) => CriticalScale::Direct { script_l },
        None => CriticalScale::Height { delta: s.delta, t: s.t },
    };
    Ok(build_resonator_critical(specs, scale, s.lambda, s.eps_p)?)
}

fn arm_options(a: &ArmArgs) -> ArmOptions {
    ArmOptions {
        k: a.k,
        seeds: a.seeds.clone(),
        refine: a.refine,
    }
}

fn non_unit(specs: &[&LFunctionSpec]) -> bool {
    specs.iter().any(|s| !matches!(s.kind(), LFunctionKind::Unit))
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut violations = validate(config);
    violations.extend(spec_violations(config));
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }
    let owned = resolve_all(&config.specs, config)?;
    let specs: Vec<&LFunctionSpec> = owned.iter().collect();
    match &config.command {
        Command::Sieve(a) => {
            let table = sieve_primes(a.limit)?;
            let mut result = json!({
                "limit": a.limit,
                "count": table.len(),
                "largest": table.primes().last(),
            });
            if a.list {
                result["primes"] = to_value(&table.primes())?;
            }
            let csv = a.list.then(|| {
                let mut s = String::from("p\n");
                for p in table.primes() {
                    s.push_str(&format!("{p}\n"));
                }
                s
            });
            Ok(Outcome { result, csv })
        }
        Command::Coeffs(a) => {
            let mut per_spec = Vec::new();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["n".to_string()];
            for s in &specs {
                header.push(format!("re_{}", s.label()));
                header.push(format!("im_{}", s.label()));
            }
            w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
            let mut table = Vec::new();
            for s in &specs {
                let c: Vec<[f64; 2]> = (1..=a.n_max)
                    .map(|n| s.coefficient(n).map(|z| [z.re, z.im]))
                    .collect::<Result<_, _>>()?;
                per_spec.push(json!({ "label": s.label(), "summary": s.summary(), "coefficients": c }));
                table.push(c);
            }
            for n in 0..a.n_max as usize {
                let mut row = vec![(n + 1).to_string()];
                for c in &table {
                    row.push(c[n][0].to_string());
                    row.push(c[n][1].to_string());
                }
                w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            Ok(Outcome {
                result: json!({ "n_max": a.n_max, "specs": per_spec }),
                csv: Some(String::from_utf8_lossy(&bytes).into_owned()),
            })
        }
        Command::Resonate(a) => {
            let res = match a.kind {
                ResonatorChoice::Critical => critical_resonator(&specs, &a.scale)?,
                ResonatorChoice::Offline => {
                    let large_owned = if a.large.is_empty() && a.small.is_empty() {
                        owned.clone()
                    } else {
                        resolve_all(&a.large, config)?
                    };
                    let small_owned = resolve_all(&a.small, config)?;
                    let large: Vec<&LFunctionSpec> = large_owned.iter().collect();
                    let small: Vec<&LFunctionSpec> = small_owned.iter().collect();
                    build_resonator_offline(&large, &small, a.beta, a.scale.t, a.c, a.x_eps)?
                }
            };
            let mut csv = String::from("p,re_r,im_r\n");
            for s in &res.support {
                csv.push_str(&format!("{},{},{}\n", s.p, s.r.re, s.r.im));
            }
            Ok(Outcome {
                result: to_value(&res)?,
                csv: Some(csv),
            })
        }
        Command::Estimates(a) => {
            let res = critical_resonator(&specs, &a.scale)?;
            let report = prime_sum_estimates(&res, &specs, a.sigma)?;
            Ok(Outcome {
                result: json!({
                    "script_l": res.script_l,
                    "log_x": res.log_x,
                    "support_size": res.support.len(),
                    "report": report,
                }),
                csv: None,
            })
        }
        Command::Moments(a) => {
            let res = critical_resonator(&specs, &a.scale)?;
            let q = parse_exponent(&a.q).map_err(|e| CliError::Config(vec![e]))?;
            let pi: Vec<usize> = if a.pi.is_empty() { (0..specs.len()).collect() } else { a.pi.clone() };
            let grid = MomentGrid {
                step: a.step,
                ..MomentGrid::default()
            };
            let t = a.scale.t;
            let ratio = moment_ratio(&specs, &res, &pi, q.value(), a.sigma, t, grid)?;
            let diagnostic = if a.diagnostic {
                Some(difference_diagnostic(&specs, &res, &pi, q, a.sigma, t, grid)?)
            } else {
                None
            };
            Ok(Outcome {
                result: json!({ "moment_ratio": ratio, "difference": diagnostic }),
                csv: None,
            })
        }
        Command::Certify(a) => {
            let w = &a.window;
            let cert = certify_good_interval(&specs, w.sigma0, w.t, w.alpha, w.offset())?;
            Ok(Outcome {
                result: to_value(&cert)?,
                csv: None,
            })
        }
        Command::SearchCritical(a) => {
            let options = CriticalOptions {
                eps_p: a.scale.eps_p,
                script_l: a.scale.script_l,
                arms: arm_options(&a.arms),
            };
            let t = a.scale.t;
            let grid_count = a.grid_count.unwrap_or_else(|| default_grid_count(t, t));
            let report = search_critical(&specs, t, a.scale.delta, a.scale.lambda, grid_count, &options)?;
            Ok(Outcome {
                csv: Some(report.to_csv()?),
                result: to_value(&report)?,
            })
        }
        Command::SearchOffline(a) => {
            let large_owned = if a.large.is_empty() && a.small.is_empty() {
                owned.clone()
            } else {
                resolve_all(&a.large, config)?
            };
            let small_owned = resolve_all(&a.small, config)?;
            let large: Vec<&LFunctionSpec> = large_owned.iter().collect();
            let small: Vec<&LFunctionSpec> = small_owned.iter().collect();
            let all: Vec<&LFunctionSpec> = large.iter().chain(&small).copied().collect();
            let w = &a.window;
            let cert = if non_unit(&all) {
                Some(certify_good_interval(&all, w.sigma0, w.t, w.alpha, w.offset())?)
            } else {
                None
            };
            let options = OfflineOptions {
                x_eps: a.x_eps,
                grid_count: a.grid_count,
                arms: arm_options(&a.arms),
            };
            let report = search_offline(&large, &small, a.sigma, w.t, a.beta, a.c, cert.as_ref(), &options)?;
            Ok(Outcome {
                csv: Some(report.to_csv()?),
                result: json!({ "certificate": cert, "report": report }),
            })
        }
        Command::SearchKronecker(a) => {
            let w = &a.window;
            let cert = certify_good_interval(&specs, w.sigma0, w.t, w.alpha, w.offset())?;
            let phis = if a.phis.is_empty() { vec![0.0; specs.len()] } else { a.phis.clone() };
            let options = KroneckerOptions {
                align_step: a.align_step,
            };
            let report = search_kronecker(&specs, w.sigma0, w.t, &phis, a.c, a.m, Some(&cert), &options)?;
            Ok(Outcome {
                csv: Some(report.to_csv()?),
                result: json!({ "certificate": cert, "report": report }),
            })
        }
        Command::Align(a) => {
            let freqs: Vec<f64> = if a.primes.is_empty() {
                a.frequencies.clone()
            } else {
                a.primes.iter().map(|&p| (p as f64).ln() / (2.0 * PI)).collect()
            };
            let n = freqs.len();
            let phases = if a.phases.is_empty() { vec![0.0; n] } else { a.phases.clone() };
            let weights = if a.weights.is_empty() { vec![1.0; n] } else { a.weights.clone() };
            let problem = AlignmentProblem::new(freqs, phases, weights, a.t1, a.t2, a.m)?;
            let max_freq = problem.frequencies.iter().copied().fold(0.0, f64::max);
            let step = a.step.unwrap_or(1.0 / (8.0 * max_freq));
            let result = align_search(&problem, step)?;
            Ok(Outcome {
                result: json!({ "problem": problem, "result": result }),
                csv: None,
            })
        }
        Command::Verify(a) => {
            let report = run_verify(a.seed);
            let failed = report.iter().filter(|c| !c.passed).count();
            let value = to_value(&report)?;
            if failed > 0 {
                return Err(CliError::VerifyFailed { failed, report: value });
            }
            Ok(Outcome {
                result: json!({ "checks": value, "all_passed": true }),
                csv: None,
            })
        }
    }
}
