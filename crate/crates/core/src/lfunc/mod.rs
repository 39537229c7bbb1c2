//! L-function data model and evaluators: ζ, Dirichlet L-functions and the
//! L-function of the discriminant form, their logarithms, fractional-power
//! coefficients and zero counting in rectangles.

mod cusp;
mod dirichlet;
mod fractional;
mod grid;
mod log;
mod riemann_siegel;
mod zeros;
mod zeta;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    cuspform_coefficients, dirichlet_character, factorize, ArithError, CoefficientSeries,
    CuspForm, DirichletCharacter,
};

pub use cusp::{cusp_afe, cusp_smoothed_series};
pub use dirichlet::evaluate_dirichlet_l;
pub use fractional::{
    fractional_coefficients, local_factor_power, roots_power_series, self_convolve, tau_q, Exponent,
    FractionalCoefficients,
};
pub use grid::{evaluate_on_progression, Progression, ProgressionSum};
pub use log::{log_l, LogBranchPath};
pub use riemann_siegel::{hardy_z, riemann_siegel_theta, zeta_critical_rs, RS_MIN_HEIGHT};
pub use zeros::{count_in_rectangle, count_zeros_rectangle, locate_zero, Rectangle, ZeroCount, RIGHT_EDGE};
pub use zeta::{evaluate_zeta, zeta_with_error};

#[derive(Debug, Error)]
pub enum LfuncError {
    #[error("`{label}` has a pole at s = {s}")]
    Pole { label: String, s: Complex64 },
    #[error("`{label}` cannot be evaluated at s = {s}: {reason}")]
    UnsupportedRegion {
        label: String,
        s: Complex64,
        reason: String,
    },
    #[error("path for `{label}` passes through or near a zero at s ≈ {s}")]
    ZeroCrossing { label: String, s: Complex64 },
    #[error("contour for `{label}` stays too close to a zero after {attempts} nudges: {detail}")]
    ContourTooClose {
        label: String,
        attempts: usize,
        detail: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Where the Dirichlet coefficients of a spec come from.
#[derive(Debug, Clone)]
pub enum LFunctionKind {
    Zeta,
    Dirichlet(DirichletCharacter),
    Cusp {
        form: CuspForm,
        coefficients: Arc<CoefficientSeries>,
    },
    /// The constant function 1 (empty Euler product).
    Unit,
}

/// One L-function: Euler product data, coefficient oracle and constants.
#[derive(Debug, Clone)]
pub struct LFunctionSpec {
    label: String,
    kind: LFunctionKind,
}

/// Serializable description of a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub label: String,
    pub degree: u32,
    pub kappa: f64,
    pub theta: f64,
    pub pole_order: u32,
    pub coefficient_limit: Option<usize>,
}

/// A value with an attached absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
}

/// Default number of cusp-form coefficients precomputed by [`LFunctionSpec::parse`].
pub const DEFAULT_CUSP_COEFFICIENTS: usize = 100_000;

impl LFunctionSpec {
    pub fn zeta() -> Self {
        Self {
            label: "zeta".into(),
            kind: LFunctionKind::Zeta,
        }
    }

    pub fn dirichlet(chi: DirichletCharacter) -> Self {
        Self {
            label: chi.label(),
            kind: LFunctionKind::Dirichlet(chi),
        }
    }

    pub fn cusp(form: CuspForm, n_max: usize) -> Result<Self, LfuncError> {
        let series = cuspform_coefficients(form, n_max)?;
        Ok(Self::cusp_from_series(form, series))
    }

    pub fn cusp_from_series(form: CuspForm, series: CoefficientSeries) -> Self {
        Self {
            label: format!("cusp:{}", form.name()),
            kind: LFunctionKind::Cusp {
                form,
                coefficients: Arc::new(series),
            },
        }
    }

    pub fn unit() -> Self {
        Self {
            label: "one".into(),
            kind: LFunctionKind::Unit,
        }
    }

    /// Parses `zeta`, `one`, `chi:<q>:<i,j,...>` or `cusp:<form>`.
    pub fn parse(text: &str, cusp_coefficients: usize) -> Result<Self, LfuncError> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        match parts.as_slice() {
            ["zeta"] => Ok(Self::zeta()),
            ["one"] | ["1"] => Ok(Self::unit()),
            ["chi", q, idx] => {
                let q: u64 = q
                    .parse()
                    .map_err(|_| LfuncError::InvalidInput(format!("bad modulus in `{text}`")))?;
                let index = idx
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| LfuncError::InvalidInput(format!("bad index in `{text}`")))?;
                // `chi:q:0` names the principal character whatever the group rank
                let rank = crate::arith::unit_group_orders(q).len();
                let index = if index.iter().all(|&k| k == 0) {
                    vec![0; rank]
                } else {
                    index
                };
                Ok(Self::dirichlet(dirichlet_character(q, &index)?))
            }
            ["cusp", form] => Self::cusp(form.parse()?, cusp_coefficients),
            _ => Err(LfuncError::InvalidInput(format!(
                "unknown L-function `{text}` (expected zeta, one, chi:q:i or cusp:delta)"
            ))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &LFunctionKind {
        &self.kind
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            LFunctionKind::Zeta | LFunctionKind::Dirichlet(_) => 1,
            LFunctionKind::Cusp { .. } => 2,
            LFunctionKind::Unit => 0,
        }
    }

    /// Exponent bound on the local roots; every supported spec satisfies Ramanujan.
    pub fn theta(&self) -> f64 {
        0.0
    }

    /// The constant κ in `Σ_{p<=x} |a(p)|² ~ κ x / log x`.
    pub fn kappa(&self) -> f64 {
        match self.kind {
            LFunctionKind::Unit => 0.0,
            _ => 1.0,
        }
    }

    pub fn pole_order(&self) -> u32 {
        match &self.kind {
            LFunctionKind::Zeta => 1,
            LFunctionKind::Dirichlet(chi) if chi.is_principal() => 1,
            _ => 0,
        }
    }

    /// Largest `n` for which `a(n)` is available, if finite.
    pub fn coefficient_limit(&self) -> Option<usize> {
        match &self.kind {
            LFunctionKind::Cusp { coefficients, .. } => Some(coefficients.n_max()),
            _ => None,
        }
    }

    pub fn summary(&self) -> SpecSummary {
        SpecSummary {
            label: self.label.clone(),
            degree: self.degree(),
            kappa: self.kappa(),
            theta: self.theta(),
            pole_order: self.pole_order(),
            coefficient_limit: self.coefficient_limit(),
        }
    }

    fn out_of_range(&self, n: u64) -> LfuncError {
        LfuncError::UnsupportedRegion {
            label: self.label.clone(),
            s: Complex64::new(f64::NAN, f64::NAN),
            reason: format!(
                "coefficient a({n}) requested but only {} are available",
                self.coefficient_limit().unwrap_or(0)
            ),
        }
    }

    /// Dirichlet coefficient `a(n)`.
    pub fn coefficient(&self, n: u64) -> Result<Complex64, LfuncError> {
        let one = Complex64::new(1.0, 0.0);
        match &self.kind {
            LFunctionKind::Zeta => Ok(one),
            LFunctionKind::Dirichlet(chi) => Ok(chi.value(n)),
            LFunctionKind::Cusp { coefficients, .. } => coefficients
                .get(n as usize)
                .ok_or_else(|| self.out_of_range(n)),
            LFunctionKind::Unit => Ok(if n == 1 { one } else { Complex64::new(0.0, 0.0) }),
        }
    }

    /// `a(p) = Σ_j α_j(p)`.
    pub fn a_prime(&self, p: u64) -> Result<Complex64, LfuncError> {
        self.coefficient(p)
    }

    /// Local roots `α_j(p)` of the Euler factor `Π_j (1 − α_j(p) p^{-s})^{-1}`.
    pub fn local_roots(&self, p: u64) -> Result<Vec<Complex64>, LfuncError> {
        match &self.kind {
            LFunctionKind::Zeta => Ok(vec![Complex64::new(1.0, 0.0)]),
            LFunctionKind::Dirichlet(chi) => Ok(vec![chi.value(p)]),
            LFunctionKind::Cusp { .. } => {
                // X² − a(p) X + 1 with |a(p)| <= 2: a conjugate pair on the unit circle
                let a = self.a_prime(p)?.re;
                let disc = (4.0 - a * a).max(0.0).sqrt();
                Ok(vec![
                    Complex64::new(a / 2.0, disc / 2.0),
                    Complex64::new(a / 2.0, -disc / 2.0),
                ])
            }
            LFunctionKind::Unit => Ok(Vec::new()),
        }
    }

    /// Euler-log coefficient `b(p^k) = Σ_j α_j(p)^k / k`.
    pub fn euler_log_coefficient(&self, p: u64, k: u32) -> Result<Complex64, LfuncError> {
        if k == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let roots = self.local_roots(p)?;
        let sum: Complex64 = roots.iter().map(|a| a.powu(k)).sum();
        Ok(sum / k as f64)
    }

    /// `b(n)`: the Euler-log coefficient at prime powers, zero elsewhere.
    pub fn b(&self, n: u64) -> Result<Complex64, LfuncError> {
        match factorize(n).as_slice() {
            [(p, k)] => self.euler_log_coefficient(*p, *k),
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    }
}

impl fmt::Display for LFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Evaluates `L(s)` with an error estimate.
///
/// ζ and Dirichlet L-functions use Euler–Maclaurin summation (Riemann–Siegel on
/// the critical line at large height); the discriminant form uses a smoothed
/// Dirichlet series for `Re s >= 1` and a smoothed approximate functional
/// equation below.
pub fn evaluate_l(spec: &LFunctionSpec, s: Complex64) -> Result<Evaluation, LfuncError> {
    match &spec.kind {
        LFunctionKind::Zeta => {
            let (value, error) = zeta_with_error(s)?;
            Ok(Evaluation { value, error })
        }
        LFunctionKind::Dirichlet(chi) => {
            let (value, error) = dirichlet::dirichlet_with_error(chi, s, spec.label())?;
            Ok(Evaluation { value, error })
        }
        LFunctionKind::Cusp { form, coefficients } => cusp::evaluate_cusp(*form, coefficients, s, spec.label()),
        LFunctionKind::Unit => Ok(Evaluation {
            value: Complex64::new(1.0, 0.0),
            error: 0.0,
        }),
    }
}
