//! Arithmetic substrate: primes, Dirichlet characters, cusp-form
//! coefficients, coefficient series and the on-disk coefficient cache.

mod cache;
mod characters;
mod cusp;
mod primes;
mod series;

pub use cache::{CoefficientCache, CACHE_MAGIC, CACHE_VERSION};
pub use characters::{characters_mod, dirichlet_character, unit_group_orders, DirichletCharacter};
pub use cusp::{cuspform_coefficients, raw_cusp_coefficients, CuspForm};
pub use primes::{factorize, gcd, is_prime, sieve_primes, totient, PrimeTable};
pub use series::{coeff_correlation, CoefficientSeries, Correlation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("invalid character index {index:?} for modulus {modulus} (group orders {orders:?})")]
    InvalidIndex {
        modulus: u64,
        index: Vec<u64>,
        orders: Vec<u64>,
    },
    #[error("unsupported form `{0}`")]
    UnsupportedForm(String),
    #[error("coefficient of `{form}` at p = {p} violates the Deligne bound: |a(p)| = {value}")]
    DeligneViolation { form: String, p: u64, value: f64 },
    #[error("integer overflow while expanding `{form}` at n = {n}")]
    Overflow { form: String, n: usize },
    #[error("series `{label}` is only defined up to {available}, need {needed}")]
    SeriesTooShort {
        label: String,
        available: usize,
        needed: usize,
    },
    #[error("cache entry not found: {0}")]
    NotFound(String),
    #[error("cache integrity error in {path}: {reason}")]
    Integrity { path: String, reason: String },
    #[error("cache version mismatch: file has {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
