//! Resonance-method toolkit: L-function evaluation, resonator Dirichlet
//! polynomials, twisted moments, a quantitative Kronecker solver and search
//! pipelines for simultaneous extreme values of several L-functions.

pub mod arith;
pub mod numeric;
pub mod lfunc;
pub mod resonator;
pub mod moments;
pub mod search;
pub mod align;
pub mod signed_sums;
