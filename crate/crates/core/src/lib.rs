//! Numerical machinery behind a sieve-theoretic bound for almost-prime
//! triples (p, p+2, p+6): Dickman's function, the linear-sieve bound
//! functions with their two-variable vector-sieve combinations, a
//! two-dimensional Selberg main-term constant, the master functional with
//! its weight threshold and almost-prime exponent, and a desk-scale
//! empirical counting sieve.

// Validation sites use negated comparisons so NaN arguments fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cache;
pub mod dickman;
pub mod empirical;
pub mod error;
pub mod golden;
mod interp;
pub mod primes;
pub mod quad;
pub mod selberg;
pub mod sievefn;

pub use bounds::{
    exponent_r, h_from_components, hl_constant, integral_j, integral_l, BoundReport, Engine,
    SearchBounds, SieveParams, DEFAULT_P_LIMIT,
};
pub use dickman::{build_rho_table, RhoTable};
pub use empirical::{
    build_factor_sieve, count_chen_triples, density_report, vector_sieve_check, FactorSieve,
    TripleCount, VsCheckConfig, VsCheckReport,
};
pub use error::{Error, Result};
pub use selberg::{b_one_var, b_one_var_tail, BEvaluator};
pub use sievefn::{build_sievefn_table, SieveFnTable};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// exp(EULER_GAMMA), the constant the tables are seeded with.
pub const EXP_GAMMA: f64 = 1.781_072_417_990_198;

/// Default grid extents used by the CLI and the acceptance suite.
pub const DEFAULT_RHO_S_MAX: f64 = 250.0;
pub const DEFAULT_SIEVEFN_S_MAX: f64 = 210.0;
pub const DEFAULT_STEP: f64 = 1.0 / 256.0;
