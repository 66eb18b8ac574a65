//! The two-dimensional main-term constant of the mixed-dimension Selberg
//! sieve, defined through a product of two Dickman kernels:
//!
//! B(s1, s2)^-1 = e^(-2 gamma) * integral of rho(w1) rho(w2) over the
//! region w1, w2 >= 0, w1/s1 + w2/s2 <= 1.
//!
//! The inner integral is a lookup into a precomputed antiderivative of rho,
//! so a full evaluation is one one-dimensional adaptive pass.

use crate::dickman::{RhoAntiderivative, RhoTable};
use crate::error::{domain, Result};
use crate::quad::adaptive_simpson_split;
use crate::EXP_GAMMA;

/// Default absolute tolerance for the outer quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

/// Evaluator for B over a fixed rho table.
#[derive(Debug)]
pub struct BEvaluator<'a> {
    rho: &'a RhoTable,
    quad_tol: f64,
    anti: RhoAntiderivative,
}

impl<'a> BEvaluator<'a> {
    pub fn new(rho: &'a RhoTable) -> Self {
        Self::with_tol(rho, DEFAULT_QUAD_TOL).expect("default tolerance is valid")
    }

    /// `quad_tol` must be positive and at most 1e-8 so the advertised 1e-6
    /// accuracy of B holds with margin.
    pub fn with_tol(rho: &'a RhoTable, quad_tol: f64) -> Result<Self> {
        if !(quad_tol > 0.0 && quad_tol <= 1e-8) {
            return Err(domain(format!(
                "quad_tol must be in (0, 1e-8], got {quad_tol}"
            )));
        }
        Ok(Self {
            rho,
            quad_tol,
            anti: RhoAntiderivative::new(rho),
        })
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    pub fn rho_table(&self) -> &RhoTable {
        self.rho
    }

    /// Integral of rho from 0 to x.
    pub fn rho_integral_to(&self, x: f64) -> f64 {
        self.anti.integral_to(self.rho, x)
    }

    /// The constant B(s1, s2) by iterated quadrature.
    pub fn big_b(&self, s1: f64, s2: f64) -> Result<f64> {
        if !(s1 > 0.0 && s1.is_finite() && s2 > 0.0 && s2.is_finite()) {
            return Err(domain(format!(
                "B requires positive finite arguments, got ({s1}, {s2})"
            )));
        }
        // rho vanishes beyond the grid, so the outer range can be clipped.
        let w1_max = s1.min(self.rho.s_max());

        // Split at integer w1 (kinks of rho) and where the inner limit
        // crosses 1 or 2 (kinks of the antiderivative).
        let mut pts = vec![0.0, w1_max];
        let mut k = 1.0;
        while k < w1_max {
            pts.push(k);
            k += 1.0;
        }
        for inner in [1.0, 2.0] {
            let w = s1 * (1.0 - inner / s2);
            if w > 0.0 && w < w1_max {
                pts.push(w);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();

        let integrand = |w1: f64| {
            let limit = s2 * (1.0 - w1 / s1);
            self.rho.rho(w1) * self.anti.integral_to(self.rho, limit)
        };
        let q = adaptive_simpson_split(&integrand, &pts, self.quad_tol);
        Ok(EXP_GAMMA * EXP_GAMMA / q)
    }
}

/// Closed form of the one-variable case:
/// B(1, v) = e^gamma * v / (v - 1), with a factorial tail controlling the
/// replacement of the truncated Dickman integral by its full moments.
/// Requires v >= 2 so the tail bound e / floor(v)! applies.
pub fn b_one_var(v: f64) -> Result<f64> {
    if !(v >= 2.0) {
        return Err(domain(format!("B(1, v) closed form requires v >= 2, got {v}")));
    }
    Ok(EXP_GAMMA * v / (v - 1.0))
}

/// Certified bound on the tail dropped by the closed form: e / floor(v)!.
pub fn b_one_var_tail(v: f64) -> f64 {
    let k = v.floor() as u64;
    let mut fact = 1.0f64;
    for i in 2..=k.min(200) {
        fact *= i as f64;
        if fact.is_infinite() {
            return 0.0;
        }
    }
    std::f64::consts::E / fact
}
