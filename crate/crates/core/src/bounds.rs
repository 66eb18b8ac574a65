//! The master bound chain: the integrals I, J, L, the Hardy-Littlewood
//! constant C, the functional H with its exact feasibility threshold in the
//! weight parameter, the resulting almost-prime exponent, and a
//! deterministic parameter search.

use serde::{Deserialize, Serialize};

use crate::error::{domain, infeasible, Result};
use crate::primes::simple_sieve;
use crate::quad::{adaptive_simpson, adaptive_simpson_split};
use crate::selberg::{b_one_var, BEvaluator, DEFAULT_QUAD_TOL};
use crate::sievefn::SieveFnTable;
use crate::RhoTable;

/// Prime cutoff used for the Hardy-Littlewood constant when none is given.
pub const DEFAULT_P_LIMIT: u64 = 10_000_000;

const I_QUAD_TOL: f64 = 1e-6;
const J_QUAD_TOL: f64 = 1e-7;
const L_QUAD_TOL: f64 = 1e-8;

/// Exponent parameters (theta1, theta2, theta) and the weight lambda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta: f64,
    pub lambda: f64,
}

impl Default for SieveParams {
    /// The published operating point.
    fn default() -> Self {
        Self {
            theta1: 1.0 / 11.0,
            theta2: 1.0 / 410.0,
            theta: 1.0 / 30.0,
            lambda: 0.0145,
        }
    }
}

impl SieveParams {
    pub fn new(theta1: f64, theta2: f64, theta: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            theta1,
            theta2,
            theta,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// Check every structural constraint, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        if !(self.theta2 > 0.0 && self.theta2 < self.theta1) {
            return Err(domain(format!(
                "requires 0 < theta2 < theta1, got theta2={} theta1={}",
                self.theta2, self.theta1
            )));
        }
        if !(self.theta1 < 1.0 / 3.0) {
            return Err(domain(format!(
                "requires theta1 < 1/3, got theta1={}",
                self.theta1
            )));
        }
        if !(self.theta > self.theta2 && self.theta < 1.0) {
            return Err(domain(format!(
                "requires theta2 < theta < 1, got theta={}",
                self.theta
            )));
        }
        if !(2.0 * self.theta2 + self.theta < 0.5) {
            return Err(domain(format!(
                "requires 2*theta2 + theta < 1/2, got {}",
                2.0 * self.theta2 + self.theta
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(domain(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Every intermediate constant of one evaluation of the bound chain.
///
/// `h` always equals
/// `f2 - i/2 - 2*l*theta1*b1v - lambda*(1 + ln((1-theta1)/(3*theta1))/2)*j`
/// for the parameters it was evaluated at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub f2: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "B1v")]
    pub b1v: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub lambda_star: f64,
    pub r: u32,
    pub crossover_alpha: f64,
}

/// Coefficient of lambda in the functional: (1 + ln((1-t1)/(3 t1)) / 2) * J.
fn lambda_weight(theta1: f64) -> f64 {
    1.0 + 0.5 * ((1.0 - theta1) / (3.0 * theta1)).ln()
}

/// Assemble the functional from already-computed components.
pub fn h_from_components(f2: f64, i: f64, l: f64, b1v: f64, j: f64, theta1: f64, lambda: f64) -> f64 {
    f2 - 0.5 * i - 2.0 * l * theta1 * b1v - lambda * lambda_weight(theta1) * j
}

/// L(s): double logarithmic integral over the role-reversal region.
/// The inner integral collapses to ln(2 - 3 beta) / (1 - beta).
/// Returns 0 for s <= 3 (empty range).
pub fn integral_l(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(domain(format!("L requires finite s, got {s}")));
    }
    if s <= 3.0 {
        return Ok(0.0);
    }
    let f = |beta: f64| (2.0 - 3.0 * beta).ln() / (beta * (1.0 - beta));
    Ok(adaptive_simpson(&f, 1.0 / s, 1.0 / 3.0, L_QUAD_TOL))
}

/// J(theta1, theta2, theta): weighted-sieve integral, using the closed
/// one-variable form of B in the integrand.
pub fn integral_j(params: &SieveParams) -> Result<f64> {
    params.validate()?;
    let SieveParams {
        theta1,
        theta2,
        theta,
        ..
    } = *params;
    // The one-variable closed form needs its argument >= 2 across the range;
    // the argument is decreasing in alpha so the binding point is alpha = theta.
    if (1.0 - 2.0 * theta) / (4.0 * theta2) < 2.0 {
        return Err(domain(format!(
            "requires (1 - 2*theta)/(4*theta2) >= 2, got {}",
            (1.0 - 2.0 * theta) / (4.0 * theta2)
        )));
    }
    let f = |alpha: f64| {
        let v = (1.0 - 2.0 * alpha) / (4.0 * theta2);
        4.0 * theta1 / (1.0 - 2.0 * alpha) * (theta - alpha) / (alpha * theta)
            * b_one_var(v).expect("v >= 2 checked on the whole range")
    };
    Ok(adaptive_simpson(&f, theta2, theta, J_QUAD_TOL))
}

/// The Hardy-Littlewood constant for the triple pattern:
/// (9/2) * product over primes 3 < p <= p_limit of (1 - (3p-1)/(p-1)^3).
///
/// Returns `(estimate, half_width)` where the estimate is the truncated
/// product (an upper bound for the full one) and the true constant lies in
/// `[estimate - 2*half_width, estimate]`. The tail uses
/// (3p-1)/(p-1)^3 <= 4/p^2, valid for p >= 11, so the enclosure is
/// rigorous for any p_limit >= 11.
pub fn hl_constant(p_limit: u64) -> Result<(f64, f64)> {
    if p_limit < 5 {
        return Err(domain(format!(
            "p_limit must be at least 5 so the product is nonempty, got {p_limit}"
        )));
    }
    let mut prod = 1.0f64;
    for p in simple_sieve(p_limit) {
        if p <= 3 {
            continue;
        }
        let pm = (p - 1) as f64;
        prod *= 1.0 - (3.0 * p as f64 - 1.0) / (pm * pm * pm);
    }
    let estimate = 4.5 * prod;
    // sum over p > P of -ln(1 - x_p) <= (4/P) * (1 + 5e-10) for P >= 1e5;
    // the slack swallows the x^2 correction for P down to 11.
    let t = 4.0000001 / p_limit as f64;
    let half_width = estimate * (1.0 - (-t).exp()) / 2.0;
    Ok((estimate, half_width))
}

/// The almost-prime exponent from the strict bound on prime factor counts:
/// the largest integer below 1/theta + 1/lambda over admissible weights
/// lambda < lambda_star.
pub fn exponent_r(theta: f64, lambda_star: f64) -> Result<u32> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("requires 0 < theta < 1, got {theta}")));
    }
    if !(lambda_star > 0.0) {
        return Err(infeasible(format!(
            "exponent requires a positive threshold, got {lambda_star}"
        )));
    }
    let t = 1.0 / theta + if lambda_star.is_infinite() { 0.0 } else { 1.0 / lambda_star };
    // At an exact integer the strictness of lambda < lambda_star keeps the
    // value itself attainable; otherwise round up and step back.
    let r = if (t - t.round()).abs() < 1e-9 {
        t.round()
    } else {
        t.ceil() - 1.0
    };
    Ok(r as u32)
}

/// Rectangular search box over the three exponent parameters. The weight
/// is held fixed; it only shifts where H sits below its threshold, not the
/// exponent being minimized.
#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub theta1: (f64, f64),
    pub theta2: (f64, f64),
    pub theta: (f64, f64),
    pub lambda: f64,
}

impl SearchBounds {
    /// Box of `spread` relative half-width around a center point.
    pub fn around(center: &SieveParams, spread: f64) -> Self {
        let pm = |v: f64| (v * (1.0 - spread), v * (1.0 + spread));
        Self {
            theta1: pm(center.theta1),
            theta2: pm(center.theta2),
            theta: pm(center.theta),
            lambda: center.lambda,
        }
    }
}

/// Evaluator bundling the two tables, the B evaluator, and the (parameter
/// independent) Hardy-Littlewood constant.
pub struct Engine<'a> {
    sieve: &'a SieveFnTable,
    bev: BEvaluator<'a>,
    hl: (f64, f64),
    p_limit: u64,
}

impl<'a> Engine<'a> {
    pub fn new(rho: &'a RhoTable, sieve: &'a SieveFnTable) -> Result<Self> {
        Self::with_options(rho, sieve, DEFAULT_P_LIMIT, DEFAULT_QUAD_TOL)
    }

    pub fn with_options(
        rho: &'a RhoTable,
        sieve: &'a SieveFnTable,
        p_limit: u64,
        quad_tol: f64,
    ) -> Result<Self> {
        Ok(Self {
            sieve,
            bev: BEvaluator::with_tol(rho, quad_tol)?,
            hl: hl_constant(p_limit)?,
            p_limit,
        })
    }

    pub fn b_evaluator(&self) -> &BEvaluator<'a> {
        &self.bev
    }

    pub fn sieve_table(&self) -> &SieveFnTable {
        self.sieve
    }

    pub fn hl_estimate(&self) -> (f64, f64) {
        self.hl
    }

    pub fn p_limit(&self) -> u64 {
        self.p_limit
    }

    fn vector_branch(&self, params: &SieveParams, alpha: f64) -> Option<f64> {
        let len = 1.0 - 2.0 * alpha;
        let sigma1 = len / (2.0 * params.theta1);
        let sigma2 = len / (2.0 * params.theta2);
        if 1.0 / sigma1 + 1.0 / sigma2 > 1.0 {
            return None;
        }
        Some(self.sieve.upper2(sigma1, sigma2).expect("constraint checked"))
    }

    fn selberg_branch(&self, params: &SieveParams, alpha: f64) -> f64 {
        let len = 1.0 - 2.0 * alpha;
        self.bev
            .big_b(len / (4.0 * params.theta1), len / (4.0 * params.theta2))
            .expect("arguments positive for alpha < 1/2")
    }

    /// I(theta1, theta2) together with the crossover abscissa where the
    /// Selberg branch of the integrand takes over from the vector-sieve
    /// branch. The quadrature is split there because the min has a kink.
    pub fn integral_i(&self, params: &SieveParams) -> Result<(f64, f64)> {
        params.validate()?;
        let a = params.theta1;
        let b = 1.0 / 3.0;
        if a >= b {
            return Ok((0.0, b));
        }
        // Positive where the Selberg branch wins; +inf marks an empty
        // vector-sieve constraint set.
        let diff = |alpha: f64| match self.vector_branch(params, alpha) {
            Some(v) => v - self.selberg_branch(params, alpha),
            None => f64::INFINITY,
        };
        let crossover = locate_sign_change(&diff, a, b);
        let integrand = |alpha: f64| {
            let sb = self.selberg_branch(params, alpha);
            let vb = self.vector_branch(params, alpha).unwrap_or(f64::INFINITY);
            vb.min(sb) / alpha
        };
        let mut pts = vec![a, b];
        if crossover > a && crossover < b {
            pts.insert(1, crossover);
        }
        let value = adaptive_simpson_split(&integrand, &pts, I_QUAD_TOL);
        Ok((value, crossover))
    }

    /// Exact root of the affine map lambda -> H(theta1, theta2, theta, lambda).
    /// The lambda field of `params` is ignored.
    pub fn lambda_threshold(&self, params: &SieveParams) -> Result<f64> {
        let report = self.evaluate_at(params, params.lambda.max(1e-6))?;
        Ok(report.lambda_star)
    }

    /// Evaluate the whole chain at the given parameters.
    pub fn evaluate(&self, params: &SieveParams) -> Result<BoundReport> {
        self.evaluate_at(params, params.lambda)
    }

    fn evaluate_at(&self, params: &SieveParams, lambda: f64) -> Result<BoundReport> {
        let checked = SieveParams { lambda, ..*params };
        checked.validate()?;
        let f2 = self
            .sieve
            .lower2(1.0 / (2.0 * params.theta1), 1.0 / (2.0 * params.theta2))?;
        let (i, crossover_alpha) = self.integral_i(&checked)?;
        let l = integral_l(1.0 / params.theta1)?;
        let b1v = b_one_var(1.0 / (4.0 * params.theta2))?;
        let j = integral_j(&checked)?;
        let h = h_from_components(f2, i, l, b1v, j, params.theta1, lambda);
        let numerator = f2 - 0.5 * i - 2.0 * l * params.theta1 * b1v;
        if numerator <= 0.0 {
            return Err(infeasible(format!(
                "functional is non-positive at lambda = 0 (numerator {numerator})"
            )));
        }
        let lambda_star = numerator / (lambda_weight(params.theta1) * j);
        let r = exponent_r(params.theta, lambda_star)?;
        Ok(BoundReport {
            f2,
            i,
            l,
            b1v,
            j,
            c: self.hl.0,
            h,
            lambda_star,
            r,
            crossover_alpha,
        })
    }

    /// Deterministic grid-then-refine search minimizing the exponent, ties
    /// broken by larger threshold then lexicographically smaller parameters.
    /// `budget` caps the number of full chain evaluations.
    pub fn parameter_search(
        &self,
        bounds: &SearchBounds,
        budget: usize,
    ) -> Result<(SieveParams, BoundReport)> {
        if budget == 0 {
            return Err(domain("search budget must be at least 1"));
        }
        let center = SieveParams {
            theta1: 0.5 * (bounds.theta1.0 + bounds.theta1.1),
            theta2: 0.5 * (bounds.theta2.0 + bounds.theta2.1),
            theta: 0.5 * (bounds.theta.0 + bounds.theta.1),
            lambda: bounds.lambda,
        };
        let mut used = 0usize;
        let mut best: Option<(SieveParams, BoundReport)> = None;

        let consider = |cand: SieveParams,
                            used: &mut usize,
                            best: &mut Option<(SieveParams, BoundReport)>| {
            if *used >= budget || cand.validate().is_err() {
                return;
            }
            *used += 1;
            let Ok(report) = self.evaluate(&cand) else {
                return;
            };
            let better = match best {
                None => true,
                Some((bp, br)) => {
                    let key = (report.r, -report.lambda_star, cand.theta1, cand.theta2, cand.theta);
                    let bkey = (br.r, -br.lambda_star, bp.theta1, bp.theta2, bp.theta);
                    key < bkey
                }
            };
            if better {
                *best = Some((cand, report));
            }
        };

        consider(center, &mut used, &mut best);

        let axis = |lo: f64, hi: f64, m: usize, i: usize| {
            if hi <= lo || m <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (m - 1) as f64
            }
        };
        if budget > 1 {
            let m = (((budget - 1) as f64).cbrt().floor() as usize).clamp(1, 16);
            for i1 in 0..m {
                for i2 in 0..m {
                    for i3 in 0..m {
                        let cand = SieveParams {
                            theta1: axis(bounds.theta1.0, bounds.theta1.1, m, i1),
                            theta2: axis(bounds.theta2.0, bounds.theta2.1, m, i2),
                            theta: axis(bounds.theta.0, bounds.theta.1, m, i3),
                            lambda: bounds.lambda,
                        };
                        consider(cand, &mut used, &mut best);
                    }
                }
            }
            // Local refinement: shrink a 3^3 box around the incumbent.
            let mut scale = 0.5;
            while used < budget {
                let Some((bp, _)) = &best else { break };
                let anchor = *bp;
                let width = |r: (f64, f64)| (r.1 - r.0) * scale * 0.5;
                let w1 = width(bounds.theta1);
                let w2 = width(bounds.theta2);
                let w3 = width(bounds.theta);
                if w1.max(w2).max(w3) < 1e-12 {
                    break;
                }
                for i1 in 0..3 {
                    for i2 in 0..3 {
                        for i3 in 0..3 {
                            let cand = SieveParams {
                                theta1: (anchor.theta1 + (i1 as f64 - 1.0) * w1)
                                    .clamp(bounds.theta1.0, bounds.theta1.1),
                                theta2: (anchor.theta2 + (i2 as f64 - 1.0) * w2)
                                    .clamp(bounds.theta2.0, bounds.theta2.1),
                                theta: (anchor.theta + (i3 as f64 - 1.0) * w3)
                                    .clamp(bounds.theta.0, bounds.theta.1),
                                lambda: bounds.lambda,
                            };
                            if cand == anchor {
                                continue;
                            }
                            consider(cand, &mut used, &mut best);
                        }
                    }
                }
                scale *= 0.5;
            }
        }

        best.ok_or_else(|| infeasible("no feasible point in the search box"))
    }
}

/// First crossing of `diff` from negative to non-negative on [a, b],
/// located by a coarse scan then bisection. Returns `a` if the function
/// starts non-negative and `b` if it never crosses.
fn locate_sign_change(diff: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const SCAN: usize = 64;
    let h = (b - a) / SCAN as f64;
    if diff(a) >= 0.0 {
        return a;
    }
    let mut prev_x = a;
    for i in 1..=SCAN {
        let x = a + i as f64 * h;
        if diff(x) >= 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if diff(mid) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev_x = x;
    }
    b
}
