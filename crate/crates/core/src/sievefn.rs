//! Linear-sieve upper and lower bound functions and their two-variable
//! combinations.
//!
//! The pair (F, f) is pinned down by the seed formulas
//! F(s) = 2 e^gamma / s on (0, 3], f(s) = 2 e^gamma ln(s-1) / s on [2, 4],
//! and the delay system (sF(s))' = f(s-1), (sf(s))' = F(s-1) beyond. Both
//! are tabulated panelwise exactly like the Dickman table; since the
//! right-hand sides do not involve the unknown at the current point, each
//! step is a plain Simpson update with a panel-confined cubic for the
//! half-step delayed value.
//!
//! F decreases to 1 and f increases to 1, and the gap collapses so fast
//! that past s of about 13 the difference is below 1e-9. The builder
//! records that point as `cutoff` and stores exact 1.0 beyond it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::interp::cubic_confined;
use crate::EXP_GAMMA;

/// First grid abscissa. Below it F has the closed seed form and f vanishes.
const GRID_START: f64 = 2.0;

/// Grid gap F - f below which both functions are clamped to exactly 1.
const CUTOFF_TOL: f64 = 1e-9;

/// Points in the coarse scan stage of the constrained optimizers.
const COARSE_GRID: usize = 1024;

/// Paired grids of the linear-sieve functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SieveFnTable {
    s_max: f64,
    step: f64,
    upper_values: Vec<f64>,
    lower_values: Vec<f64>,
    cutoff: f64,
    cutoff_err: f64,
}

/// Build the paired tables on [2, s_max].
///
/// `s_max` must be at least 210 so that every two-variable query arising
/// from admissible sieve parameters stays on the grid.
pub fn build_sievefn_table(s_max: f64, step: f64) -> Result<SieveFnTable> {
    if !(step > 0.0 && step <= crate::dickman::MAX_STEP) {
        return Err(domain(format!("step must be in (0, 1/64], got {step}")));
    }
    if !(s_max >= 210.0) {
        return Err(domain(format!("s_max must be at least 210, got {s_max}")));
    }
    let units = s_max.ceil() as usize;
    let n = (1.0 / step).ceil() as usize;
    let h = 1.0 / n as f64;
    let len = (units - 2) * n + 1;

    let mut upper = vec![0.0; len];
    let mut lower = vec![0.0; len];

    // Seeds: F on [2, 3], f on [2, 4].
    for (i, u) in upper.iter_mut().enumerate().take(n + 1) {
        let s = GRID_START + i as f64 * h;
        *u = 2.0 * EXP_GAMMA / s;
    }
    for (i, l) in lower.iter_mut().enumerate().take(2 * n + 1) {
        let s = GRID_START + i as f64 * h;
        *l = 2.0 * EXP_GAMMA * (s - 1.0).ln() / s;
    }

    // Running s*F and s*f from the panel starts of the integrated regions.
    let mut phi_upper = 2.0 * EXP_GAMMA; // 3 * F(3)
    let mut phi_lower = 2.0 * EXP_GAMMA * 3f64.ln(); // 4 * f(4)

    for k in 3..units {
        let dlo = (k - 3) * n;
        let dhi = (k - 2) * n;
        for j in 0..n {
            let i = (k - 2) * n + j;
            let s = k as f64 + j as f64 * h;
            let g0 = lower[i - n];
            let gm = cubic_confined(&lower, dlo, dhi, (i - n) as f64 + 0.5);
            let g1 = lower[i + 1 - n];
            phi_upper += h / 6.0 * (g0 + 4.0 * gm + g1);
            upper[i + 1] = phi_upper / (s + h);
        }
        if k >= 4 {
            for j in 0..n {
                let i = (k - 2) * n + j;
                let s = k as f64 + j as f64 * h;
                let g0 = upper[i - n];
                let gm = cubic_confined(&upper, dlo, dhi, (i - n) as f64 + 0.5);
                let g1 = upper[i + 1 - n];
                phi_lower += h / 6.0 * (g0 + 4.0 * gm + g1);
                lower[i + 1] = phi_lower / (s + h);
            }
        }
    }

    // Locate the cutoff and clamp everything beyond it to exactly 1.
    let mut cutoff_idx = None;
    for i in 2 * n..len {
        if upper[i] - lower[i] < CUTOFF_TOL {
            cutoff_idx = Some(i);
            break;
        }
    }
    let Some(ci) = cutoff_idx else {
        return Err(crate::error::Error::Domain(
            "upper and lower tables failed to meet below tolerance".into(),
        ));
    };
    let cutoff = GRID_START + ci as f64 * h;
    let cutoff_err = upper[ci] - lower[ci];
    for i in ci..len {
        upper[i] = 1.0;
        lower[i] = 1.0;
    }

    Ok(SieveFnTable {
        s_max: units as f64,
        step: h,
        upper_values: upper,
        lower_values: lower,
        cutoff,
        cutoff_err,
    })
}

impl SieveFnTable {
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn cutoff_err(&self) -> f64 {
        self.cutoff_err
    }

    pub fn upper_values(&self) -> &[f64] {
        &self.upper_values
    }

    pub fn lower_values(&self) -> &[f64] {
        &self.lower_values
    }

    fn steps_per_unit(&self) -> usize {
        (1.0 / self.step).round() as usize
    }

    /// The upper bound function F. Domain error for s <= 0.
    pub fn upper(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(domain(format!("F requires s > 0, got {s}")));
        }
        Ok(self.upper_inner(s))
    }

    fn upper_inner(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0);
        if s <= 3.0 {
            return 2.0 * EXP_GAMMA / s;
        }
        if s >= self.cutoff {
            return 1.0;
        }
        self.interp(&self.upper_values, s)
    }

    /// The lower bound function f; zero for s <= 2.
    pub fn lower(&self, s: f64) -> f64 {
        if s <= 2.0 {
            return 0.0;
        }
        if s <= 4.0 {
            return 2.0 * EXP_GAMMA * (s - 1.0).ln() / s;
        }
        if s >= self.cutoff {
            return 1.0;
        }
        self.interp(&self.lower_values, s)
    }

    fn interp(&self, values: &[f64], s: f64) -> f64 {
        let n = self.steps_per_unit();
        let units = self.s_max as usize;
        let panel = (s.floor() as usize).min(units - 1);
        let lo = (panel - 2) * n;
        let hi = (panel - 1) * n;
        cubic_confined(values, lo, hi, (s - GRID_START) / self.step)
    }

    /// Constrained infimum of F(s1) * F(s2) over s1/sigma1 + s2/sigma2 = 1
    /// with both s_i >= 1.
    pub fn upper2(&self, sigma1: f64, sigma2: f64) -> Result<f64> {
        if !(sigma1 > 0.0 && sigma2 > 0.0) || 1.0 / sigma1 + 1.0 / sigma2 > 1.0 {
            return Err(domain(format!(
                "empty constraint set: requires 1/sigma1 + 1/sigma2 <= 1, got sigma1={sigma1} sigma2={sigma2}"
            )));
        }
        let hi = sigma1 * (1.0 - 1.0 / sigma2);
        let obj = |s1: f64| {
            let s2 = (sigma2 * (1.0 - s1 / sigma1)).max(1.0);
            self.upper_inner(s1) * self.upper_inner(s2)
        };
        Ok(line_minimum(1.0, hi, &obj))
    }

    /// Constrained supremum of f(s1)F(s2) + f(s2)F(s1) - F(s1)F(s2) over
    /// s1/sigma1 + s2/sigma2 = 1 with both s_i >= 2.
    pub fn lower2(&self, sigma1: f64, sigma2: f64) -> Result<f64> {
        if !(sigma1 > 0.0 && sigma2 > 0.0) || 2.0 / sigma1 + 2.0 / sigma2 > 1.0 {
            return Err(domain(format!(
                "empty constraint set: requires 2/sigma1 + 2/sigma2 <= 1, got sigma1={sigma1} sigma2={sigma2}"
            )));
        }
        let hi = sigma1 * (1.0 - 2.0 / sigma2);
        let neg_obj = |s1: f64| {
            let s2 = (sigma2 * (1.0 - s1 / sigma1)).max(2.0);
            let f1 = self.lower(s1);
            let f2 = self.lower(s2);
            let u1 = self.upper_inner(s1);
            let u2 = self.upper_inner(s2);
            -(f1 * u2 + f2 * u1 - u1 * u2)
        };
        Ok(-line_minimum(2.0, hi, &neg_obj))
    }
}

/// Coarse scan over a fixed grid followed by golden-section refinement
/// around the best cell. Ties in the scan keep the smallest abscissa.
fn line_minimum(lo: f64, hi: f64, obj: &impl Fn(f64) -> f64) -> f64 {
    if hi <= lo {
        return obj(lo);
    }
    let m = COARSE_GRID;
    let span = hi - lo;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..=m {
        let x = lo + span * i as f64 / m as f64;
        let v = obj(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + span * best_i.saturating_sub(1) as f64 / m as f64;
    let b = (lo + span * (best_i + 1) as f64 / m as f64).min(hi);
    let (_, refined) = golden_section_min(obj, a, b);
    best_v.min(refined)
}

fn golden_section_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const RESP: f64 = 0.381_966_011_250_105_1; // 2 - phi
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if (b - a).abs() < 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn table() -> &'static SieveFnTable {
        static T: OnceLock<SieveFnTable> = OnceLock::new();
        T.get_or_init(|| build_sievefn_table(210.0, 1.0 / 256.0).unwrap())
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_sievefn_table(100.0, 1.0 / 256.0).is_err());
        assert!(build_sievefn_table(210.0, 0.0).is_err());
        assert!(build_sievefn_table(210.0, 0.5).is_err());
    }

    #[test]
    fn seed_values() {
        let t = table();
        assert_abs_diff_eq!(t.upper(2.0).unwrap(), EXP_GAMMA, epsilon = 1e-14);
        assert_eq!(t.lower(2.0), 0.0);
        assert_eq!(t.lower(1.0), 0.0);
        // Independent arithmetic for the seed formula at s = 4.
        let f4 = 0.5 * EXP_GAMMA * 3f64.ln();
        assert_abs_diff_eq!(t.lower(4.0), f4, epsilon = 1e-14);
        assert_abs_diff_eq!(t.upper(3.0).unwrap() * 3.0 / (2.0 * EXP_GAMMA), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn seed_identities_on_grid() {
        let t = table();
        let mut s = 0.05;
        while s <= 3.0 {
            assert!((t.upper(s).unwrap() - 2.0 * EXP_GAMMA / s).abs() < 1e-10);
            s += 0.05;
        }
        let mut s = 2.0;
        while s <= 4.0 {
            assert!((t.lower(s) - 2.0 * EXP_GAMMA * (s - 1.0).ln() / s).abs() < 1e-10);
            s += 0.05;
        }
    }

    #[test]
    fn domain_error_below_zero() {
        assert!(table().upper(0.0).is_err());
        assert!(table().upper(-2.0).is_err());
    }

    #[test]
    fn cutoff_certifies_tail() {
        let t = table();
        assert!(t.cutoff_err() < 1e-9);
        assert!(t.cutoff() < 30.0, "cutoff unexpectedly late: {}", t.cutoff());
        assert_eq!(t.upper(205.0).unwrap(), 1.0);
        assert_eq!(t.lower(205.0), 1.0);
        assert_eq!(t.upper(1e6).unwrap(), 1.0);
    }

    #[test]
    fn monotone_and_sandwiched_on_grid() {
        let t = table();
        let up = t.upper_values();
        let lo = t.lower_values();
        for i in 0..up.len() {
            assert!(lo[i] <= 1.0 + 1e-12, "f > 1 at index {i}");
            assert!(up[i] >= 1.0 - 1e-12, "F < 1 at index {i}");
            if i > 0 {
                assert!(up[i] <= up[i - 1] + 1e-13, "F increased at index {i}");
                assert!(lo[i] >= lo[i - 1] - 1e-13, "f decreased at index {i}");
            }
        }
    }

    #[test]
    fn delay_residuals_small() {
        // Five-point derivative of s*F(s) against f(s-1), avoiding stencils
        // that straddle integer junctions or the cutoff clamp.
        let t = table();
        let n = t.steps_per_unit();
        let h = t.step();
        let phi_u: Vec<f64> = t
            .upper_values()
            .iter()
            .enumerate()
            .map(|(i, v)| (GRID_START + i as f64 * h) * v)
            .collect();
        let phi_l: Vec<f64> = t
            .lower_values()
            .iter()
            .enumerate()
            .map(|(i, v)| (GRID_START + i as f64 * h) * v)
            .collect();
        let deriv = |phi: &[f64], i: usize| {
            (-phi[i + 2] + 8.0 * phi[i + 1] - 8.0 * phi[i - 1] + phi[i - 2]) / (12.0 * h)
        };
        let last = ((t.cutoff() - GRID_START) / h) as usize - 2;
        let mut checked = 0usize;
        for i in (n + 2)..last {
            let offset = i % n;
            if offset < 2 || offset > n - 2 {
                continue;
            }
            let s = GRID_START + i as f64 * h;
            if s > 3.0 {
                let r = (deriv(&phi_u, i) - t.lower(s - 1.0)).abs();
                assert!(r < 1e-7, "upper residual {r} at s={s}");
            }
            let r = (deriv(&phi_l, i) - t.upper(s - 1.0).unwrap()).abs();
            assert!(r < 1e-7, "lower residual {r} at s={s}");
            checked += 1;
        }
        assert!(checked > 1000);
    }

    #[test]
    fn two_variable_degenerate_points() {
        let t = table();
        // sigma1 = sigma2 = 2 pins s1 = s2 = 1.
        let v = t.upper2(2.0, 2.0).unwrap();
        assert_abs_diff_eq!(v, (2.0 * EXP_GAMMA) * (2.0 * EXP_GAMMA), epsilon = 1e-10);
        // sigma1 = sigma2 = 4 pins s1 = s2 = 2 where f vanishes.
        let w = t.lower2(4.0, 4.0).unwrap();
        assert_abs_diff_eq!(w, -EXP_GAMMA * EXP_GAMMA, epsilon = 1e-10);
    }

    #[test]
    fn two_variable_empty_constraint_sets() {
        let t = table();
        assert!(t.upper2(1.5, 2.0).is_err());
        assert!(t.lower2(3.0, 5.0).is_err());
        assert!(t.upper2(-1.0, 5.0).is_err());
    }

    #[test]
    fn two_variable_limits_at_infinity() {
        let t = table();
        assert_abs_diff_eq!(t.upper2(50.0, 50.0).unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(t.lower2(50.0, 50.0).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn lower2_never_exceeds_upper2() {
        let t = table();
        for &(a, b) in &[(5.5, 205.0), (6.0, 12.0), (10.0, 10.0), (4.5, 80.0)] {
            assert!(t.lower2(a, b).unwrap() <= t.upper2(a, b).unwrap());
        }
    }

    #[test]
    fn grid_convergence_on_step_halving() {
        let coarse = build_sievefn_table(210.0, 1.0 / 64.0).unwrap();
        let fine = build_sievefn_table(210.0, 1.0 / 128.0).unwrap();
        // Bounded by the coarse table's own fourth-order error scale.
        for &s in &[3.5, 4.5, 5.25, 6.0, 7.75, 9.5] {
            assert!((coarse.upper(s).unwrap() - fine.upper(s).unwrap()).abs() < 1e-7);
            assert!((coarse.lower(s) - fine.lower(s)).abs() < 1e-7);
        }
    }
}
