//! Dickman's function on a dense grid.
//!
//! The function is 0 for s <= 0, 1 on (0, 1], and continues for s > 1 as the
//! solution of the delay equation s * rho'(s) = -rho(s - 1). Construction
//! proceeds one unit interval at a time so the delayed argument always falls
//! in an interval that is already complete.
//!
//! Stepping the delay equation forward subtracts two nearly equal numbers
//! once the function starts its superexponential decay, which floors the
//! table at the accumulated absolute error and destroys the deep tail. The
//! builder therefore works with the equivalent averaging form
//! `s * rho(s) = integral of rho over [s - 1, s]`,
//! whose right side has only positive contributions: each panel is solved
//! by fixed-point iteration of that identity on the grid (the unknown panel
//! enters with weight (s - k)/s < 1/2, so the iteration contracts). All
//! quadrature is fourth order with stencils confined to single panels,
//! giving near-constant relative accuracy all the way into the tail.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::interp::{cubic_confined, cubic_step_integral, GL3};

/// Table values below this are clamped to zero. The true function is below
/// 1e-300 well before s = 250, so the clamp is invisible to every consumer.
pub const UNDERFLOW_CLAMP: f64 = 1e-300;

/// Coarsest grid spacing accepted by the builders.
pub const MAX_STEP: f64 = 1.0 / 64.0;

/// Dense grid of Dickman's function with a certified uniform error bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoTable {
    s_max: f64,
    step: f64,
    values: Vec<f64>,
    err_bound: f64,
}

/// Build the table on `[0, s_max]`.
///
/// `step` is normalized to `1/n` for integer `n >= 1/step` so that unit
/// panels land exactly on grid points, and `s_max` is rounded up to an
/// integer. The error bound is measured at build time by comparing against
/// a half-step construction (Richardson) plus the observed interpolation
/// defect at half-step points.
pub fn build_rho_table(s_max: f64, step: f64) -> Result<RhoTable> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(domain(format!("step must be in (0, 1/64], got {step}")));
    }
    if !(s_max >= 4.0) {
        return Err(domain(format!("s_max must be at least 4, got {s_max}")));
    }
    let units = s_max.ceil() as usize;
    let n = (1.0 / step).ceil() as usize;
    let values = integrate_panels(units, n);
    let fine = integrate_panels(units, 2 * n);

    let mut richardson: f64 = 0.0;
    for (i, v) in values.iter().enumerate() {
        richardson = richardson.max((v - fine[2 * i]).abs());
    }
    let mut interp_defect: f64 = 0.0;
    for k in 1..units {
        for j in 0..n {
            let i = k * n + j;
            let mid = cubic_confined(&values, k * n, (k + 1) * n, i as f64 + 0.5);
            interp_defect = interp_defect.max((mid - fine[2 * i + 1]).abs());
        }
    }
    let err_bound = richardson * 16.0 / 15.0 + interp_defect + 1e-15;

    Ok(RhoTable {
        s_max: units as f64,
        step: 1.0 / n as f64,
        values,
        err_bound,
    })
}

fn integrate_panels(units: usize, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut v = vec![0.0; units * n + 1];
    for x in v.iter_mut().take(n + 1) {
        *x = 1.0;
    }
    // Step integrals of the panel just completed; the base panel is
    // constant 1.
    let mut prev_steps = vec![h; n];
    let mut cur_steps = vec![0.0; n];

    for k in 1..units {
        let lo = k * n;
        let hi = (k + 1) * n;

        // A(j) = integral over [k - 1 + j*h, k], read off the previous panel.
        let mut suffix = vec![0.0; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] + prev_steps[j];
        }

        // Initial guess: one forward Simpson sweep of the delay form. Its
        // tail is only absolutely accurate, which is all a seed needs.
        for j in 0..n {
            let i = lo + j;
            let s = k as f64 + j as f64 * h;
            let g0 = v[i - n] / s;
            let rho_mid = cubic_confined(&v, lo - n, lo, (i - n) as f64 + 0.5);
            let gm = rho_mid / (s + 0.5 * h);
            let g1 = v[i + 1 - n] / (s + h);
            v[i + 1] = (v[i] - h / 6.0 * (g0 + 4.0 * gm + g1)).max(0.0);
        }

        // Fixed-point passes of s * rho(s) = A + integral over [k, s].
        for _ in 0..100 {
            for (j, cs) in cur_steps.iter_mut().enumerate() {
                *cs = h * cubic_step_integral(&v, lo, hi, lo + j);
            }
            let mut prefix = 0.0;
            let mut worst: f64 = 0.0;
            for j in 1..=n {
                prefix += cur_steps[j - 1];
                let s = k as f64 + j as f64 * h;
                let mut val = (suffix[j] + prefix) / s;
                if val < UNDERFLOW_CLAMP {
                    val = 0.0;
                }
                let old = v[lo + j];
                let scale = val.max(old).max(UNDERFLOW_CLAMP);
                worst = worst.max((val - old).abs() / scale);
                v[lo + j] = val;
            }
            if worst < 1e-15 {
                break;
            }
        }

        for (j, cs) in cur_steps.iter_mut().enumerate() {
            *cs = h * cubic_step_integral(&v, lo, hi, lo + j);
        }
        std::mem::swap(&mut prev_steps, &mut cur_steps);
    }
    v
}

impl RhoTable {
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn err_bound(&self) -> f64 {
        self.err_bound
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn steps_per_unit(&self) -> usize {
        (1.0 / self.step).round() as usize
    }

    /// Evaluate rho at any real s.
    ///
    /// Exact on s <= 1 by definition; 0 beyond the grid, which is sound
    /// because rho(250) < 1e-300 is far below every tolerance in this crate.
    pub fn rho(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s <= 1.0 {
            return 1.0;
        }
        if s > self.s_max {
            return 0.0;
        }
        self.interp(s).max(0.0)
    }

    fn interp(&self, s: f64) -> f64 {
        let n = self.steps_per_unit();
        let units = self.s_max as usize;
        let panel = (s.floor() as usize).min(units - 1);
        cubic_confined(&self.values, panel * n, (panel + 1) * n, s * n as f64)
    }

    /// Numerically integrate rho and u * rho over the whole grid.
    ///
    /// Both moments equal exp(gamma); truncation at s_max >= 40 is below
    /// 1e-40 by the factorial tail bound.
    pub fn moment_checks(&self) -> Result<(f64, f64)> {
        if self.s_max < 40.0 {
            return Err(domain(format!(
                "moment checks require s_max >= 40, table has {}",
                self.s_max
            )));
        }
        let h = self.step;
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for i in 0..self.values.len() - 1 {
            let a = i as f64 * h;
            let c = a + 0.5 * h;
            for (node, w) in GL3 {
                let u = c + 0.5 * h * node;
                let r = self.rho(u);
                m0 += w * r;
                m1 += w * u * r;
            }
        }
        Ok((m0 * 0.5 * h, m1 * 0.5 * h))
    }
}

/// Cumulative antiderivative of a rho table on its own grid, with O(1)
/// evaluation of the partial integral to any point. Built once per
/// evaluator because the two-dimensional constant calls it in its inner
/// loop thousands of times.
#[derive(Debug, Clone)]
pub(crate) struct RhoAntiderivative {
    step: f64,
    s_max: f64,
    cum: Vec<f64>,
}

impl RhoAntiderivative {
    pub fn new(table: &RhoTable) -> Self {
        let n = table.steps_per_unit();
        let units = table.s_max as usize;
        let values = table.values();
        let mut cum = vec![0.0; values.len()];
        for k in 0..units {
            let lo = k * n;
            let hi = (k + 1) * n;
            for j in lo..hi {
                cum[j + 1] = cum[j] + table.step * cubic_step_integral(values, lo, hi, j);
            }
        }
        Self {
            step: table.step,
            s_max: table.s_max,
            cum,
        }
    }

    /// Integral of rho from 0 to x (clamped to the grid).
    pub fn integral_to(&self, table: &RhoTable, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.s_max {
            return *self.cum.last().unwrap();
        }
        let xi = x / self.step;
        let j = (xi.floor() as usize).min(self.cum.len() - 2);
        let a = j as f64 * self.step;
        let mut partial = 0.0;
        let c = 0.5 * (a + x);
        let half = 0.5 * (x - a);
        for (node, w) in GL3 {
            partial += w * table.rho(c + half * node);
        }
        self.cum[j] + partial * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Fixed 8-point Gauss-Legendre rule, independent of everything the
    // table construction uses. Exact far beyond the smoothness of the
    // closed-form integrands below.
    fn gl8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        const N: [f64; 4] = [
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_2,
        ];
        const W: [f64; 4] = [
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut sum = 0.0;
        for i in 0..4 {
            sum += W[i] * (f(c + h * N[i]) + f(c - h * N[i]));
        }
        sum * h
    }

    fn gl8_composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| gl8(f, a + i as f64 * h, a + (i + 1) as f64 * h))
            .sum()
    }

    fn table() -> &'static RhoTable {
        use std::sync::OnceLock;
        static T: OnceLock<RhoTable> = OnceLock::new();
        T.get_or_init(|| build_rho_table(42.0, 1.0 / 256.0).unwrap())
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_rho_table(3.0, 1.0 / 256.0).is_err());
        assert!(build_rho_table(50.0, 0.0).is_err());
        assert!(build_rho_table(50.0, -0.1).is_err());
        assert!(build_rho_table(50.0, 0.1).is_err());
    }

    #[test]
    fn definition_region_is_exact() {
        let t = table();
        assert_eq!(t.rho(-1.0), 0.0);
        assert_eq!(t.rho(0.0), 0.0);
        assert_eq!(t.rho(0.5), 1.0);
        assert_eq!(t.rho(1.0), 1.0);
        assert_eq!(t.rho(1000.0), 0.0);
    }

    #[test]
    fn rho_2_matches_closed_form() {
        // One integration of the delay equation over [1, 2] gives 1 - ln s.
        let t = table();
        assert_abs_diff_eq!(t.rho(2.0), 1.0 - 2f64.ln(), epsilon = t.err_bound());
        assert!(t.err_bound() <= 1e-10, "err_bound = {}", t.err_bound());
    }

    #[test]
    fn closed_form_on_second_panel() {
        let t = table();
        for &s in &[1.25, 1.5, 1.75, 1.9999] {
            assert_abs_diff_eq!(t.rho(s), 1.0 - s.ln(), epsilon = t.err_bound());
        }
    }

    #[test]
    fn rho_2_5_matches_quadrature_oracle() {
        // On [2, 3]: rho(s) = rho(2) - integral of (1 - ln(t-1)) / t.
        let oracle = (1.0 - 2f64.ln())
            - gl8_composite(&|t: f64| (1.0 - (t - 1.0).ln()) / t, 2.0, 2.5, 8);
        assert_abs_diff_eq!(oracle, 0.130_319_561_8, epsilon = 1e-9);
        let t = table();
        assert_abs_diff_eq!(t.rho(2.5), oracle, epsilon = t.err_bound() + 1e-12);
    }

    #[test]
    fn rho_3_matches_quadrature_oracle() {
        let oracle =
            (1.0 - 2f64.ln()) - gl8_composite(&|t: f64| (1.0 - (t - 1.0).ln()) / t, 2.0, 3.0, 8);
        assert_abs_diff_eq!(oracle, 0.048_608_388_3, epsilon = 1e-9);
        let t = table();
        assert_abs_diff_eq!(t.rho(3.0), oracle, epsilon = t.err_bound() + 1e-12);
    }

    #[test]
    fn moments_equal_exp_gamma() {
        let t = table();
        let (m0, m1) = t.moment_checks().unwrap();
        let eg = crate::EXP_GAMMA;
        assert_abs_diff_eq!(m0, eg, epsilon = 1e-8);
        assert_abs_diff_eq!(m1, eg, epsilon = 1e-8);
    }

    #[test]
    fn moments_insensitive_to_truncation() {
        let t60 = build_rho_table(60.0, 1.0 / 256.0).unwrap();
        let (a0, a1) = table().moment_checks().unwrap();
        let (b0, b1) = t60.moment_checks().unwrap();
        assert!((a0 - b0).abs() < 1e-12);
        assert!((a1 - b1).abs() < 1e-12);
    }

    #[test]
    fn moment_checks_require_tall_table() {
        let t = build_rho_table(10.0, 1.0 / 64.0).unwrap();
        assert!(t.moment_checks().is_err());
    }

    #[test]
    fn factorial_bound_at_integers() {
        let t = table();
        let mut fact = 1.0f64;
        for n in 2..=20u32 {
            fact *= n as f64;
            assert!(
                t.rho(n as f64) <= 1.0 / fact,
                "rho({n}) = {} > 1/{n}!",
                t.rho(n as f64)
            );
        }
    }

    #[test]
    fn positive_and_nonincreasing() {
        let t = table();
        let n = t.steps_per_unit();
        let v = t.values();
        for (i, &x) in v.iter().enumerate() {
            assert!(x > 0.0, "rho grid value at index {i} not positive");
            if i > n {
                assert!(x <= v[i - 1], "not non-increasing at index {i}");
            }
        }
    }

    #[test]
    fn continuous_at_integer_junctions() {
        let t = table();
        for k in 1..6 {
            let s = k as f64;
            let eps = 1e-9;
            let left = t.rho(s - eps);
            let right = t.rho(s + eps);
            assert!((left - right).abs() < t.err_bound() + 1e-8);
        }
    }

    #[test]
    fn grid_convergence_on_step_halving() {
        let coarse = build_rho_table(8.0, 1.0 / 64.0).unwrap();
        let fine = build_rho_table(8.0, 1.0 / 128.0).unwrap();
        for (i, &v) in coarse.values().iter().enumerate() {
            assert!((v - fine.values()[2 * i]).abs() <= coarse.err_bound());
        }
    }

    #[test]
    fn antiderivative_matches_direct_quadrature() {
        let t = table();
        let anti = RhoAntiderivative::new(t);
        for &x in &[0.5, 1.0, 1.7, 2.5, 3.25, 10.0] {
            // Integrate panelwise so the oracle never crosses a kink.
            let mut direct = 0.0;
            let mut a = 0.0f64;
            while a < x {
                let b = (a + 1.0f64).min(x);
                direct += gl8_composite(&|u: f64| t.rho(u), a, b, 16);
                a = b;
            }
            let got = anti.integral_to(t, x);
            assert_abs_diff_eq!(got, direct, epsilon = 1e-9);
        }
        // Saturation beyond the grid.
        let full = anti.integral_to(t, 1e9);
        assert_abs_diff_eq!(full, crate::EXP_GAMMA, epsilon = 1e-8);
    }
}
