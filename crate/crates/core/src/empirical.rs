//! Desk-scale verification: a segmented least-prime-factor sieve with
//! prime-factor counts, triple counting against the Hardy-Littlewood
//! prediction, and an exact integer check of the vector-sieve inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{hl_constant, DEFAULT_P_LIMIT};
use crate::error::{domain, Result};
use crate::primes::{isqrt, simple_sieve};

/// Default cap on a single sieve segment, in table entries.
pub const DEFAULT_SEGMENT_BUDGET: u64 = 1 << 26;

/// Internal streaming segment used by the counters.
const STREAM_SEGMENT: u64 = 1 << 22;

/// Upper bound for integers drawn by the vector-sieve property check.
pub const VS_TRIAL_BOUND: u64 = 1_000_000;

/// Factorization table over `[lo, hi)`: prime-factor counts with
/// multiplicity and least prime factors.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    lo: u64,
    hi: u64,
    omega: Vec<u8>,
    least_factor: Vec<u32>,
}

pub fn build_factor_sieve(lo: u64, hi: u64) -> Result<FactorSieve> {
    build_factor_sieve_with_budget(lo, hi, DEFAULT_SEGMENT_BUDGET)
}

pub fn build_factor_sieve_with_budget(lo: u64, hi: u64, budget: u64) -> Result<FactorSieve> {
    if !(2 <= lo && lo < hi) {
        return Err(domain(format!("requires 2 <= lo < hi, got [{lo}, {hi})")));
    }
    let len = hi - lo;
    if len > budget {
        let parts = len.div_ceil(budget);
        return Err(domain(format!(
            "interval of length {len} exceeds the segment budget {budget}; \
             split into {parts} segments of at most {budget}"
        )));
    }
    if hi - 1 > u32::MAX as u64 {
        return Err(domain(format!(
            "least-factor storage holds 32-bit entries; hi must be at most {}, got {hi}",
            u32::MAX as u64 + 1
        )));
    }

    let len = len as usize;
    let mut omega = vec![0u8; len];
    let mut least = vec![0u32; len];
    let mut rem: Vec<u64> = (lo..hi).collect();

    for p in simple_sieve(isqrt(hi - 1)) {
        let mut m = lo.div_ceil(p) * p;
        if m < p * 2 {
            m = p; // p itself may sit in the interval
        }
        while m < hi {
            let i = (m - lo) as usize;
            if least[i] == 0 {
                least[i] = p as u32;
            }
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
                omega[i] += 1;
            }
            m += p;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            omega[i] += 1;
            if least[i] == 0 {
                least[i] = rem[i] as u32; // prime: least factor is itself
            }
        }
    }
    Ok(FactorSieve {
        lo,
        hi,
        omega,
        least_factor: least,
    })
}

impl FactorSieve {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Prime factors of `n` counted with multiplicity.
    pub fn omega_big(&self, n: u64) -> u8 {
        assert!(self.lo <= n && n < self.hi, "n = {n} outside segment");
        self.omega[(n - self.lo) as usize]
    }

    pub fn least_factor(&self, n: u64) -> u64 {
        assert!(self.lo <= n && n < self.hi, "n = {n} outside segment");
        self.least_factor[(n - self.lo) as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.omega_big(n) == 1
    }
}

/// Counting result for one x.
#[derive(Debug, Clone, Serialize)]
pub struct TripleCount {
    pub x: u64,
    pub r: u32,
    /// Primes p <= x with at most 2 prime factors in p+2 and at most r in p+6.
    pub count_chen: u64,
    /// Primes p <= x with p+2 and p+6 both prime.
    pub count_exact: u64,
    pub hl_prediction: f64,
}

fn segments(lo: u64, hi: u64, size: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a + size).min(hi);
        v.push((a, b));
        a = b;
    }
    v
}

fn count_segment(seg_lo: u64, seg_hi: u64, x: u64, r: u32) -> Result<(u64, u64)> {
    // Extend by 6 so p+2 and p+6 resolve inside one table.
    let sieve = build_factor_sieve_with_budget(seg_lo, (seg_hi + 6).min(x + 7), STREAM_SEGMENT + 8)?;
    let mut chen = 0;
    let mut exact = 0;
    for p in seg_lo..seg_hi.min(x + 1) {
        if sieve.omega_big(p) != 1 {
            continue;
        }
        let o2 = sieve.omega_big(p + 2);
        let o6 = sieve.omega_big(p + 6);
        if o2 <= 2 && o6 <= r as u8 {
            chen += 1;
        }
        if o2 == 1 && o6 == 1 {
            exact += 1;
        }
    }
    Ok((chen, exact))
}

/// Count the theorem's objects up to x, streaming over segments. The
/// Hardy-Littlewood prediction uses the default prime cutoff.
pub fn count_chen_triples(x: u64, r: u32) -> Result<TripleCount> {
    let (c, _) = hl_constant(DEFAULT_P_LIMIT)?;
    count_chen_triples_with_constant(x, r, c)
}

/// Same, with a precomputed Hardy-Littlewood constant.
pub fn count_chen_triples_with_constant(x: u64, r: u32, c: f64) -> Result<TripleCount> {
    if x < 10 {
        return Err(domain(format!("requires x >= 10, got {x}")));
    }
    if r < 1 {
        return Err(domain("requires r >= 1"));
    }
    let segs = segments(2, x + 1, STREAM_SEGMENT);
    let sums = segs
        .par_iter()
        .map(|&(a, b)| count_segment(a, b, x, r))
        .collect::<Result<Vec<_>>>()?;
    let (count_chen, count_exact) = sums
        .into_iter()
        .fold((0, 0), |(c0, e0), (c1, e1)| (c0 + c1, e0 + e1));
    let lx = (x as f64).ln();
    Ok(TripleCount {
        x,
        r,
        count_chen,
        count_exact,
        hl_prediction: c * x as f64 / (lx * lx * lx),
    })
}

/// The counted primes themselves, up to `cap` of them. Serial; meant for
/// spot checks and small x.
pub fn collect_chen_primes(x: u64, r: u32, cap: usize) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (a, b) in segments(2, x + 1, STREAM_SEGMENT) {
        let sieve = build_factor_sieve_with_budget(a, (b + 6).min(x + 7), STREAM_SEGMENT + 8)?;
        for p in a..b.min(x + 1) {
            if sieve.omega_big(p) == 1
                && sieve.omega_big(p + 2) <= 2
                && sieve.omega_big(p + 6) <= r as u8
            {
                out.push(p);
                if out.len() >= cap {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// One row of the density table.
#[derive(Debug, Clone, Serialize)]
pub struct DensityRow {
    pub x: u64,
    pub exact: u64,
    pub chen: u64,
    pub prediction: f64,
    pub ratio: f64,
    /// Below x = 100 the asymptotic regime has not begun; the ratio is
    /// reported but flagged unreliable.
    pub reliable: bool,
}

/// Exact and almost-prime counts against the predicted density for each x.
pub fn density_report(x_list: &[u64], r: u32) -> Result<Vec<DensityRow>> {
    if x_list.is_empty() {
        return Err(domain("x list must be nonempty"));
    }
    if x_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("x list must be strictly increasing"));
    }
    let (c, _) = hl_constant(DEFAULT_P_LIMIT)?;
    x_list
        .iter()
        .map(|&x| {
            let t = count_chen_triples_with_constant(x, r, c)?;
            Ok(DensityRow {
                x,
                exact: t.count_exact,
                chen: t.count_chen,
                prediction: t.hl_prediction,
                ratio: t.count_exact as f64 / t.hl_prediction,
                reliable: x >= 100,
            })
        })
        .collect()
}

/// CSV document for a density report: integers unformatted, reals at ten
/// significant digits.
pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("x,exact,chen,prediction,ratio\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.9e},{:.9e}\n",
            row.x, row.exact, row.chen, row.prediction, row.ratio
        ));
    }
    out
}

/// Configuration of the vector-sieve inequality check. The truncated
/// Moebius coefficients keep mu(d) for squarefree d composed of primes
/// below z with at most 2*level factors (upper) or 2*level - 1 (lower),
/// additionally capped at d_plus / d_minus.
#[derive(Debug, Clone, Serialize)]
pub struct VsCheckConfig {
    pub z: u64,
    pub d_plus: u64,
    pub d_minus: u64,
    pub level: u32,
    pub trials: u64,
    pub seed: u64,
}

impl Default for VsCheckConfig {
    fn default() -> Self {
        Self {
            z: 30,
            d_plus: VS_TRIAL_BOUND,
            d_minus: VS_TRIAL_BOUND,
            level: 2,
            trials: 100_000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VsViolation {
    pub trial: u64,
    pub m: u64,
    pub n: u64,
    pub inequality: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct VsCheckReport {
    pub config: VsCheckConfig,
    pub generator: &'static str,
    pub checked: u64,
    pub violations: Vec<VsViolation>,
}

/// Sifting indicator and its truncated upper/lower companions for one
/// integer: delta is 1 exactly when no prime below z divides v, and the
/// companions are the Bonferroni-style truncations of the same divisor sum.
/// All sums are exact integer arithmetic.
pub fn sieve_deltas(v: u64, z_primes: &[u64], d_plus: u64, d_minus: u64, level: u32) -> (i64, i64, i64) {
    let kernel: Vec<u64> = z_primes.iter().copied().filter(|p| v.is_multiple_of(*p)).collect();
    let delta = i64::from(kernel.is_empty());
    let kmax = 2 * level as usize;
    let mut dp = 0i64;
    let mut dm = 0i64;
    for mask in 0u32..(1 << kernel.len()) {
        let bits = mask.count_ones() as usize;
        if bits > kmax {
            continue;
        }
        let mut d = 1u64;
        for (i, p) in kernel.iter().enumerate() {
            if mask >> i & 1 != 0 {
                d *= p;
            }
        }
        let sign = if bits.is_multiple_of(2) { 1 } else { -1 };
        if d <= d_plus {
            dp += sign;
        }
        if bits < kmax && d <= d_minus {
            dm += sign;
        }
    }
    (delta, dp, dm)
}

fn draw(rng: &mut ChaCha8Rng, rough: bool, z_primes: &[u64]) -> u64 {
    loop {
        let v = rng.random_range(1..VS_TRIAL_BOUND);
        if !rough || z_primes.iter().all(|p| !v.is_multiple_of(*p)) {
            return v;
        }
    }
}

/// Run the seeded trials. Bracketing failures reject the coefficient set
/// outright (they would falsify the construction, not the inequalities);
/// inequality violations are collected in the report.
pub fn vector_sieve_check(cfg: &VsCheckConfig) -> Result<VsCheckReport> {
    if cfg.z < 2 {
        return Err(domain(format!("requires z >= 2, got {}", cfg.z)));
    }
    if cfg.level < 1 {
        return Err(domain("requires level >= 1"));
    }
    let z_primes: Vec<u64> = simple_sieve(cfg.z.saturating_sub(1));

    let results: Vec<Result<Option<VsViolation>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            // Independent stream per trial keeps the run order-free.
            let mut rng =
                ChaCha8Rng::seed_from_u64(cfg.seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let m = draw(&mut rng, trial % 2 == 0, &z_primes);
            let n = draw(&mut rng, (trial / 2) % 2 == 0, &z_primes);
            let (d1, d1p, d1m) = sieve_deltas(m, &z_primes, cfg.d_plus, cfg.d_minus, cfg.level);
            let (d2, d2p, d2m) = sieve_deltas(n, &z_primes, cfg.d_plus, cfg.d_minus, cfg.level);
            if !(d1m <= d1 && d1 <= d1p) {
                return Err(domain(format!(
                    "coefficients violate the bracketing at integer {m}"
                )));
            }
            if !(d2m <= d2 && d2 <= d2p) {
                return Err(domain(format!(
                    "coefficients violate the bracketing at integer {n}"
                )));
            }
            if d1 * d2 > d1p * d2p {
                return Ok(Some(VsViolation {
                    trial,
                    m,
                    n,
                    inequality: "upper",
                }));
            }
            if d1 * d2 < d1m * d2p + d1p * d2m - d1p * d2p {
                return Ok(Some(VsViolation {
                    trial,
                    m,
                    n,
                    inequality: "lower",
                }));
            }
            Ok(None)
        })
        .collect();

    let mut violations = Vec::new();
    for r in results {
        if let Some(v) = r? {
            violations.push(v);
        }
    }
    violations.sort_by_key(|v| v.trial);
    Ok(VsCheckReport {
        config: cfg.clone(),
        generator: "ChaCha8Rng",
        checked: cfg.trials,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega_oracle(mut n: u64) -> u32 {
        let mut count = 0;
        let mut d = 2;
        while d * d <= n {
            while n.is_multiple_of(d) {
                n /= d;
                count += 1;
            }
            d += 1;
        }
        if n > 1 {
            count += 1;
        }
        count
    }

    #[test]
    fn factor_sieve_basics() {
        let s = build_factor_sieve(2, 2000).unwrap();
        assert_eq!(s.omega_big(12), 3);
        assert_eq!(s.omega_big(97), 1);
        assert_eq!(s.omega_big(1024), 10);
        assert_eq!(s.least_factor(97), 97);
        assert_eq!(s.least_factor(91), 7);
        for n in 2..2000 {
            assert_eq!(s.omega_big(n) as u32, omega_oracle(n), "omega({n})");
            let lf = s.least_factor(n);
            assert!(n % lf == 0);
            if s.omega_big(n) > 1 {
                assert_eq!(s.omega_big(n), s.omega_big(n / lf) + 1, "chain at {n}");
            }
        }
    }

    #[test]
    fn factor_sieve_rejects_bad_ranges() {
        assert!(build_factor_sieve(1, 10).is_err());
        assert!(build_factor_sieve(10, 10).is_err());
        let err = build_factor_sieve_with_budget(2, 1000, 100)
            .unwrap_err()
            .to_string();
        assert!(err.contains("split into 10 segments"), "{err}");
    }

    #[test]
    fn segmented_matches_monolithic() {
        let whole = build_factor_sieve(2, 100_001).unwrap();
        for (a, b) in [(2u64, 40_000u64), (40_000, 80_000), (80_000, 100_001)] {
            let seg = build_factor_sieve(a, b).unwrap();
            for n in a..b {
                assert_eq!(seg.omega_big(n), whole.omega_big(n), "omega at {n}");
                assert_eq!(seg.least_factor(n), whole.least_factor(n), "lf at {n}");
            }
        }
    }

    #[test]
    fn chen_count_small_oracle() {
        // Direct factorization of p+2 and p+6 over the eight primes <= 20.
        let mut expected = 0;
        let s = build_factor_sieve(2, 30).unwrap();
        for p in 2..=20u64 {
            if s.omega_big(p) == 1 && omega_oracle(p + 2) <= 2 && omega_oracle(p + 6) <= 3 {
                expected += 1;
            }
        }
        assert_eq!(expected, 8);
        let t = count_chen_triples_with_constant(20, 3, 2.86).unwrap();
        assert_eq!(t.count_chen, 8);
    }

    #[test]
    fn exact_count_to_100() {
        let t = count_chen_triples_with_constant(100, 1, 2.86).unwrap();
        assert_eq!(t.count_exact, 4); // p = 5, 11, 17, 41
        assert!(t.count_exact <= t.count_chen);
    }

    #[test]
    fn counts_monotone_in_r_and_x() {
        let a = count_chen_triples_with_constant(500, 2, 2.86).unwrap();
        let b = count_chen_triples_with_constant(500, 3, 2.86).unwrap();
        let c = count_chen_triples_with_constant(1000, 2, 2.86).unwrap();
        assert!(a.count_chen <= b.count_chen);
        assert!(a.count_chen <= c.count_chen);
    }

    #[test]
    fn counted_primes_reverify_by_trial_division() {
        let ps = collect_chen_primes(5000, 4, 10_000).unwrap();
        assert!(!ps.is_empty());
        for &p in &ps {
            assert_eq!(omega_oracle(p), 1);
            assert!(omega_oracle(p + 2) <= 2);
            assert!(omega_oracle(p + 6) <= 4);
        }
    }

    #[test]
    fn density_rows_flag_small_x() {
        let rows = density_report(&[50, 1000], 2).unwrap();
        assert!(!rows[0].reliable);
        assert!(rows[1].reliable);
        assert!(rows.iter().all(|r| r.ratio > 0.0));
        let csv = density_csv(&rows);
        assert!(csv.starts_with("x,exact,chen,prediction,ratio\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn density_rejects_unsorted() {
        assert!(density_report(&[1000, 1000], 2).is_err());
        assert!(density_report(&[], 2).is_err());
    }

    #[test]
    fn deltas_hand_expansion() {
        // m = 2, n = 3, z = 5, level 1: kernels are {2} and {3}, so all
        // four truncated sums collapse to 1 - 1 = 0 and both inequalities
        // hold with equality.
        let zp = simple_sieve(4); // primes below 5
        let (d, dp, dm) = sieve_deltas(2, &zp, 1_000_000, 1_000_000, 1);
        assert_eq!((d, dp, dm), (0, 0, 0));
        let (d, dp, dm) = sieve_deltas(3, &zp, 1_000_000, 1_000_000, 1);
        assert_eq!((d, dp, dm), (0, 0, 0));
        // m = n = 1: empty products, everything is 1.
        let (d, dp, dm) = sieve_deltas(1, &zp, 1_000_000, 1_000_000, 1);
        assert_eq!((d, dp, dm), (1, 1, 1));
    }

    #[test]
    fn deltas_bonferroni_direction() {
        // 30 = 2*3*5: delta = 0; truncation at level 1 gives
        // upper: 1 - 3 + 3 = 1 >= 0, lower: 1 - 3 = -2 <= 0.
        let zp = simple_sieve(9);
        let (d, dp, dm) = sieve_deltas(30, &zp, 1_000_000, 1_000_000, 1);
        assert_eq!(d, 0);
        assert_eq!(dp, 1);
        assert_eq!(dm, -2);
    }

    #[test]
    fn vector_sieve_small_run_clean() {
        let cfg = VsCheckConfig {
            z: 10,
            trials: 2000,
            ..VsCheckConfig::default()
        };
        let report = vector_sieve_check(&cfg).unwrap();
        assert_eq!(report.checked, 2000);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn vector_sieve_rejects_broken_bracketing() {
        // d_minus = 1 keeps only the empty divisor, so delta- = 1 exceeds
        // delta = 0 at any integer with a small prime factor.
        let cfg = VsCheckConfig {
            z: 10,
            d_minus: 1,
            trials: 500,
            ..VsCheckConfig::default()
        };
        let err = vector_sieve_check(&cfg).unwrap_err().to_string();
        assert!(err.contains("bracketing"), "{err}");
    }

    #[test]
    fn vector_sieve_deterministic() {
        let cfg = VsCheckConfig {
            z: 30,
            trials: 500,
            ..VsCheckConfig::default()
        };
        let a = vector_sieve_check(&cfg).unwrap();
        let b = vector_sieve_check(&cfg).unwrap();
        assert_eq!(a.checked, b.checked);
        assert_eq!(a.violations.len(), b.violations.len());
    }
}
