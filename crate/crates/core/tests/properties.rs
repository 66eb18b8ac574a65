//! Property tests for the structural invariants of the tables and the
//! two-dimensional constant.

use std::sync::OnceLock;

use proptest::prelude::*;

use triplesieve::{
    build_rho_table, build_sievefn_table, BEvaluator, RhoTable, SieveFnTable,
};

fn rho_table() -> &'static RhoTable {
    static T: OnceLock<RhoTable> = OnceLock::new();
    T.get_or_init(|| build_rho_table(60.0, 1.0 / 128.0).unwrap())
}

fn sieve_table() -> &'static SieveFnTable {
    static T: OnceLock<SieveFnTable> = OnceLock::new();
    T.get_or_init(|| build_sievefn_table(210.0, 1.0 / 128.0).unwrap())
}

proptest! {
    #[test]
    fn rho_nonincreasing_beyond_one(a in 1.0f64..50.0, d in 0.0f64..10.0) {
        let t = rho_table();
        prop_assert!(t.rho(a + d) <= t.rho(a) + 1e-14);
    }

    #[test]
    fn rho_bounded_by_one(s in -5.0f64..55.0) {
        let t = rho_table();
        let v = t.rho(s);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn sandwich_everywhere(s in 0.01f64..200.0) {
        let t = sieve_table();
        let upper = t.upper(s).unwrap();
        let lower = t.lower(s);
        prop_assert!(lower <= 1.0 + 1e-12);
        prop_assert!(upper >= 1.0 - 1e-12);
        prop_assert!(lower <= upper + 1e-12);
    }

    #[test]
    fn lower2_below_upper2(sigma1 in 4.1f64..60.0, sigma2 in 4.1f64..300.0) {
        let t = sieve_table();
        let up = t.upper2(sigma1, sigma2).unwrap();
        let lo = t.lower2(sigma1, sigma2).unwrap();
        prop_assert!(lo <= up + 1e-9, "lo {lo} up {up}");
        prop_assert!(up >= 1.0 - 1e-9);
    }

    #[test]
    fn big_b_symmetric_and_above_one(s1 in 0.5f64..4.0, s2 in 0.5f64..4.0) {
        let ev = BEvaluator::new(rho_table());
        let a = ev.big_b(s1, s2).unwrap();
        let b = ev.big_b(s2, s1).unwrap();
        prop_assert!((a - b).abs() < 1e-7, "asym {a} vs {b}");
        prop_assert!(a > 1.0);
    }
}
