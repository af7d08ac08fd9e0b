use proptest::prelude::*;

use tdgn_core::bethe::{enumerate_ground_quantum_numbers, solve_log_bethe, BetheSector};
use tdgn_core::gamma::log_gamma;
use tdgn_core::scattering::*;
use tdgn_core::spin::*;
use tdgn_core::thermo::{closed_form_density, kernel, spinon_tail};
use tdgn_core::yang_baxter::{check_yb_mixed, check_yb_same};
use tdgn_core::{c64, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_matrix_unitarity(l in -20.0..20.0f64, eta in 0.05..5.0f64) {
        prop_assume!(l.abs() > 1e-3);
        let a = r_matrix(c64(l, 0.0), c64(eta, 0.0)).unwrap();
        let b = r_matrix(c64(-l, 0.0), c64(eta, 0.0)).unwrap();
        prop_assert!(op4_max_diff(&op4_mul(&a, &b), &identity4()) <= 1e-12);
        prop_assert!(op4_to_cmat(&a).unitarity_defect() <= 1e-12);
    }

    #[test]
    fn printed_and_crossing_forms_agree(l in -10.0..10.0f64, alpha in 0.1..10.0f64) {
        let p = build_r_matrix(c64(l, 0.0), alpha).unwrap();
        let c = r_matrix(c64(l, 0.0), c64(1.0 / alpha, 0.0)).unwrap();
        prop_assert!(op4_max_diff(&p, &c) <= 1e-13);
    }

    #[test]
    fn phase_has_unit_modulus(c in -50.0..50.0f64) {
        prop_assert!((phase_of_c(c).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mixed_s_matrix_unitary(z in -5.0..5.0f64, zb in -5.0..5.0f64, alpha in 0.1..3.0f64, beta in 0.1..4.0f64) {
        let m = CouplingModel::new(alpha, beta).unwrap();
        let s = build_s_lr(z, zb, &m).unwrap();
        prop_assert!(op4_to_cmat(&s).unitarity_defect() <= 1e-11);
    }

    #[test]
    fn c_of_g_round_trip(g in 0.01..1.15f64) {
        let c = c_of_g(g).unwrap();
        prop_assert!((invert_c(c).unwrap() - g).abs() <= 1e-10 * g.max(1.0));
        prop_assert!((positive_g_of_c(c) - g).abs() <= 1e-10);
    }

    #[test]
    fn disjoint_gates_commute(l1 in -3.0..3.0f64, l2 in -3.0..3.0f64) {
        let a = embed_two_site(&r_matrix(c64(l1, 0.1), c64(1.0, 0.0)).unwrap(), 0, 2, 4).unwrap();
        let b = embed_two_site(&r_matrix(c64(l2, -0.2), c64(1.0, 0.0)).unwrap(), 1, 3, 4).unwrap();
        prop_assert!(a.commutator_norm(&b) <= 1e-12);
    }

    #[test]
    fn yang_baxter_same_chirality(a in -4.0..4.0f64, b in -4.0..4.0f64, c in -4.0..4.0f64, alpha in 0.2..5.0f64) {
        prop_assert!(check_yb_same(a, b, c, alpha).unwrap().pass);
    }

    #[test]
    fn yang_baxter_mixed(z in -4.0..4.0f64, zb1 in -4.0..4.0f64, zb2 in -4.0..4.0f64) {
        let m = CouplingModel::new(0.7, 1.9).unwrap();
        prop_assert!(check_yb_mixed(z, zb1, zb2, &m).unwrap().pass);
    }

    #[test]
    fn density_is_even_and_positive(n in 2usize..400, b in 0.0..4.0f64, l in -10.0..10.0f64) {
        let r = closed_form_density(n, b, l);
        prop_assert!(r > 0.0);
        prop_assert_eq!(r, closed_form_density(n, b, -l));
    }

    #[test]
    fn kernel_is_even(x in -50.0..50.0f64, n in 0.1..3.0f64) {
        prop_assert_eq!(kernel(x, n), kernel(-x, n));
        prop_assert!(kernel(x, n) <= kernel(0.0, n));
    }

    #[test]
    fn spinon_tail_is_monotone(a in 0.0..50.0f64, d in 0.01..5.0f64) {
        let (t0, t1) = (spinon_tail(a), spinon_tail(a + d));
        prop_assert!(t1 < t0 && t1 > 0.0 && t0 <= 0.25 + 1e-15);
    }

    #[test]
    fn log_gamma_recurrence(re in -6.0..6.0f64, im in 0.05..6.0f64) {
        let z = c64(re, im);
        let lhs = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap()).exp();
        prop_assert!((lhs - z).norm() <= 1e-10 * z.norm().max(1.0));
    }

    #[test]
    fn conjugate_symmetry_of_log_gamma(re in 0.1..8.0f64, im in -6.0..6.0f64) {
        let z = c64(re, im);
        let a: C64 = log_gamma(z.conj()).unwrap();
        prop_assert!((a - log_gamma(z).unwrap().conj()).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ground_roots_are_odd_symmetric(half in 1usize..8, g in 0.1..1.1f64) {
        let q = enumerate_ground_quantum_numbers(half, half, half);
        let s = BetheSector::instantaneous(half, half, q, g).unwrap();
        let sol = solve_log_bethe(&s).unwrap();
        prop_assert!(sol.converged);
        let mut r = sol.roots.clone();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip(r.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-9);
        }
        prop_assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}
