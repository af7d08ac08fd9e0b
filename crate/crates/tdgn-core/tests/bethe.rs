use tdgn_core::bethe::*;
use tdgn_core::eigen::eigenvalues;
use tdgn_core::scattering::{c_of_g, phase_factor};
use tdgn_core::spin::{Gauge, Monodromy, Ordering};
use tdgn_core::thermo::closed_form_density;
use tdgn_core::{c64, Error};

#[test]
fn two_particle_root_is_zero() {
    let s = BetheSector::instantaneous(1, 1, vec![0.0], 0.5).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    assert!(sol.converged);
    assert!(sol.roots[0].abs() <= 1e-12);
    let b = s.shift().unwrap();
    let ratio = |x: f64| c64(x, 0.5) / c64(x, -0.5);
    let product = ratio(-b) * ratio(b);
    assert!((product - c64(1.0, 0.0)).norm() <= 1e-12);
}

#[test]
fn empty_sector_is_trivial() {
    let s = BetheSector::instantaneous(2, 2, vec![], 0.4).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    assert!(sol.converged && sol.roots.is_empty() && sol.iterations == 0);
}

#[test]
fn invalid_sectors_are_rejected() {
    assert!(BetheSector::instantaneous(1, 1, vec![0.0, 0.0], 0.5).is_err());
    assert!(BetheSector::instantaneous(2, 2, vec![0.5], 0.5).is_err());
    assert!(BetheSector::instantaneous(2, 2, vec![0.5, 0.5], 0.5).is_err());
    assert!(BetheSector::instantaneous(2, 2, vec![3.0], 0.5).is_err());
    assert!(BetheSector::instantaneous(1, 1, vec![0.0], -0.5).is_err());
}

#[test]
fn ground_quantum_numbers() {
    assert_eq!(enumerate_ground_quantum_numbers(3, 3, 3), vec![-1.0, 0.0, 1.0]);
    assert_eq!(enumerate_ground_quantum_numbers(2, 2, 2), vec![-0.5, 0.5]);
    for (nl, nr, m) in [(2, 2, 2), (3, 3, 3), (25, 25, 25), (2, 3, 2), (3, 4, 3)] {
        check_quantum_numbers(nl + nr, &enumerate_ground_quantum_numbers(nl, nr, m)).unwrap();
    }
}

#[test]
fn holes_drop_slots() {
    let q = quantum_numbers_with_holes(8, 3, &[1, 3]).unwrap();
    assert_eq!(q.len(), 3);
    assert_eq!(q, vec![-2.0, 0.0, 2.0]);
    let single = quantum_numbers_with_holes(4, 1, &[0, 1]).unwrap();
    assert_eq!(single, vec![1.0]);
    assert!(quantum_numbers_with_holes(8, 3, &[1]).is_err());
}

#[test]
fn transfer_matrix_is_trace_of_unitary_monodromy() {
    let (nl, nr, g) = (2, 2, 0.6);
    let b = c_of_g(g).unwrap() / 2.0;
    let sites = vec![c64(-b, 0.0), c64(-b, 0.0), c64(b, 0.0), c64(b, 0.0)];
    let mono = Monodromy::new(sites.clone(), c64(1.0, 0.0), Ordering::Ascending, Gauge::Unitary);
    for (j, &site) in sites.iter().enumerate().skip(nl) {
        let z = transfer_gates(g, j, nl, nr).unwrap().to_operator();
        let t = mono.transfer(site).unwrap();
        let scaled = z.mat.scale(1.0 / phase_factor(g).powi(nl as i32));
        assert!(scaled.sub(&t.mat).max_norm() <= 1e-13);
    }
}

#[test]
fn two_particle_eigenvector() {
    let s = BetheSector::instantaneous(1, 1, vec![0.0], 0.5).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    let check = verify_bethe_eigenvector(&s, &sol).unwrap();
    assert!(check.max_residual <= 1e-10);
    assert!((check.eigenvalues[0].norm() - 1.0).abs() <= 1e-12);
    let z = transfer_gates(0.5, 1, 1, 1).unwrap().to_operator();
    let spec = eigenvalues(&z.mat).unwrap();
    let d = spec.iter().map(|e| (e - check.eigenvalues[0]).norm()).fold(f64::INFINITY, f64::min);
    assert!(d <= 1e-9);
    let m = bethe_momentum(&s, &sol, check.eigenvalues[0], 1e-6).unwrap();
    assert!((m.printed_exponents - m.no_exponents).norm() <= 1e-14);
}

#[test]
fn reference_state_is_an_eigenvector() {
    let s = BetheSector::instantaneous(2, 3, vec![], 0.3).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    let check = verify_bethe_eigenvector(&s, &sol).unwrap();
    assert!(check.max_residual <= 1e-14);
    let m = bethe_momentum(&s, &sol, check.eigenvalues[0], 1e-12).unwrap();
    assert!((m.value() - phase_factor(0.3).powi(2)).norm() <= 1e-14);
}

#[test]
fn complete_real_root_sector_at_four_sites() {
    let rep = oracle_completeness(2, 2, 0.6).unwrap();
    assert_eq!(rep.states.len(), 5);
    assert!(rep.max_eigen_residual <= 1e-8);
    assert!(rep.max_spectrum_distance <= 1e-8);
    assert!(rep.max_momentum_mismatch <= 1e-6);
    for s in rep.states.iter().filter(|s| !s.roots.is_empty()) {
        assert_eq!(s.momentum_variant, MomentumVariant::SingleParticle);
    }
}

#[test]
fn printed_momentum_variants_fail_at_four_sites() {
    let s = BetheSector::instantaneous(2, 2, vec![0.0], 0.6).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    let check = verify_bethe_eigenvector(&s, &sol).unwrap();
    let m = bethe_momentum(&s, &sol, check.eigenvalues[0], 1e-6).unwrap();
    let mu = check.eigenvalues[0];
    assert!((m.printed_exponents - mu).norm() >= 1e-3);
    assert!((m.no_exponents - mu).norm() >= 1e-3);
    assert!((m.single_particle - mu).norm() <= 1e-10);
}

#[test]
fn momentum_mismatch_is_a_formula_discrepancy() {
    let s = BetheSector::instantaneous(2, 2, vec![0.0], 0.6).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    assert!(matches!(bethe_momentum(&s, &sol, c64(-7.0, 0.0), 1e-6), Err(Error::FormulaDiscrepancy(_))));
}

#[test]
fn asymmetric_sectors_are_eigenvectors() {
    for (nl, nr) in [(1, 2), (2, 1), (1, 3), (3, 1)] {
        let n = nl + nr;
        for m in 1..=n / 2 {
            let q = enumerate_ground_quantum_numbers(nl, nr, m);
            let s = BetheSector::instantaneous(nl, nr, q, 0.45).unwrap();
            let sol = solve_log_bethe(&s).unwrap();
            let check = verify_bethe_eigenvector(&s, &sol).unwrap();
            assert!(check.max_residual <= 1e-8, "({nl}, {nr}, M = {m}): {:e}", check.max_residual);
            assert_eq!(check.sz, n as f64 / 2.0 - m as f64);
        }
    }
}

#[test]
fn root_density_histogram_matches_closed_form() {
    let (n, g) = (50, 0.4);
    let q = enumerate_ground_quantum_numbers(25, 25, 25);
    let s = BetheSector::instantaneous(25, 25, q, g).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    assert!(sol.converged && sol.residual <= 1e-10);
    let b = s.shift().unwrap();
    let roots = &sol.roots;
    // Local density from root spacings; the bulk stops short of the sparse edge layer.
    let mut worst: f64 = 0.0;
    for w in roots.windows(3) {
        let mid = w[1];
        if mid.abs() > b + 0.25 {
            continue;
        }
        let local = 2.0 / (w[2] - w[0]);
        let exact = closed_form_density(n, b, mid);
        worst = worst.max((local - exact).abs() / exact);
    }
    assert!(worst <= 0.05, "worst relative deviation {worst}");
}

#[test]
fn symmetric_numbers_give_symmetric_roots() {
    let q = enumerate_ground_quantum_numbers(4, 4, 4);
    let s = BetheSector::instantaneous(4, 4, q, 0.3).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    let mut r = sol.roots.clone();
    r.sort_by(f64::total_cmp);
    for (a, b) in r.iter().zip(r.iter().rev()) {
        assert!((a + b).abs() <= 1e-10);
    }
}

#[test]
fn energies() {
    let s = BetheSector::instantaneous(2, 2, vec![], 0.5).unwrap();
    let sol = solve_log_bethe(&s).unwrap();
    let charges = ChargeConfig { n: vec![-1, 0, 1, 2], length: 4.0, cutoff: 1.0 };
    let e = state_energy(&s, &sol, &charges).unwrap();
    assert!((e - 2.0 * std::f64::consts::PI * 2.0 / 4.0).abs() <= 1e-14);
    let bad = ChargeConfig { n: vec![4], length: 4.0, cutoff: 1.0 };
    assert!(matches!(state_energy(&s, &sol, &bad), Err(Error::Domain(_))));
    let dup = ChargeConfig { n: vec![1, 1], length: 4.0, cutoff: 1.0 };
    assert!(state_energy(&s, &sol, &dup).is_err());
    let s2 = BetheSector::instantaneous(3, 3, vec![-1.0, 0.0, 1.0], 0.5).unwrap();
    let sol2 = solve_log_bethe(&s2).unwrap();
    let e2 = state_energy(&s2, &sol2, &charges).unwrap();
    assert!(e2.is_finite());
}

#[test]
fn spin_part_of_energy_is_parity_even() {
    let s = BetheSector::instantaneous(3, 3, vec![-1.0, 0.0, 1.0], 0.5).unwrap();
    for l in [0.2, 1.3] {
        let a = root_energy(l, &s, 6.0).unwrap();
        let b = root_energy(-l, &s, 6.0).unwrap();
        assert!((a - b).abs() <= 1e-14);
    }
}
