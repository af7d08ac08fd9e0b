use std::f64::consts::PI;

use tdgn_core::scattering::{g_of_t, Convention, CouplingModel};
use tdgn_core::thermo::*;

#[test]
fn closed_form_values() {
    assert_eq!(closed_form_density(100, 0.0, 0.0), 50.0);
    for l in [0.3, 1.7, 4.0] {
        assert_eq!(closed_form_density(10, 2.0, l), closed_form_density(10, 2.0, -l));
    }
    let g = closed_form_grid(100, 2.0, 20.0, 4001).unwrap();
    assert!((g.integral() - 50.0).abs() <= 1e-10);
}

#[test]
fn nystrom_matches_closed_form() {
    let g = solve_density_nystrom(100, 2.0, 20.0, 2001, &[]).unwrap();
    let d = closed_form_defect(&g);
    assert!(d <= 1e-6, "{d:e}");
    // Nonnegative up to rounding in the far tails, where ρ ~ e^{−π·18}.
    assert!(g.min_value() >= -1e-14);
    assert!(g.condition.unwrap() < MAX_CONDITION);
    assert!((g.integral() - 50.0).abs() <= 1e-8 * 100.0);
    assert!(g.sz().abs() <= 1e-8 * 100.0);
    let mid = g.values.len() / 2;
    for k in 1..mid {
        assert!((g.values[mid + k] - g.values[mid - k]).abs() <= 1e-12);
    }
}

#[test]
fn nystrom_refinement_order() {
    let s = nystrom_convergence(20, 1.0, 16.0, 1.0, 3).unwrap();
    assert_eq!(s.orders.len(), 3);
    assert!(s.errors.windows(2).all(|w| w[1] < w[0]), "{:?}", s.errors);
    assert!(s.orders.iter().all(|&p| p >= 2.0), "{:?}", s.orders);
}

#[test]
fn boundary_precondition() {
    assert!(solve_density_nystrom(100, 2.0, 5.0, 201, &[]).is_err());
    assert!(solve_density_nystrom(100, 2.0, 20.0, 2, &[]).is_err());
}

#[test]
fn two_holes_carry_unit_spin() {
    let n = 100;
    let g = solve_density_nystrom(n, 2.0, 20.0, 2001, &[-0.4, 0.4]).unwrap();
    assert!((g.integral() - (n as f64 / 2.0 - 1.0)).abs() <= 1e-6 * n as f64);
    assert!((g.sz() - 1.0).abs() <= 1e-6 * n as f64);
}

#[test]
fn spinon_fourier_density_values() {
    let z = spinon_fourier_density(0.0, &[-0.3, 0.8], 1.0);
    assert!((z.re + 1.0).abs() <= 1e-15 && z.im.abs() <= 1e-15);
    for w in [0.5, -2.0] {
        let z = spinon_fourier_density(w, &[0.0], 1.0);
        assert!((z.re + 1.0 / (1.0 + (-w.abs()).exp())).abs() <= 1e-15);
    }
}

#[test]
fn spinon_response_closed_form() {
    for x in [0.0, 0.3, 2.0, 7.0, 25.0] {
        assert!((spinon_response(x) - spinon_smooth_density(x, &[0.0])).abs() <= 1e-13);
    }
    assert!((spinon_tail(0.0) - 0.25).abs() <= 1e-15);
    assert!((spinon_tail(-3.0) + spinon_tail(3.0) - 0.5).abs() <= 1e-15);
    // Alternating-series oracle: 1/4 − (1/π)Σ(−1)^{k+1} arctan(a/k).
    assert!((spinon_tail(3.0) - 0.027115842542593888).abs() <= 1e-10);
    assert!((spinon_tail(20.0) - 0.003980536413376257).abs() <= 1e-10);
}

#[test]
fn spinon_density_is_the_two_hole_difference() {
    let holes = [-0.5, 0.7];
    let gs = solve_density_nystrom(40, 1.5, 20.0, 2001, &[]).unwrap();
    let ex = solve_density_nystrom(40, 1.5, 20.0, 2001, &holes).unwrap();
    let worst = gs
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            // σ already carries +Σδ_h, so the difference is the δ-free part of the spinon density.
            let diff = ex.values[i] - gs.values[i];
            (diff - spinon_smooth_density(l, &holes)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-4, "{worst:e}");
}

#[test]
fn spinon_energy_matches_exact_form() {
    let de = dressed_energy(1.0, 3.0, 20.0, 2001).unwrap();
    for l in [0.0, 0.5, -1.0] {
        let e = de.spinon_energy(l);
        assert!((e - exact_spinon_energy(1.0, 3.0, l)).abs() <= 1e-9);
        assert!(e > 0.0);
    }
    let ex = spinon_excitation(&de, -0.2, 0.2);
    assert_eq!(ex.total_sz, 1);
    assert!((ex.energy_each - de.spinon_energy(0.2)).abs() <= 1e-15);
}

#[test]
fn dispersion_is_cosh() {
    let grid: Vec<f64> = (-10..=10).map(|k| k as f64 / 10.0).collect();
    let fit = spinon_dispersion_fit(1.0, 3.0, &grid, 20.0, 2001).unwrap();
    assert!(fit.max_rel_dev <= 1e-3, "{}", fit.max_rel_dev);
    assert_eq!(fit.minimum_at, 0.0);
    let m = 2.0 * (-3.0 * PI).exp();
    assert!((fit.m_fit / m - 1.0).abs() <= 1e-3);
}

#[test]
fn fit_needs_the_origin() {
    assert!(fit_cosh(&[0.1, 0.2], &[1.0, 1.1]).is_err());
}

#[test]
fn finite_size_gap_extrapolates_to_the_mass() {
    let ext = extrapolate_spinon_gap(&[32, 64, 128], 1.0, 1.0).unwrap();
    assert!((0.9..=1.1).contains(&ext.ratio), "ratio {}", ext.ratio);
    for s in &ext.samples {
        assert!(s.gap > 0.0 && s.max_residual <= 1e-9);
    }
}

#[test]
fn mass_gap_inverts_static_coupling() {
    let (cutoff, m0) = (1000.0f64, 3.0);
    let g0 = PI / (2.0 * cutoff / m0).ln();
    assert!((2.0 * cutoff * (-PI / g0).exp() - m0).abs() <= 1e-12 * m0);
    let m = CouplingModel::new(1.0, 2.0).unwrap();
    let gap = mass_gap(&m, 5.0, cutoff, 1.0, Convention::Exact).unwrap();
    assert_eq!(gap.m_t, 2.0 * cutoff * (-PI / gap.g_t).exp());
    assert_eq!(gap.t0, 1.0);
    assert!((gap.m0 - 2.0 * cutoff * (-PI).exp()).abs() <= 1e-12 * gap.m0);
    assert!(gap.m_t > 0.0);
}

#[test]
fn log_gap_is_affine_in_time() {
    let m = CouplingModel::new(1.0, 2.0).unwrap();
    let grid: Vec<f64> = (0..=40).map(|k| 2e3 + 450.0 * k as f64).collect();
    let u = gap_decay_fit(&m, 1000.0, &grid, Convention::Universal).unwrap();
    assert!(u.max_abs_residual <= 1e-8, "{:e}", u.max_abs_residual);
    assert!((u.slope + 4.0 * PI * m.alpha).abs() <= 1e-9);
    let e = gap_decay_fit(&m, 1000.0, &grid, Convention::Exact).unwrap();
    assert!(e.rel_residual <= 1e-8, "{:e}", e.rel_residual);
    assert!((e.slope + 2.0 * PI * m.alpha).abs() <= 1e-3);
}

#[test]
fn gap_monotone_in_time() {
    for alpha in [0.3, -0.05] {
        let m = CouplingModel::new(alpha, 4.0).unwrap();
        let gaps: Vec<f64> = (0..30).map(|k| mass_gap(&m, 0.5 * k as f64, 100.0, 1.0, Convention::Exact).unwrap().m_t).collect();
        if alpha > 0.0 {
            assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        } else {
            assert!(gaps.windows(2).all(|w| w[1] > w[0]));
        }
        let g = g_of_t(&m, 0.0, Convention::Exact).unwrap();
        assert!(g > 0.0);
    }
}
