use tdgn_core::bethe::{solve_bethe_sites, NewtonOptions};
use tdgn_core::linalg::projective_distance;
use tdgn_core::qkz::*;
use tdgn_core::spin::SpinVector;
use tdgn_core::{c64, Error, C64};

fn desk_frame() -> KinematicFrame {
    KinematicFrame::from_w(vec![c64(-0.4, 0.05)], vec![c64(0.3, 0.1)], c64(0.7, 1.5)).unwrap()
}

fn base() -> Vec<C64> {
    vec![c64(0.123, 0.377)]
}

#[test]
fn physical_frame_map() {
    let f = KinematicFrame::from_physical(
        4.0,
        vec![c64(1.0, 0.0), c64(2.5, 0.0)],
        vec![c64(0.5, 0.0)],
        c64(0.8, 0.0),
        1.2,
    )
    .unwrap();
    assert!(f.map_defect() <= 1e-15);
    let s = 1.2 / (2.0 * 0.8 * 4.0);
    assert!((f.w[0] - c64(0.25 - s, 0.0)).norm() <= 1e-15);
    assert!((f.wbar[0] - c64(0.125 + s, 0.0)).norm() <= 1e-15);
    assert!((f.eta - c64(1.0 / 3.2, 0.0)).norm() <= 1e-15);
    let sh = f.shifted(1).unwrap();
    assert!((sh.w[0] - f.w[0] + 1.0).norm() <= 1e-15);
    assert!(sh.map_defect() <= 1e-15);
    assert!(f.shifted(0).is_err());
    assert!(KinematicFrame::from_physical(0.0, vec![], vec![], c64(1.0, 0.0), 1.0).is_err());
}

#[test]
fn two_particle_transport_is_unitary_for_real_eta() {
    let f = KinematicFrame::from_w(vec![c64(0.2, 0.0)], vec![c64(-0.3, 0.0)], c64(0.6, 0.0)).unwrap();
    let z = build_qkz_transport(1, &f).unwrap();
    assert!(z.mat.unitarity_defect() <= 1e-12);
    assert!(matches!(build_qkz_transport(0, &f), Err(Error::Domain(_))));
}

#[test]
fn empty_amplitude_is_the_reference_state() {
    let f = desk_frame();
    let a = eval_jackson_amplitude(&f, &[], &JacksonOptions::default()).unwrap();
    assert_eq!(a.value, SpinVector::reference(2));
    let r = qkz_residual_at(&f, &[], 1, 10).unwrap();
    assert!(r.residual <= 1e-12);
}

#[test]
fn truncation_ladder_decreases() {
    let f = desk_frame();
    let ladder: Vec<f64> = [25, 50, 100, 200].iter().map(|&l| qkz_residual_at(&f, &base(), 1, l).unwrap().residual).collect();
    assert!(ladder.windows(2).all(|w| w[1] < w[0]), "{ladder:?}");
    assert!(ladder[3] <= 1e-4, "{ladder:?}");
}

#[test]
fn adaptive_amplitude_converges() {
    let f = desk_frame();
    let opts = JacksonOptions::default();
    let a = eval_jackson_amplitude(&f, &base(), &opts).unwrap();
    assert!(a.tail_estimate < 1e-6);
    let wider = jackson_sum(&f, &base(), 2 * a.truncation).unwrap();
    let rel = projective_distance(&wider.amps, &a.value.amps);
    assert!(rel < 1e-6, "{rel:e}");
    let r = check_qkz_residual(&f, &base(), 1, &opts).unwrap();
    assert!(r.residual <= 1e-6, "{:e}", r.residual);
}

#[test]
fn jackson_capacity_guard() {
    let f = KinematicFrame::from_w(vec![c64(0.0, 0.0); 3], vec![c64(0.0, 0.0); 2], c64(0.7, 1.5)).unwrap();
    assert!(matches!(jackson_sum(&f, &base(), 5), Err(Error::Capacity(_))));
}

#[test]
fn yang_yang_action_reproduces_gamma_product() {
    let f = desk_frame();
    let q = YyQuadrature::default();
    for k in 0..10 {
        let u = vec![c64(0.123 - k as f64 * 0.7, 0.377 + 0.05 * k as f64)];
        let s = yang_yang_action(&u, &f, &q).unwrap();
        let g = gamma_product(&f, &u).unwrap();
        let rel = ((-s).exp() - g).norm() / g.norm();
        assert!(rel <= 1e-6, "point {k}: {rel:e}");
    }
}

#[test]
fn pair_action_matches_gamma_product() {
    let f = KinematicFrame::from_w(vec![c64(-0.4, 0.05)], vec![c64(0.3, 0.1)], c64(0.7, 1.5)).unwrap();
    let q = YyQuadrature::default();
    let u = vec![c64(0.123, 0.377), c64(-1.3, 0.1)];
    let s = yang_yang_action(&u, &f, &q).unwrap();
    let g = gamma_product(&f, &u).unwrap();
    assert!(((-s).exp() - g).norm() / g.norm() <= 1e-6);
}

#[test]
fn single_particle_action_is_analytic() {
    let eta = c64(0.7, 0.3);
    let q = YyQuadrature::default();
    let a = c64(1.4, 0.2);
    let h = 1e-4;
    let dx = (yy_single(a + h, eta, &q).unwrap() - yy_single(a - h, eta, &q).unwrap()) / (2.0 * h);
    let dy = (yy_single(a + c64(0.0, h), eta, &q).unwrap() - yy_single(a - c64(0.0, h), eta, &q).unwrap()) / (2.0 * h);
    // Cauchy–Riemann: ∂_y f = i ∂_x f.
    assert!((dy - C64::i() * dx).norm() <= 1e-6);
}

#[test]
fn action_domain_errors_name_the_pair() {
    let f = desk_frame();
    let u = vec![f.wbar[0]];
    match yang_yang_action(&u, &f, &YyQuadrature::default()) {
        Err(Error::Domain(msg)) => assert!(msg.contains("(w_0, u_0)"), "{msg}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

fn real_frame(w: Vec<f64>, wbar: Vec<f64>, eta: f64) -> KinematicFrame {
    KinematicFrame::from_w(
        w.into_iter().map(|x| c64(x, 0.0)).collect(),
        wbar.into_iter().map(|x| c64(x, 0.0)).collect(),
        c64(eta, 0.0),
    )
    .unwrap()
}

#[test]
fn symmetric_saddle() {
    let f = real_frame(vec![0.8], vec![-0.8], 1.0);
    let q = YyQuadrature::default();
    let m = saddle_quantum_number(0.0, 0.0, &f);
    let r = saddle_residual(&[0.0], &f, &[m], &q).unwrap();
    assert!(r.saddle_residual <= 1e-6, "{:e}", r.saddle_residual);
    assert!(r.bethe_residual <= 1e-12);
    let off = saddle_residual(&[0.1], &f, &[m], &q).unwrap();
    assert!(off.saddle_residual >= 10.0 * r.saddle_residual.max(1e-6));
}

fn newton_saddle(w: Vec<f64>, wbar: Vec<f64>, eta: f64, mb: f64) {
    let f = real_frame(w, wbar, eta);
    let sites: Vec<f64> = f.thetas().iter().map(|x| x.re).collect();
    let sol = solve_bethe_sites(&sites, eta, &[mb], &NewtonOptions::default()).unwrap();
    let l = sol.roots[0];
    let m = saddle_quantum_number(l, mb, &f);
    let r = saddle_residual(&[l], &f, &[m], &YyQuadrature::default()).unwrap();
    assert!(r.saddle_residual <= 1e-4, "m_B = {mb}: {:e}", r.saddle_residual);
    assert!(r.bethe_residual <= 1e-9);
    let off = saddle_residual(&[l + 0.1], &f, &[m], &YyQuadrature::default()).unwrap();
    assert!(off.saddle_residual >= 10.0 * r.saddle_residual);
}

#[test]
fn saddle_at_newton_roots() {
    // Stirling corrections fall off as |w − λ|⁻³, so the sites sit far from the root.
    newton_saddle(vec![21.0], vec![-19.0], 1.0, 0.0);
    newton_saddle(vec![20.0, 60.0], vec![-20.0], 0.8, 0.5);
    newton_saddle(vec![20.0, 60.0], vec![-20.0], 0.8, -0.5);
}

#[test]
fn saddle_requires_real_frame() {
    assert!(saddle_residual(&[0.0], &desk_frame(), &[0.0], &YyQuadrature::default()).is_err());
}

#[test]
fn classical_limit() {
    let etas: Vec<f64> = (0..6).map(|k| 0.1 / 2f64.powi(k)).collect();
    let lim = classical_r_limit(0.7, &etas).unwrap();
    assert!(lim.closed_form_defect <= 1e-8, "{:e}", lim.closed_form_defect);
    assert!((lim.order - 1.0).abs() <= 0.1, "order {}", lim.order);
    let minus = classical_r_limit(-0.7, &etas).unwrap();
    assert!(lim.r.add(&minus.r).max_norm() <= 1e-8);
    let (l12, l23) = (0.7, -1.9);
    let r12 = classical_r_limit(l12, &etas).unwrap().r;
    let r23 = classical_r_limit(l23, &etas).unwrap().r;
    let r13 = classical_r_limit(l12 + l23, &etas).unwrap().r;
    assert!(classical_yb_residual(&r12, &r13, &r23).unwrap() <= 1e-8);
    assert!(classical_r_limit(0.0, &etas).is_err());
    assert!(classical_r_limit(0.7, &[0.1, 0.2, 0.05]).is_err());
}
