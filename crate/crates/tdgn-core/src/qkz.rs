//! qKZ transport operators, Jackson-integral amplitudes, the Yang–Yang action
//! and the classical r-matrix limit.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::gamma::log_gamma;
use crate::linalg::{projective_distance, vec_norm, CMat};
use crate::quad::{cexpm1, integrate_half_line};
use crate::spin::{embed_two_site, identity4, op4_to_cmat, r_matrix, Gauge, Monodromy, Ordering, SpinOperator, SpinVector};
use crate::yang_baxter::cyclic_transport;
use crate::{c64, Error, Result, C64};

/// Particle coordinates and their qKZ images. Left movers come first.
///
/// `w = z/L − β/(2αL)`, `w̄ = z̄/L + β/(2αL)`, `η = 1/(αL)`; `α` may be complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicFrame {
    pub length: f64,
    pub alpha: C64,
    pub beta: f64,
    pub z: Vec<C64>,
    pub zbar: Vec<C64>,
    pub w: Vec<C64>,
    pub wbar: Vec<C64>,
    pub eta: C64,
}

impl KinematicFrame {
    pub fn from_physical(length: f64, z: Vec<C64>, zbar: Vec<C64>, alpha: C64, beta: f64) -> Result<Self> {
        if !(length > 0.0) || alpha.is_zero() {
            return Err(Error::domain(format!("need L > 0 and α ≠ 0, got L = {length}, α = {alpha}")));
        }
        let al = alpha * length;
        let s = beta / (2.0 * al);
        let w = z.iter().map(|x| x / length - s).collect();
        let wbar = zbar.iter().map(|x| x / length + s).collect();
        Ok(KinematicFrame { length, alpha, beta, z, zbar, w, wbar, eta: 1.0 / al })
    }

    /// Frame given directly in `w`-units (`L = 1`, `β = 0`).
    pub fn from_w(w: Vec<C64>, wbar: Vec<C64>, eta: C64) -> Result<Self> {
        if eta.is_zero() {
            return Err(Error::domain("η = 0"));
        }
        Ok(KinematicFrame { length: 1.0, alpha: 1.0 / eta, beta: 0.0, z: w.clone(), zbar: wbar.clone(), w, wbar, eta })
    }

    pub fn n_left(&self) -> usize {
        self.wbar.len()
    }

    pub fn n_right(&self) -> usize {
        self.w.len()
    }

    pub fn n(&self) -> usize {
        self.n_left() + self.n_right()
    }

    /// `(w̄_1 … w̄_{N_L}, w_1 … w_{N_R})`.
    pub fn thetas(&self) -> Vec<C64> {
        self.wbar.iter().chain(self.w.iter()).copied().collect()
    }

    /// Copy with right mover `j` (global index) moved by `−1`, i.e. `z_j → z_j − L`.
    pub fn shifted(&self, j: usize) -> Result<Self> {
        let nl = self.n_left();
        if j < nl || j >= self.n() {
            return Err(Error::domain(format!("particle {j} is not a right mover")));
        }
        let mut f = self.clone();
        f.w[j - nl] -= 1.0;
        f.z[j - nl] -= self.length;
        Ok(f)
    }

    /// Max deviation of the stored `w`, `w̄`, `η` from the physical coordinates.
    pub fn map_defect(&self) -> f64 {
        let al = self.alpha * self.length;
        let s = self.beta / (2.0 * al);
        let dw = self.z.iter().zip(&self.w).map(|(z, w)| (z / self.length - s - w).norm());
        let dwb = self.zbar.iter().zip(&self.wbar).map(|(z, w)| (z / self.length + s - w).norm());
        dw.chain(dwb).fold((1.0 / al - self.eta).norm(), f64::max)
    }
}

/// `Z′_j` in `w`-units: shifted factors `R(θ_m + 1 − θ_j)` for `m > j`, then the rest unshifted.
pub fn build_qkz_transport(j: usize, frame: &KinematicFrame) -> Result<SpinOperator> {
    if frame.n() > 8 {
        return Err(Error::Capacity(format!("{} > 8 particles", frame.n())));
    }
    if j < frame.n_left() || j >= frame.n() {
        return Err(Error::domain(format!("particle {j} is not a right mover")));
    }
    Ok(cyclic_transport(j, &frame.thetas(), c64(1.0, 0.0), frame.eta)?.to_operator())
}

fn b0_monodromy(frame: &KinematicFrame) -> Monodromy {
    Monodromy::new(frame.thetas(), frame.eta, Ordering::Descending, Gauge::Jackson)
}

/// `B_0(u) v`: descending monodromy in the Jackson gauge, evaluated at `u + iη`.
pub fn apply_b0(frame: &KinematicFrame, u: C64, v: &SpinVector) -> Result<SpinVector> {
    b0_monodromy(frame).apply_b(u + C64::i() * frame.eta, v)
}

/// `ln` of the scalar Jackson weight at the lattice point `u`.
pub fn log_gamma_weight(frame: &KinematicFrame, u: &[C64]) -> Result<C64> {
    let ie = C64::i() * frame.eta;
    let mut acc = C64::zero();
    for &ua in u {
        for w in frame.thetas() {
            acc += log_gamma(w - ua)? - log_gamma(w - ua - ie)?;
        }
    }
    for a in 0..u.len() {
        for b in (a + 1)..u.len() {
            let z = u[a] - u[b];
            if z.is_zero() {
                return Err(Error::singular("coincident Jackson points"));
            }
            acc += z.ln() + log_gamma(z - ie)? - log_gamma(z + ie + 1.0)?;
        }
    }
    Ok(acc)
}

/// The Gamma-ratio product in the Jackson summand.
pub fn gamma_product(frame: &KinematicFrame, u: &[C64]) -> Result<C64> {
    Ok(log_gamma_weight(frame, u)?.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonAmplitude {
    pub m: usize,
    pub base_points: Vec<C64>,
    pub truncation: usize,
    pub value: SpinVector,
    /// `‖A(l) − A(l/2)‖/‖A(l)‖` at the final truncation.
    pub tail_estimate: f64,
    /// Tail estimates over the doubling ladder.
    pub ladder: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacksonOptions {
    pub initial_l_max: usize,
    pub max_l_max: usize,
    pub tail_tolerance: f64,
}

impl Default for JacksonOptions {
    fn default() -> Self {
        JacksonOptions { initial_l_max: 25, max_l_max: 1 << 14, tail_tolerance: 1e-6 }
    }
}

fn check_desk_scale(frame: &KinematicFrame, m: usize, base: &[C64]) -> Result<()> {
    if frame.n() > 4 || m > 2 {
        return Err(Error::Capacity(format!("Jackson sums are limited to N ≤ 4, M ≤ 2 (got N = {}, M = {m})", frame.n())));
    }
    if base.len() != m {
        return Err(Error::domain(format!("{} base points for M = {m}", base.len())));
    }
    Ok(())
}

/// Adds the lattice points with `lo < max|l_α| ≤ hi` to `acc`.
fn add_shell(frame: &KinematicFrame, base: &[C64], lo: Option<usize>, hi: usize, acc: &mut [C64]) -> Result<()> {
    let m = base.len();
    let n = frame.n();
    let mono = b0_monodromy(frame);
    let ie = C64::i() * frame.eta;
    let width = 2 * hi + 1;
    let total = width.pow(m as u32);
    let mut l = vec![0i64; m];
    for idx in 0..total {
        let mut r = idx;
        for la in l.iter_mut() {
            *la = (r % width) as i64 - hi as i64;
            r /= width;
        }
        let linf = l.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
        if lo.is_some_and(|lo| linf <= lo) {
            continue;
        }
        let u: Vec<C64> = base.iter().zip(&l).map(|(b, la)| b - *la as f64).collect();
        let weight = log_gamma_weight(frame, &u)?.exp();
        let mut v = SpinVector::reference(n);
        for &ua in &u {
            v = mono.apply_b(ua + ie, &v)?;
        }
        for (a, x) in acc.iter_mut().zip(&v.amps) {
            *a += weight * x;
        }
    }
    Ok(())
}

/// Truncated Jackson sum at a fixed window `|l_α| ≤ l_max`.
pub fn jackson_sum(frame: &KinematicFrame, base: &[C64], l_max: usize) -> Result<SpinVector> {
    check_desk_scale(frame, base.len(), base)?;
    let mut acc = vec![C64::zero(); 1 << frame.n()];
    add_shell(frame, base, None, l_max, &mut acc)?;
    Ok(SpinVector { n_sites: frame.n(), amps: acc })
}

/// Jackson amplitude with the window doubled until the tail estimate drops below tolerance.
pub fn eval_jackson_amplitude(frame: &KinematicFrame, base: &[C64], opts: &JacksonOptions) -> Result<JacksonAmplitude> {
    let m = base.len();
    check_desk_scale(frame, m, base)?;
    let n = frame.n();
    if m == 0 {
        return Ok(JacksonAmplitude {
            m,
            base_points: Vec::new(),
            truncation: 0,
            value: SpinVector::reference(n),
            tail_estimate: 0.0,
            ladder: Vec::new(),
        });
    }
    let mut l = opts.initial_l_max.max(1);
    let mut acc = vec![C64::zero(); 1 << n];
    add_shell(frame, base, None, l, &mut acc)?;
    let mut ladder = Vec::new();
    loop {
        let prev = acc.clone();
        let next = 2 * l;
        add_shell(frame, base, Some(l), next, &mut acc)?;
        let diff: Vec<C64> = acc.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let norm = vec_norm(&acc);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Degenerate(format!("Jackson amplitude has norm {norm}")));
        }
        let tail = vec_norm(&diff) / norm;
        l = next;
        ladder.push((l, tail));
        if tail < opts.tail_tolerance {
            break;
        }
        let k = ladder.len();
        if k >= 3 && ladder[k - 1].1 >= ladder[k - 2].1 && ladder[k - 2].1 >= ladder[k - 3].1 {
            return Err(Error::NoConvergence { what: format!("Jackson tail not decreasing: {ladder:?}"), iterations: k });
        }
        if l >= opts.max_l_max {
            return Err(Error::NoConvergence { what: format!("Jackson tail {tail:e} at l_max = {l}"), iterations: k });
        }
    }
    Ok(JacksonAmplitude {
        m,
        base_points: base.to_vec(),
        truncation: l,
        value: SpinVector { n_sites: n, amps: acc },
        tail_estimate: ladder.last().map_or(0.0, |x| x.1),
        ladder,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QkzResidual {
    pub particle: usize,
    pub residual: f64,
    pub truncation: Option<usize>,
    pub tail_estimate: f64,
}

/// `dist(A(w_j − 1), Z′_j A(w))` at a fixed window.
pub fn qkz_residual_at(frame: &KinematicFrame, base: &[C64], j: usize, l_max: usize) -> Result<QkzResidual> {
    let z = build_qkz_transport(j, frame)?;
    let a = if base.is_empty() { SpinVector::reference(frame.n()) } else { jackson_sum(frame, base, l_max)? };
    let a1 = if base.is_empty() { a.clone() } else { jackson_sum(&frame.shifted(j)?, base, l_max)? };
    let za = z.apply(&a);
    Ok(QkzResidual { particle: j, residual: projective_distance(&a1.amps, &za.amps), truncation: Some(l_max), tail_estimate: f64::NAN })
}

/// Same residual with adaptive truncation of both amplitudes.
pub fn check_qkz_residual(frame: &KinematicFrame, base: &[C64], j: usize, opts: &JacksonOptions) -> Result<QkzResidual> {
    let z = build_qkz_transport(j, frame)?;
    let a = eval_jackson_amplitude(frame, base, opts)?;
    let a1 = eval_jackson_amplitude(&frame.shifted(j)?, base, opts)?;
    let za = z.apply(&a.value);
    Ok(QkzResidual {
        particle: j,
        residual: projective_distance(&a1.value.amps, &za.amps),
        truncation: Some(a.truncation.max(a1.truncation)),
        tail_estimate: a.tail_estimate.max(a1.tail_estimate),
    })
}

/// Quadrature settings for the Yang–Yang integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YyQuadrature {
    pub panels_per_unit: usize,
    /// Arguments are shifted by integers until their real part reaches this value.
    pub min_real_part: f64,
    /// Decay exponent at the upper cutoff: `X_max = decay / Re(arg)`.
    pub decay: f64,
}

impl Default for YyQuadrature {
    fn default() -> Self {
        YyQuadrature { panels_per_unit: 4, min_real_part: 1.0, decay: 40.0 }
    }
}

fn checked_ln(z: C64, what: &str) -> Result<C64> {
    if z.norm() < 1e-300 {
        return Err(Error::domain(format!("{what}: logarithm at zero")));
    }
    Ok(z.ln())
}

fn shift_count(a: C64, eta: C64, quad: &YyQuadrature) -> usize {
    let need = quad.min_real_part + eta.im.abs();
    if a.re >= need {
        0
    } else {
        (need - a.re).ceil() as usize
    }
}

/// `∫₀^∞ dx/x [iη e^{−x} + e^{−ax}(1 − e^{iηx})/(1 − e^{−x})] = ln Γ(a) − ln Γ(a − iη)`,
/// continued to small `Re a` by the Gamma recurrence.
pub fn yy_single(a: C64, eta: C64, quad: &YyQuadrature) -> Result<C64> {
    let k = shift_count(a, eta, quad);
    let ie = C64::i() * eta;
    let mut corr = C64::zero();
    for j in 0..k {
        let x = a + j as f64;
        corr += checked_ln(x, "single-particle term")? - checked_ln(x - ie, "single-particle term")?;
    }
    let s = a + k as f64;
    let f = |x: f64| -> C64 {
        let num = -cexpm1(ie * x);
        let den = -(-x).exp_m1();
        (ie * (-x).exp() + (-s * x).exp() * num / den) / x
    };
    let xmax = quad.decay / (s.re - (-eta.im).max(0.0)).min(1.0);
    let freq = s.im.abs() + eta.re.abs();
    Ok(integrate_half_line(&f, xmax, quad.panels_per_unit, freq) - corr)
}

/// `G(z) = ∫₀^∞ dx/x [2i sin(ηx) e^{−zx}/(1 − e^{−x}) − 2iη e^{−x}]
///       = ln Γ(z − iη) − ln Γ(z + 1 + iη) + ln(z + iη)`.
pub fn yy_pair_kernel(z: C64, eta: C64, quad: &YyQuadrature) -> Result<C64> {
    let k = shift_count(z, eta, quad);
    let ie = C64::i() * eta;
    let mut corr = C64::zero();
    for j in 0..k {
        let x = z + j as f64;
        corr += checked_ln(x - ie, "pair term")? - checked_ln(x + 1.0 + ie, "pair term")?;
    }
    let s = z + k as f64;
    corr += checked_ln(s + ie, "pair term")? - checked_ln(z + ie, "pair term")?;
    let f = |x: f64| -> C64 {
        let sin2 = cexpm1(ie * x) - cexpm1(-ie * x);
        let den = -(-x).exp_m1();
        ((-s * x).exp() * sin2 / den - 2.0 * ie * (-x).exp()) / x
    };
    let xmax = quad.decay / (s.re - eta.im.abs()).min(1.0);
    let freq = s.im.abs() + eta.re.abs();
    Ok(integrate_half_line(&f, xmax, quad.panels_per_unit, freq) - corr)
}

/// `S_pair(z) = −[ln z − ln(z + iη) + G(z)]`.
pub fn yy_pair(z: C64, eta: C64, quad: &YyQuadrature) -> Result<C64> {
    let ie = C64::i() * eta;
    Ok(-(checked_ln(z, "pair term")? - checked_ln(z + ie, "pair term")? + yy_pair_kernel(z, eta, quad)?))
}

/// `S(u) = −Σ_{α,w} I(w − u_α) + Σ_{α<β} S_pair(u_α − u_β)`, so that `e^{−S}` is the Jackson weight.
pub fn yang_yang_action(u: &[C64], frame: &KinematicFrame, quad: &YyQuadrature) -> Result<C64> {
    let mut s = C64::zero();
    for (a, &ua) in u.iter().enumerate() {
        for (k, w) in frame.thetas().into_iter().enumerate() {
            s -= yy_single(w - ua, frame.eta, quad).map_err(|e| name_pair(e, format!("(w_{k}, u_{a})")))?;
        }
    }
    for a in 0..u.len() {
        for b in (a + 1)..u.len() {
            s += yy_pair(u[a] - u[b], frame.eta, quad).map_err(|e| name_pair(e, format!("(u_{a}, u_{b})")))?;
        }
    }
    Ok(s)
}

fn name_pair(e: Error, pair: String) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!("{pair}: {msg}")),
        other => other,
    }
}

/// Saddle-point action on the real `λ` axis, `λ = u + 1/2 + iη/2` (real `η`).
/// Sites left of `λ` enter through the reflected term `−I(1 − (w − u) + iη)`.
pub fn saddle_action(lambda: &[f64], frame: &KinematicFrame, quad: &YyQuadrature) -> Result<C64> {
    let eta = frame.eta;
    let ie = C64::i() * eta;
    let u: Vec<C64> = lambda.iter().map(|&l| c64(l - 0.5, 0.0) - ie / 2.0).collect();
    let mut s = C64::zero();
    for (&l, &ua) in lambda.iter().zip(&u) {
        for w in frame.thetas() {
            let a = if w.re > l { w - ua } else { 1.0 - (w - ua) + ie };
            s -= yy_single(a, eta, quad)?;
        }
    }
    for a in 0..u.len() {
        for b in (a + 1)..u.len() {
            s += yy_pair(u[a] - u[b], eta, quad)?;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    /// `max_α |∂S/∂λ_α + 2πi m_α|`.
    pub saddle_residual: f64,
    /// Max defect of the logarithmic Bethe equations at the same `λ`.
    pub bethe_residual: f64,
    pub saddle_numbers: Vec<f64>,
}

/// Saddle quantum number `m = −m_B − ½ Σ_w sgn(w − λ)` for Bethe number `m_B`.
pub fn saddle_quantum_number(lambda: f64, m_bethe: f64, frame: &KinematicFrame) -> f64 {
    let s: f64 = frame.thetas().iter().map(|w| if w.re > lambda { 1.0 } else { -1.0 }).sum();
    -m_bethe - 0.5 * s
}

/// Saddle residual with central differences, alongside the Bethe defect with sites `θ = (w̄, w)`.
pub fn saddle_residual(lambda: &[f64], frame: &KinematicFrame, m: &[f64], quad: &YyQuadrature) -> Result<SaddleReport> {
    if frame.eta.im != 0.0 || frame.thetas().iter().any(|w| w.im != 0.0) {
        return Err(Error::domain("saddle reduction needs real η and real sites"));
    }
    if m.len() != lambda.len() {
        return Err(Error::domain("one quantum number per root"));
    }
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for a in 0..lambda.len() {
        let mut lp = lambda.to_vec();
        let mut lm = lambda.to_vec();
        lp[a] += h;
        lm[a] -= h;
        let d = (saddle_action(&lp, frame, quad)? - saddle_action(&lm, frame, quad)?) / (2.0 * h);
        worst = worst.max((d + C64::i() * 2.0 * core::f64::consts::PI * m[a]).norm());
    }
    let eta = frame.eta.re;
    let sites: Vec<f64> = frame.thetas().iter().map(|w| w.re).collect();
    let mut bethe: f64 = 0.0;
    let mb: Vec<f64> = lambda.iter().zip(m).map(|(&l, &q)| -q - 0.5 * sites.iter().map(|&w| if w > l { 1.0 } else { -1.0 }).sum::<f64>()).collect();
    for (a, &l) in lambda.iter().enumerate() {
        let lhs: f64 = sites.iter().map(|&s| crate::theta(l - s, eta / 2.0)).sum();
        let rhs: f64 = lambda.iter().map(|&lb| crate::theta(l - lb, eta)).sum();
        bethe = bethe.max((lhs - core::f64::consts::PI * mb[a] - rhs).abs());
    }
    Ok(SaddleReport { saddle_residual: worst, bethe_residual: bethe, saddle_numbers: m.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimit {
    pub lambda: f64,
    pub r: CMat,
    /// Observed order of the `η → 0` remainder.
    pub order: f64,
    /// Max-norm distance to `(P − I)/(iλ)`.
    pub closed_form_defect: f64,
}

fn r_quotient(lambda: f64, eta: f64) -> Result<CMat> {
    let r = op4_to_cmat(&r_matrix(c64(lambda, 0.0), c64(eta, 0.0))?);
    Ok(r.sub(&op4_to_cmat(&identity4())).scale(c64(1.0 / eta, 0.0)))
}

/// `(P − I)/(iλ)`.
pub fn classical_r_closed_form(lambda: f64) -> CMat {
    let p = op4_to_cmat(&crate::spin::permutation4());
    p.sub(&CMat::identity(4)).scale(1.0 / c64(0.0, lambda))
}

/// `lim_{η→0} (R(λ; η) − I)/η` by Neville extrapolation over a decreasing `η` sequence.
pub fn classical_r_limit(lambda: f64, etas: &[f64]) -> Result<ClassicalLimit> {
    if lambda == 0.0 {
        return Err(Error::domain("λ = 0"));
    }
    if etas.len() < 3 || etas.windows(2).any(|w| !(w[1] < w[0]) || !(w[1] > 0.0)) {
        return Err(Error::domain("η sequence must be positive, strictly decreasing, length ≥ 3"));
    }
    let quots: Vec<CMat> = etas.iter().map(|&e| r_quotient(lambda, e)).collect::<Result<_>>()?;
    let d01 = quots[0].sub(&quots[1]).max_norm();
    let d12 = quots[1].sub(&quots[2]).max_norm();
    let order = if d12 > 0.0 { (d01 / d12).ln() / (etas[0] / etas[1]).ln() } else { f64::INFINITY };
    let mut table = quots.clone();
    let n = etas.len();
    for k in 1..n {
        for i in 0..(n - k) {
            let (ei, ek) = (etas[i], etas[i + k]);
            let num = table[i + 1].scale(c64(ei, 0.0)).sub(&table[i].scale(c64(ek, 0.0)));
            table[i] = num.scale(c64(1.0 / (ei - ek), 0.0));
        }
    }
    let r = table.swap_remove(0);
    if r.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence { what: "non-finite extrapolation".into(), iterations: n });
    }
    let closed_form_defect = r.sub(&classical_r_closed_form(lambda)).max_norm();
    Ok(ClassicalLimit { lambda, r, order, closed_form_defect })
}

/// `[r12, r13] + [r12, r23] + [r13, r23]` in max norm, with `λ13 = λ12 + λ23`.
pub fn classical_yb_residual(r12: &CMat, r13: &CMat, r23: &CMat) -> Result<f64> {
    let embed = |m: &CMat, i: usize, j: usize| -> Result<CMat> {
        let mut op = [[C64::zero(); 4]; 4];
        for (a, row) in op.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x = m[(a, b)];
            }
        }
        Ok(embed_two_site(&op, i, j, 3)?.mat)
    };
    let (a, b, c) = (embed(r12, 0, 1)?, embed(r13, 0, 2)?, embed(r23, 1, 2)?);
    Ok(a.commutator(&b).add(&a.commutator(&c)).add(&b.commutator(&c)).max_norm())
}
