//! Logarithmic Bethe equations, transfer matrices and the diagonalization oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::eigen::eigenvalues;
use crate::linalg::{projective_distance, solve_real, vec_dot, RMat};
use crate::scattering::{build_s_instantaneous, c_of_g, g_of_t, phase_factor, Convention, CouplingModel};
use crate::spin::{permutation4, Gauge, GateProduct, Monodromy, Ordering, SpinOperator, SpinVector};
use crate::{c64, theta, Error, Result, C64};

use core::f64::consts::PI;

/// Which Bethe equations the roots solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "units", rename_all = "snake_case")]
pub enum Units {
    /// Instantaneous spectrum at coupling `g`: `η = 1`, right movers at `+b`, left movers at `−b`, `b = c(g)/2`.
    Instantaneous { g: f64 },
    /// Driven frame in `w`-units: right movers at `w`, left movers at `w̄`, crossing `η`.
    Driven { eta: f64, w: f64, wbar: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSector {
    pub n_left: usize,
    pub n_right: usize,
    pub quantum_numbers: Vec<f64>,
    pub units: Units,
}

impl BetheSector {
    pub fn new(n_left: usize, n_right: usize, quantum_numbers: Vec<f64>, units: Units) -> Result<Self> {
        let s = BetheSector { n_left, n_right, quantum_numbers, units };
        s.validate()?;
        Ok(s)
    }

    pub fn instantaneous(n_left: usize, n_right: usize, quantum_numbers: Vec<f64>, g: f64) -> Result<Self> {
        BetheSector::new(n_left, n_right, quantum_numbers, Units::Instantaneous { g })
    }

    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn m(&self) -> usize {
        self.quantum_numbers.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.n(), self.m());
        if 2 * m > n {
            return Err(Error::domain(format!("M = {m} exceeds N/2 = {}", n as f64 / 2.0)));
        }
        check_quantum_numbers(n, &self.quantum_numbers)?;
        match self.units {
            Units::Instantaneous { g } if !(g > 0.0) => Err(Error::domain(format!("g = {g} must be positive"))),
            Units::Driven { eta, .. } if !(eta > 0.0) => Err(Error::domain(format!("η = {eta} must be positive"))),
            _ => Ok(()),
        }
    }

    /// Inhomogeneity shift `b = c(g)/2` of the instantaneous frame.
    pub fn shift(&self) -> Result<f64> {
        match self.units {
            Units::Instantaneous { g } => Ok(c_of_g(g)? / 2.0),
            Units::Driven { .. } => Err(Error::domain("shift is defined for the instantaneous frame")),
        }
    }

    pub fn eta(&self) -> f64 {
        match self.units {
            Units::Instantaneous { .. } => 1.0,
            Units::Driven { eta, .. } => eta,
        }
    }

    /// Site rapidities `θ_k`, left movers first.
    pub fn sites(&self) -> Result<Vec<f64>> {
        let (left, right) = match self.units {
            Units::Instantaneous { .. } => {
                let b = self.shift()?;
                (-b, b)
            }
            Units::Driven { w, wbar, .. } => (wbar, w),
        };
        Ok(core::iter::repeat_n(left, self.n_left).chain(core::iter::repeat_n(right, self.n_right)).collect())
    }
}

/// `2m ≡ N − M + 1 (mod 2)`, distinct, and `|m| ≤ (N − M − 1)/2`.
pub fn check_quantum_numbers(n: usize, m: &[f64]) -> Result<()> {
    let mm = m.len();
    let bound = (n as f64 - mm as f64 - 1.0) / 2.0;
    for (a, &q) in m.iter().enumerate() {
        let twice = 2.0 * q;
        if twice != twice.round() {
            return Err(Error::domain(format!("quantum number {q} is not a half-integer")));
        }
        if (twice.round() as i64 - (n as i64 - mm as i64 + 1)).rem_euclid(2) != 0 {
            return Err(Error::domain(format!("quantum number {q} has the wrong parity for N = {n}, M = {mm}")));
        }
        if q.abs() > bound + 1e-12 {
            return Err(Error::domain(format!("|{q}| exceeds (N − M − 1)/2 = {bound}")));
        }
        if m[..a].contains(&q) {
            return Err(Error::domain(format!("repeated quantum number {q}")));
        }
    }
    Ok(())
}

/// Every admissible quantum number for `M` finite real roots.
pub fn allowed_quantum_numbers(n: usize, m: usize) -> Vec<f64> {
    if m == 0 || m > n {
        return Vec::new();
    }
    let top = (n as f64 - m as f64 - 1.0) / 2.0;
    let count = (n - m) as i64;
    (0..count).map(|k| -top + k as f64).collect()
}

/// Consecutive window of `M` values closest to zero with the admissible parity.
/// For odd `N` the window is shifted up by one half.
pub fn enumerate_ground_quantum_numbers(n_left: usize, n_right: usize, m: usize) -> Vec<f64> {
    let n = n_left + n_right;
    let centre = if n.is_multiple_of(2) { 0.0 } else { 0.5 };
    (0..m).map(|k| k as f64 - (m as f64 - 1.0) / 2.0 + centre).collect()
}

/// Removes the listed slots (indices into `allowed_quantum_numbers(n, m)`), leaving holes.
pub fn quantum_numbers_with_holes(n: usize, m: usize, holes: &[usize]) -> Result<Vec<f64>> {
    let slots = allowed_quantum_numbers(n, m);
    if holes.iter().any(|h| *h >= slots.len()) {
        return Err(Error::domain("hole index outside the slot range"));
    }
    let kept: Vec<f64> = slots.iter().enumerate().filter(|(i, _)| !holes.contains(i)).map(|(_, v)| *v).collect();
    if kept.len() != m {
        return Err(Error::domain(format!("{} slots minus {} holes leaves {} ≠ M = {m}", slots.len(), holes.len(), kept.len())));
    }
    Ok(kept)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub roots: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tolerance: 1e-10, max_iterations: 200 }
    }
}

fn defects(lam: &[f64], sites: &[f64], eta: f64, m: &[f64]) -> Vec<f64> {
    lam.iter()
        .zip(m)
        .map(|(&l, &q)| {
            let lhs: f64 = sites.iter().map(|&s| theta(l - s, eta / 2.0)).sum();
            let rhs: f64 = lam.iter().map(|&lb| theta(l - lb, eta)).sum();
            lhs - PI * q - rhs
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

#[inline]
fn dtheta(x: f64, c: f64) -> f64 {
    c / (c * c + x * x)
}

/// Per-root guess from `(1 − M/N) Σ_k Θ(λ − θ_k, η/2) = π m` (bisection).
fn initial_guess(sites: &[f64], eta: f64, m: &[f64]) -> Vec<f64> {
    let n = sites.len() as f64;
    let scale = 1.0 - m.len() as f64 / n;
    let f = |l: f64, q: f64| scale * sites.iter().map(|&s| theta(l - s, eta / 2.0)).sum::<f64>() - PI * q;
    let span = sites.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    m.iter()
        .map(|&q| {
            let (mut lo, mut hi) = (-span - 1.0, span + 1.0);
            while f(lo, q) > 0.0 {
                lo *= 2.0;
            }
            while f(hi, q) < 0.0 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid, q) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Damped Newton for `Σ_k Θ(λ_α − θ_k, η/2) = π m_α + Σ_β Θ(λ_α − λ_β, η)`.
pub fn solve_bethe_sites(sites: &[f64], eta: f64, m: &[f64], opts: &NewtonOptions) -> Result<BetheSolution> {
    let mm = m.len();
    if mm == 0 {
        return Ok(BetheSolution { roots: Vec::new(), residual: 0.0, converged: true, iterations: 0 });
    }
    let mut last_err = None;
    for attempt in 0..3 {
        let mut lam = initial_guess(sites, eta, m);
        if attempt > 0 {
            let damp = 1.0 / (1u32 << attempt) as f64;
            lam.iter_mut().zip(m).for_each(|(l, q)| *l = (1.0 - damp) * *l + damp * *q * 0.5);
        }
        match newton(&mut lam, sites, eta, m, opts) {
            Ok(sol) if roots_distinct(&sol.roots) => return Ok(sol),
            Ok(_) => last_err = Some(Error::Degenerate("roots collided during Newton iteration".into())),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Degenerate("no attempt succeeded".into())))
}

fn roots_distinct(roots: &[f64]) -> bool {
    roots.iter().enumerate().all(|(a, x)| roots[..a].iter().all(|y| (x - y).abs() > 1e-9 * (1.0 + x.abs())))
}

fn newton(lam: &mut Vec<f64>, sites: &[f64], eta: f64, m: &[f64], opts: &NewtonOptions) -> Result<BetheSolution> {
    let mm = m.len();
    let mut f = defects(lam, sites, eta, m);
    let mut res = max_abs(&f);
    let target = opts.tolerance * 1e-2;
    let mut it = 0;
    while it < opts.max_iterations && res > target {
        it += 1;
        let jac = RMat::from_fn(mm, |a, b| {
            if a == b {
                sites.iter().map(|&s| dtheta(lam[a] - s, eta / 2.0)).sum::<f64>()
                    - (0..mm).filter(|&k| k != a).map(|k| dtheta(lam[a] - lam[k], eta)).sum::<f64>()
            } else {
                dtheta(lam[a] - lam[b], eta)
            }
        });
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let (step, _) = solve_real(jac, &rhs, 1e14)
            .map_err(|_| Error::NoConvergence { what: "singular Bethe Jacobian".into(), iterations: it })?;
        let mut t = 1.0;
        let mut trial: Vec<f64>;
        let mut ftrial: Vec<f64>;
        loop {
            trial = lam.iter().zip(&step).map(|(l, s)| l + t * s).collect();
            ftrial = defects(&trial, sites, eta, m);
            if max_abs(&ftrial) < res || t < 1e-8 {
                break;
            }
            t *= 0.5;
        }
        let new_res = max_abs(&ftrial);
        if new_res >= res && res <= opts.tolerance {
            break;
        }
        *lam = trial;
        f = ftrial;
        res = new_res;
    }
    Ok(BetheSolution { roots: lam.clone(), residual: res, converged: res <= opts.tolerance, iterations: it })
}

pub fn solve_log_bethe(sector: &BetheSector) -> Result<BetheSolution> {
    sector.validate()?;
    solve_bethe_sites(&sector.sites()?, sector.eta(), &sector.quantum_numbers, &NewtonOptions::default())
}

/// Max defect of the logarithmic equations at the given roots.
pub fn bethe_defect(sector: &BetheSector, roots: &[f64]) -> Result<f64> {
    Ok(max_abs(&defects(roots, &sector.sites()?, sector.eta(), &sector.quantum_numbers)))
}

/// `Z_j = P^{j,j+1}…P^{j,N} S_I^{j,1}…S_I^{j,N_L} P^{j,N_L+1}…P^{j,j−1}` as gates, for right mover `j`.
pub fn transfer_gates(g: f64, j: usize, n_left: usize, n_right: usize) -> Result<GateProduct> {
    let n = n_left + n_right;
    if j < n_left || j >= n {
        return Err(Error::domain(format!("particle {j} is not a right mover (N_L = {n_left}, N = {n})")));
    }
    let s = build_s_instantaneous(g)?;
    let p = permutation4();
    let mut prod = GateProduct::new(n);
    for m in (j + 1)..n {
        prod.push(p, j, m)?;
    }
    for m in 0..n_left {
        prod.push(s, j, m)?;
    }
    for m in n_left..j {
        prod.push(p, j, m)?;
    }
    Ok(prod)
}

/// Dense `Z_j(t)` with `g(t)` from the exact branch.
pub fn build_transfer_matrix(t: f64, j: usize, n_left: usize, n_right: usize, model: &CouplingModel) -> Result<SpinOperator> {
    let n = n_left + n_right;
    if n > 10 {
        return Err(Error::Capacity(format!("{n} > 10 particles")));
    }
    let g = g_of_t(model, t, Convention::Exact)?;
    Ok(transfer_gates(g, j, n_left, n_right)?.to_operator())
}

/// Instantaneous monodromy: ascending order, unitary gauge, sites `θ_L = −b`, `θ_R = +b`, `η = 1`.
pub fn instantaneous_monodromy(sector: &BetheSector) -> Result<Monodromy> {
    let sites = sector.sites()?.into_iter().map(|s| c64(s, 0.0)).collect();
    Ok(Monodromy::new(sites, c64(1.0, 0.0), Ordering::Ascending, Gauge::Unitary))
}

/// `∏_α B'(λ_α + i/2) |Ω⟩`.
pub fn bethe_vector(sector: &BetheSector, roots: &[f64]) -> Result<SpinVector> {
    let mono = instantaneous_monodromy(sector)?;
    let mut v = SpinVector::reference(sector.n());
    for &l in roots {
        v = mono.apply_b(c64(l, 0.5), &v)?;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    /// Right-mover indices that were checked.
    pub particles: Vec<usize>,
    pub residuals: Vec<f64>,
    pub eigenvalues: Vec<C64>,
    pub max_residual: f64,
    pub sz: f64,
}

/// Projective eigenvector residual of the Bethe vector under every right-mover `Z_j`.
pub fn verify_bethe_eigenvector(sector: &BetheSector, solution: &BetheSolution) -> Result<EigenCheck> {
    let g = match sector.units {
        Units::Instantaneous { g } => g,
        Units::Driven { .. } => return Err(Error::domain("eigenvector oracle needs the instantaneous frame")),
    };
    let v = bethe_vector(sector, &solution.roots)?;
    let nv = v.norm();
    if !(nv > 1e-12) {
        return Err(Error::Degenerate(format!("Bethe vector vanishes (norm {nv:e})")));
    }
    let mut check = EigenCheck {
        particles: Vec::new(),
        residuals: Vec::new(),
        eigenvalues: Vec::new(),
        max_residual: 0.0,
        sz: sector.n() as f64 / 2.0 - sector.m() as f64,
    };
    for j in sector.n_left..sector.n() {
        let zv = transfer_gates(g, j, sector.n_left, sector.n_right)?.apply(&v);
        let r = projective_distance(&zv.amps, &v.amps);
        let mu = vec_dot(&v.amps, &zv.amps) / (nv * nv);
        check.particles.push(j);
        check.residuals.push(r);
        check.eigenvalues.push(mu);
        check.max_residual = check.max_residual.max(r);
    }
    Ok(check)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumVariant {
    /// Per-root factors raised to `N_R` and `N_L`, as printed.
    PrintedExponents,
    /// Both factors without exponents.
    NoExponents,
    /// Single factor at the particle's own inhomogeneity.
    SingleParticle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumReport {
    pub printed_exponents: C64,
    pub no_exponents: C64,
    pub single_particle: C64,
    pub measured: C64,
    pub selected: MomentumVariant,
    pub mismatch: f64,
}

impl MomentumReport {
    pub fn value(&self) -> C64 {
        match self.selected {
            MomentumVariant::PrintedExponents => self.printed_exponents,
            MomentumVariant::NoExponents => self.no_exponents,
            MomentumVariant::SingleParticle => self.single_particle,
        }
    }
}

/// Evaluates the three `e^{ik_j L}` candidates and selects the one matching `measured`.
pub fn bethe_momentum(sector: &BetheSector, solution: &BetheSolution, measured: C64, tol: f64) -> Result<MomentumReport> {
    let g = match sector.units {
        Units::Instantaneous { g } => g,
        Units::Driven { .. } => return Err(Error::domain("momentum needs the instantaneous frame")),
    };
    let b = sector.shift()?;
    let base = phase_factor(g).powi(sector.n_left as i32);
    let ratio = |x: f64| c64(x, -0.5) / c64(x, 0.5);
    let (mut pe, mut ne, mut sp) = (base, base, base);
    for &l in &solution.roots {
        let right = ratio(l - b);
        let left = ratio(l + b);
        pe *= right.powi(sector.n_right as i32) * left.powi(sector.n_left as i32);
        ne *= right * left;
        sp *= right;
    }
    let cands = [
        (MomentumVariant::PrintedExponents, pe),
        (MomentumVariant::NoExponents, ne),
        (MomentumVariant::SingleParticle, sp),
    ];
    let (selected, best) = cands
        .iter()
        .map(|(v, z)| (*v, (z - measured).norm()))
        .fold((MomentumVariant::SingleParticle, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let report = MomentumReport { printed_exponents: pe, no_exponents: ne, single_particle: sp, measured, selected, mismatch: best };
    if best > tol {
        return Err(Error::FormulaDiscrepancy(format!(
            "no momentum variant matches the measured eigenvalue {measured} (best mismatch {best:e})"
        )));
    }
    Ok(report)
}

/// Charge quantum numbers with the cutoff `π|n|/L < πΛ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfig {
    pub n: Vec<i64>,
    pub length: f64,
    pub cutoff: f64,
}

impl ChargeConfig {
    pub fn validate(&self) -> Result<()> {
        for (a, &q) in self.n.iter().enumerate() {
            if (q.unsigned_abs() as f64) >= self.cutoff * self.length {
                return Err(Error::domain(format!("charge number {q} violates the cutoff Λ = {}", self.cutoff)));
            }
            if self.n[..a].contains(&q) {
                return Err(Error::domain(format!("repeated charge number {q}")));
            }
        }
        Ok(())
    }
}

/// Per-root energy `(1/L)[Σ_R (2Θ(θ_R − λ, η/2) − π) + Σ_L (2Θ(λ − θ_L, η/2) − π)]`.
pub fn root_energy(lambda: f64, sector: &BetheSector, length: f64) -> Result<f64> {
    let sites = sector.sites()?;
    let half = sector.eta() / 2.0;
    let e: f64 = sites
        .iter()
        .enumerate()
        .map(|(k, &s)| if k < sector.n_left { 2.0 * theta(lambda - s, half) - PI } else { 2.0 * theta(s - lambda, half) - PI })
        .sum();
    Ok(e / length)
}

/// `E = Σ_j 2π n_j / L + Σ_β e(λ_β)`.
pub fn state_energy(sector: &BetheSector, solution: &BetheSolution, charges: &ChargeConfig) -> Result<f64> {
    charges.validate()?;
    let free: f64 = charges.n.iter().map(|&q| 2.0 * PI * q as f64 / charges.length).sum();
    let mut spin = 0.0;
    for &l in &solution.roots {
        spin += root_energy(l, sector, charges.length)?;
    }
    Ok(free + spin)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleState {
    pub quantum_numbers: Vec<f64>,
    pub roots: Vec<f64>,
    pub eigen_residual: f64,
    pub eigenvalue: C64,
    pub spectrum_distance: f64,
    pub momentum_mismatch: f64,
    pub momentum_variant: MomentumVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_left: usize,
    pub n_right: usize,
    pub g: f64,
    pub states: Vec<OracleState>,
    /// Configurations without a converged, non-vanishing real-root state.
    pub unmatched: usize,
    pub spectrum: Vec<C64>,
    pub max_eigen_residual: f64,
    pub max_spectrum_distance: f64,
    pub max_momentum_mismatch: f64,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Enumerates every real-root configuration, checks each Bethe vector against
/// all right-mover `Z_j` and locates its eigenvalue in the exact spectrum.
pub fn oracle_completeness(n_left: usize, n_right: usize, g: f64) -> Result<OracleReport> {
    let n = n_left + n_right;
    if n > 8 {
        return Err(Error::Capacity(format!("{n} > 8 particles")));
    }
    let j0 = n_left;
    let spectrum = eigenvalues(&transfer_gates(g, j0, n_left, n_right)?.to_operator().mat)?;
    let mut report = OracleReport {
        n_left,
        n_right,
        g,
        states: Vec::new(),
        unmatched: 0,
        spectrum: spectrum.clone(),
        max_eigen_residual: 0.0,
        max_spectrum_distance: 0.0,
        max_momentum_mismatch: 0.0,
    };
    for m in 0..=(n / 2) {
        let slots = allowed_quantum_numbers(n, m);
        let configs = if m == 0 { vec![Vec::new()] } else { combinations(slots.len(), m) };
        for pick in configs {
            let q: Vec<f64> = pick.iter().map(|&i| slots[i]).collect();
            let sector = BetheSector::instantaneous(n_left, n_right, q.clone(), g)?;
            let sol = match solve_log_bethe(&sector) {
                Ok(s) if s.converged => s,
                _ => {
                    report.unmatched += 1;
                    continue;
                }
            };
            let check = match verify_bethe_eigenvector(&sector, &sol) {
                Ok(c) => c,
                Err(Error::Degenerate(_)) => {
                    report.unmatched += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mu = check.eigenvalues[0];
            let dist = spectrum.iter().map(|s| (s - mu).norm()).fold(f64::INFINITY, f64::min);
            let mom = bethe_momentum(&sector, &sol, mu, f64::INFINITY)?;
            report.max_eigen_residual = report.max_eigen_residual.max(check.max_residual);
            report.max_spectrum_distance = report.max_spectrum_distance.max(dist);
            report.max_momentum_mismatch = report.max_momentum_mismatch.max(mom.mismatch);
            report.states.push(OracleState {
                quantum_numbers: q,
                roots: sol.roots,
                eigen_residual: check.max_residual,
                eigenvalue: mu,
                spectrum_distance: dist,
                momentum_mismatch: mom.mismatch,
                momentum_variant: mom.selected,
            });
        }
    }
    Ok(report)
}
