//! Root densities, spinon energies and the time-dependent mass gap.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bethe::{
    enumerate_ground_quantum_numbers, quantum_numbers_with_holes, root_energy, solve_log_bethe, BetheSector, Units,
};
use crate::gamma::{digamma, log_gamma};
use crate::linalg::{affine_fit, solve_real, AffineFit, RMat};
use crate::quad::{GaussLegendre, TrapezoidGrid};
use crate::scattering::{g_of_t, Convention, CouplingModel};
use crate::{theta, Error, Result, C64};

/// `φ(x, n) = (n/π)/(n² + x²)`.
pub fn kernel(x: f64, n: f64) -> f64 {
    n / (PI * (n * n + x * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySource {
    Nystrom,
    ClosedForm,
}

/// Smooth density `σ` on a uniform grid. With holes, the root density is `σ − Σ_h δ(λ − λ_h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub source: DensitySource,
    pub n_particles: usize,
    pub inv_g: f64,
    pub holes: Vec<f64>,
    pub condition: Option<f64>,
}

impl DensityGrid {
    fn trapezoid(&self) -> TrapezoidGrid {
        let hw = self.nodes[self.nodes.len() - 1];
        TrapezoidGrid::symmetric(hw, self.nodes.len())
    }

    /// `∫ρ dλ`, holes subtracted. The algebraic tails of the hole response
    /// beyond `±λ_max` are added analytically.
    pub fn integral(&self) -> f64 {
        let hw = self.nodes[self.nodes.len() - 1];
        let tails: f64 = self.holes.iter().map(|&h| spinon_tail(hw - h) + spinon_tail(hw + h)).sum();
        self.trapezoid().integrate(&self.values) + tails - self.holes.len() as f64
    }

    /// `S^z = N/2 − ∫ρ`.
    pub fn sz(&self) -> f64 {
        self.n_particles as f64 / 2.0 - self.integral()
    }

    pub fn step(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `(N/4)[sech π(λ + b) + sech π(λ − b)]`.
pub fn closed_form_density(n: usize, inv_g: f64, lambda: f64) -> f64 {
    let sech = |x: f64| 1.0 / (PI * x).cosh();
    n as f64 / 4.0 * (sech(lambda + inv_g) + sech(lambda - inv_g))
}

pub fn closed_form_grid(n: usize, inv_g: f64, half_width: f64, n_nodes: usize) -> Result<DensityGrid> {
    check_grid(half_width, n_nodes)?;
    let grid = TrapezoidGrid::symmetric(half_width, n_nodes);
    let values = grid.nodes.iter().map(|&l| closed_form_density(n, inv_g, l)).collect();
    Ok(DensityGrid {
        nodes: grid.nodes,
        values,
        source: DensitySource::ClosedForm,
        n_particles: n,
        inv_g,
        holes: Vec::new(),
        condition: None,
    })
}

fn check_grid(half_width: f64, n_nodes: usize) -> Result<()> {
    if !(half_width > 0.0) || n_nodes < 3 {
        return Err(Error::domain(format!("grid needs λ_max > 0 and ≥ 3 nodes (got {half_width}, {n_nodes})")));
    }
    Ok(())
}

/// Largest condition estimate accepted by the Nyström solves.
pub const MAX_CONDITION: f64 = 1e10;

/// Solves `σ + φ(·,1)∗σ = (N/2)Σ_± φ(λ ± b, 1/2) + Σ_h φ(λ − λ_h, 1)` by trapezoid Nyström.
pub fn solve_density_nystrom(n: usize, inv_g: f64, half_width: f64, n_nodes: usize, holes: &[f64]) -> Result<DensityGrid> {
    check_grid(half_width, n_nodes)?;
    let reach = holes.iter().fold(inv_g.abs(), |a, h| a.max(h.abs()));
    let tail = (n as f64 + holes.len() as f64) * (-PI * (half_width - reach)).exp();
    if !(tail < 1e-8) {
        return Err(Error::domain(format!("λ_max = {half_width} too small: solution tail {tail:e} at the boundary")));
    }
    let grid = TrapezoidGrid::symmetric(half_width, n_nodes);
    let x = &grid.nodes;
    let w = &grid.weights;
    let a = RMat::from_fn(n_nodes, |i, j| (if i == j { 1.0 } else { 0.0 }) + w[j] * kernel(x[i] - x[j], 1.0));
    let rhs: Vec<f64> = x
        .iter()
        .map(|&l| {
            n as f64 / 2.0 * (kernel(l + inv_g, 0.5) + kernel(l - inv_g, 0.5))
                + holes.iter().map(|&h| kernel(l - h, 1.0)).sum::<f64>()
        })
        .collect();
    let mut rhs = rhs;
    if !holes.is_empty() {
        // The hole response decays like 1/λ², so the convolution over |μ| > λ_max is kept explicitly.
        let gl = GaussLegendre::new(16);
        for (r, &l) in rhs.iter_mut().zip(x) {
            *r -= exterior_hole_convolution(l, half_width, holes, &gl);
        }
    }
    let (values, cond) = solve_real(a, &rhs, MAX_CONDITION)?;
    Ok(DensityGrid {
        nodes: grid.nodes,
        values,
        source: DensitySource::Nystrom,
        n_particles: n,
        inv_g,
        holes: holes.to_vec(),
        condition: Some(cond),
    })
}

/// `Σ_h ∫_{|μ|>λ_max} φ(λ − μ, 1) s(μ − λ_h) dμ` with `s` the one-hole response, via `μ = ±λ_max/t`.
fn exterior_hole_convolution(lambda: f64, half_width: f64, holes: &[f64], gl: &GaussLegendre) -> f64 {
    let panels = 24;
    let mut acc = 0.0;
    for sign in [1.0, -1.0] {
        let f = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let mu = sign * half_width / t;
            let jac = half_width / (t * t);
            kernel(lambda - mu, 1.0) * holes.iter().map(|&h| spinon_response(mu - h)).sum::<f64>() * jac
        };
        // Panels cluster toward t = 1, where the kernel peak sits for boundary nodes.
        for k in 0..panels {
            let a = 1.0 - (1.0 - k as f64 / panels as f64).powi(2);
            let b = 1.0 - (1.0 - (k + 1) as f64 / panels as f64).powi(2);
            acc += gl.integrate_real(&f, a, b);
        }
    }
    acc
}

/// Max-norm distance between a no-hole Nyström grid and the closed form.
pub fn closed_form_defect(grid: &DensityGrid) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.values)
        .map(|(&l, &v)| (v - closed_form_density(grid.n_particles, grid.inv_g, l)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log2(e_k/e_{k+1})` per halving.
    pub orders: Vec<f64>,
}

/// Closed-form error of the Nyström solution as the step is halved from `h0`.
pub fn nystrom_convergence(n: usize, inv_g: f64, half_width: f64, h0: f64, halvings: usize) -> Result<ConvergenceStudy> {
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..=halvings {
        let h = h0 / (1u64 << k) as f64;
        let nodes = (2.0 * half_width / h).round() as usize + 1;
        let g = solve_density_nystrom(n, inv_g, half_width, nodes, &[])?;
        steps.push(g.step());
        errors.push(closed_form_defect(&g));
    }
    let orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(ConvergenceStudy { steps, errors, orders })
}

/// `ρ̃_spinons(ω) = −Σ_h e^{iλ_h ω}/(1 + e^{−η|ω|})`.
pub fn spinon_fourier_density(omega: f64, holes: &[f64], eta: f64) -> C64 {
    let den = 1.0 + (-eta * omega.abs()).exp();
    holes.iter().map(|&h| C64::new((h * omega).cos(), (h * omega).sin())).sum::<C64>() * (-1.0 / den)
}

/// Smooth part of the spinon density, `Σ_h (1/π)∫₀^∞ cos(ω(λ − λ_h)) e^{−ω}/(1 + e^{−ω}) dω`.
pub fn spinon_smooth_density(lambda: f64, holes: &[f64]) -> f64 {
    let gl = GaussLegendre::new(16);
    let omega_max = 40.0;
    holes
        .iter()
        .map(|&h| {
            let d = lambda - h;
            let per_unit = (d.abs() / 2.0).max(2.0);
            let panels = (omega_max * per_unit).ceil() as usize;
            let width = omega_max / panels as f64;
            let f = |w: f64| (w * d).cos() * (-w).exp() / (1.0 + (-w).exp());
            (0..panels).map(|k| gl.integrate_real(&f, k as f64 * width, (k + 1) as f64 * width)).sum::<f64>() / PI
        })
        .sum()
}

/// One-hole smooth spinon density in closed form, `(1/2π) Re[ψ(1 + ix/2) − ψ(1/2 + ix/2)]`.
pub fn spinon_response(x: f64) -> f64 {
    let y = x / 2.0;
    match (digamma(C64::new(1.0, y)), digamma(C64::new(0.5, y))) {
        (Ok(p), Ok(q)) => (p - q).re / (2.0 * PI),
        _ => f64::NAN,
    }
}

/// `∫_a^∞` of the one-hole smooth spinon density,
/// `1/4 − (1/π) Im[ln Γ(1 + ia/2) − ln Γ(1/2 + ia/2)]` for `a ≥ 0`.
pub fn spinon_tail(a: f64) -> f64 {
    if a < 0.0 {
        return 0.5 - spinon_tail(-a);
    }
    let y = a / 2.0;
    let d = match (log_gamma(C64::new(1.0, y)), log_gamma(C64::new(0.5, y))) {
        (Ok(p), Ok(q)) => (p - q).im,
        _ => return 0.25,
    };
    // The difference lies in [0, π/4]; remove any branch offset of the logs.
    let d = d - 2.0 * PI * (d / (2.0 * PI)).round();
    0.25 - d / PI
}

/// Two spinons in the triplet state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinonExcitation {
    pub hole_rapidities: (f64, f64),
    pub energy_each: f64,
    pub total_sz: i32,
}

/// Dressed spin energy `δε` on a Nyström grid: `δε + φ(·,1)∗δε = Λ[Θ(b − λ, 1/2) + Θ(b + λ, 1/2)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedEnergy {
    pub cutoff: f64,
    pub inv_g: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub condition: f64,
}

impl DressedEnergy {
    fn source(&self, l: f64) -> f64 {
        self.cutoff * (theta(self.inv_g - l, 0.5) + theta(self.inv_g + l, 0.5))
    }

    /// Nyström interpolation of `δε` at any `λ`.
    pub fn eval(&self, lambda: f64) -> f64 {
        let conv: f64 =
            self.nodes.iter().zip(&self.weights).zip(&self.values).map(|((&m, &w), &v)| w * kernel(lambda - m, 1.0) * v).sum();
        self.source(lambda) - conv
    }

    /// Energy of one spinon with rapidity `λ`: `πΛ/2 − δε(λ)`.
    pub fn spinon_energy(&self, lambda: f64) -> f64 {
        PI * self.cutoff / 2.0 - self.eval(lambda)
    }
}

pub fn dressed_energy(cutoff: f64, inv_g: f64, half_width: f64, n_nodes: usize) -> Result<DressedEnergy> {
    check_grid(half_width, n_nodes)?;
    let grid = TrapezoidGrid::symmetric(half_width, n_nodes);
    let mut de = DressedEnergy {
        cutoff,
        inv_g,
        nodes: grid.nodes.clone(),
        weights: grid.weights.clone(),
        values: Vec::new(),
        condition: 0.0,
    };
    let x = &grid.nodes;
    let w = &grid.weights;
    let a = RMat::from_fn(n_nodes, |i, j| (if i == j { 1.0 } else { 0.0 }) + w[j] * kernel(x[i] - x[j], 1.0));
    let rhs: Vec<f64> = x.iter().map(|&l| de.source(l)).collect();
    let (values, cond) = solve_real(a, &rhs, MAX_CONDITION)?;
    de.values = values;
    de.condition = cond;
    Ok(de)
}

/// `Λ[arctan e^{−π(λ+b)} + arctan e^{π(λ−b)}]`.
pub fn exact_spinon_energy(cutoff: f64, inv_g: f64, lambda: f64) -> f64 {
    cutoff * ((-PI * (lambda + inv_g)).exp().atan() + (PI * (lambda - inv_g)).exp().atan())
}

pub fn spinon_excitation(de: &DressedEnergy, l1: f64, l2: f64) -> SpinonExcitation {
    SpinonExcitation { hole_rapidities: (l1, l2), energy_each: 0.5 * (de.spinon_energy(l1) + de.spinon_energy(l2)), total_sz: 1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionFit {
    pub m_fit: f64,
    /// `max |E(λ)/E(0) − cosh πλ| / cosh πλ`.
    pub max_rel_dev: f64,
    /// `max |E(λ)/(m cosh πλ) − 1|`.
    pub fit_rel_dev: f64,
    pub minimum_at: f64,
}

/// Fits `E(λ) = m cosh(πλ)` by least squares. The grid must contain `λ = 0`.
pub fn fit_cosh(lambdas: &[f64], energies: &[f64]) -> Result<DispersionFit> {
    if lambdas.len() != energies.len() || lambdas.is_empty() {
        return Err(Error::domain("dispersion fit needs matching, non-empty samples"));
    }
    let i0 = lambdas.iter().position(|&l| l == 0.0).ok_or_else(|| Error::domain("dispersion grid must contain λ = 0"))?;
    let e0 = energies[i0];
    if !(e0 > 0.0) {
        return Err(Error::NoConvergence { what: format!("non-positive spinon energy {e0} at λ = 0"), iterations: 0 });
    }
    let c: Vec<f64> = lambdas.iter().map(|&l| (PI * l).cosh()).collect();
    let m_fit = energies.iter().zip(&c).map(|(e, c)| e * c).sum::<f64>() / c.iter().map(|c| c * c).sum::<f64>();
    let max_rel_dev = energies.iter().zip(&c).map(|(e, c)| (e / e0 - c).abs() / c).fold(0.0, f64::max);
    let fit_rel_dev = energies.iter().zip(&c).map(|(e, c)| (e / (m_fit * c) - 1.0).abs()).fold(0.0, f64::max);
    let imin = energies.iter().enumerate().fold(0, |a, (i, e)| if *e < energies[a] { i } else { a });
    Ok(DispersionFit { m_fit, max_rel_dev, fit_rel_dev, minimum_at: lambdas[imin] })
}

/// Thermodynamic route: dressed energy on `[−λ_max, λ_max]`, sampled at the hole grid.
pub fn spinon_dispersion_fit(
    cutoff: f64,
    inv_g: f64,
    hole_grid: &[f64],
    half_width: f64,
    n_nodes: usize,
) -> Result<DispersionFit> {
    let de = dressed_energy(cutoff, inv_g, half_width, n_nodes)?;
    let e: Vec<f64> = hole_grid.iter().map(|&l| de.spinon_energy(l)).collect();
    fit_cosh(hole_grid, &e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpinon {
    pub n: usize,
    pub ground_energy: f64,
    pub excited_energy: f64,
    pub hole_rapidity: f64,
    /// `(ΔE/2)/cosh(πλ_h)`.
    pub gap: f64,
    pub max_residual: f64,
}

/// Two central holes (slots `±1`) in `M = N/2 − 1` against the `M = N/2` ground state, `L = N/Λ`.
pub fn finite_spinon_gap(n: usize, inv_g: f64, cutoff: f64) -> Result<FiniteSpinon> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!("finite-N spinon gap needs even N ≥ 4, got {n}")));
    }
    let half = n / 2;
    let length = n as f64 / cutoff;
    let units = Units::Driven { eta: 1.0, w: inv_g, wbar: -inv_g };
    let ground = BetheSector::new(half, half, enumerate_ground_quantum_numbers(half, half, half), units)?;
    let gs = solve_log_bethe(&ground)?;
    let m_exc = half - 1;
    let slots = n - m_exc;
    let c = slots / 2;
    let excited = BetheSector::new(half, half, quantum_numbers_with_holes(n, m_exc, &[c - 1, c + 1])?, units)?;
    let ex = solve_log_bethe(&excited)?;
    if !gs.converged || !ex.converged {
        return Err(Error::NoConvergence { what: format!("Bethe solve at N = {n}"), iterations: gs.iterations.max(ex.iterations) });
    }
    let energy = |s: &BetheSector, roots: &[f64]| -> Result<f64> {
        roots.iter().try_fold(0.0, |acc, &l| Ok(acc + root_energy(l, s, length)?))
    };
    let e_gs = energy(&ground, &gs.roots)?;
    let e_ex = energy(&excited, &ex.roots)?;
    let sites = excited.sites()?;
    let target = crate::bethe::allowed_quantum_numbers(n, m_exc)[c + 1];
    let nu = |l: f64| {
        (sites.iter().map(|&s| theta(l - s, 0.5)).sum::<f64>() - ex.roots.iter().map(|&r| theta(l - r, 1.0)).sum::<f64>()) / PI
            - target
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while nu(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoConvergence { what: "hole rapidity bracket".into(), iterations: 0 });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nu(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lh = 0.5 * (lo + hi);
    let gap = (e_ex - e_gs) / 2.0 / (PI * lh).cosh();
    Ok(FiniteSpinon { n, ground_energy: e_gs, excited_energy: e_ex, hole_rapidity: lh, gap, max_residual: gs.residual.max(ex.residual) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapExtrapolation {
    pub samples: Vec<FiniteSpinon>,
    pub fit: AffineFit,
    /// Extrapolated gap over `2Λe^{−πb}`.
    pub ratio: f64,
}

/// Linear extrapolation of the finite-N gap in `1/N`.
pub fn extrapolate_spinon_gap(sizes: &[usize], inv_g: f64, cutoff: f64) -> Result<GapExtrapolation> {
    if sizes.len() < 2 {
        return Err(Error::domain("extrapolation needs at least two sizes"));
    }
    let samples: Vec<FiniteSpinon> = sizes.iter().map(|&n| finite_spinon_gap(n, inv_g, cutoff)).collect::<Result<_>>()?;
    let x: Vec<f64> = sizes.iter().map(|&n| 1.0 / n as f64).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.gap).collect();
    let fit = affine_fit(&x, &y);
    let ratio = fit.intercept / (2.0 * cutoff * (-PI * inv_g).exp());
    Ok(GapExtrapolation { samples, fit, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassGap {
    pub t: f64,
    pub g_t: f64,
    pub m_t: f64,
    pub cutoff: f64,
    pub m0: f64,
    pub t0: f64,
}

/// `m(t) = 2Λe^{−π/g(t)}`, with `t0 = β/(2α0)` and `m0 = 2Λe^{−πα0 t0}`.
pub fn mass_gap(model: &CouplingModel, t: f64, cutoff: f64, alpha0: f64, convention: Convention) -> Result<MassGap> {
    if !(cutoff > 0.0) || alpha0 == 0.0 {
        return Err(Error::domain(format!("need Λ > 0 and α0 ≠ 0, got Λ = {cutoff}, α0 = {alpha0}")));
    }
    let g_t = g_of_t(model, t, convention)?;
    let m_t = 2.0 * cutoff * (-PI / g_t).exp();
    let t0 = model.beta / (2.0 * alpha0);
    let m0 = 2.0 * cutoff * (-PI * alpha0 * t0).exp();
    Ok(MassGap { t, g_t, m_t, cutoff, m0, t0 })
}

/// Affine fit of `ln m(t)` against `t`.
pub fn gap_decay_fit(model: &CouplingModel, cutoff: f64, t_grid: &[f64], convention: Convention) -> Result<AffineFit> {
    if t_grid.len() < 2 {
        return Err(Error::domain("decay fit needs at least two times"));
    }
    let mut lm = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let g = g_of_t(model, t, convention)?;
        lm.push((2.0 * cutoff).ln() - PI / g);
    }
    Ok(affine_fit(t_grid, &lm))
}
