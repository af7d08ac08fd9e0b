//! Coupling model, S-matrices, RG trajectory and regime classification.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::{affine_fit, AffineFit};
use crate::spin::{ip_combination, op4_scale, r_matrix, Op4};
use crate::{c64, Error, Result, C64};

/// Upper end of the exact coupling branch, the positive root of `1 − 3g²/4`.
pub const G_BRANCH_MAX: f64 = 1.154_700_538_379_251_5;

/// Drive `c(t) = α t + β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingModel {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Invert `c_of_g(g) = αt + β` on `0 < g < 2/√3`.
    Exact,
    /// `g = 1/(4(αt + β/2))`.
    Universal,
}

impl CouplingModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("need β > 0 and finite α, got α = {alpha}, β = {beta}")));
        }
        Ok(CouplingModel { alpha, beta })
    }

    pub fn c(&self, t: f64) -> f64 {
        self.alpha * t + self.beta
    }

    pub fn g(&self, t: f64, convention: Convention) -> Result<f64> {
        g_of_t(self, t, convention)
    }

    /// Checks `g > 0` at both ends of `[t0, t1]`.
    pub fn check_window(&self, t0: f64, t1: f64, convention: Convention) -> Result<()> {
        for t in [t0, t1] {
            let g = self.g(t, convention)?;
            if !(g > 0.0) {
                return Err(Error::domain(format!("g({t}) = {g} is not positive")));
            }
        }
        Ok(())
    }
}

pub fn c_of_g(g: f64) -> Result<f64> {
    if g == 0.0 {
        return Err(Error::domain("c_of_g at g = 0"));
    }
    Ok((1.0 - 0.75 * g * g) / (2.0 * g))
}

/// The positive root of `c_of_g(g) = c`, valid for every real `c`.
pub fn positive_g_of_c(c: f64) -> f64 {
    let root = (4.0 * c * c + 3.0).sqrt();
    if c >= 0.0 {
        2.0 / (root + 2.0 * c)
    } else {
        (root - 2.0 * c) / 1.5
    }
}

/// Inverse of `c_of_g` on the exact branch `0 < g < 2/√3`.
pub fn invert_c(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("c = {c} has no root on 0 < g < 2/√3")));
    }
    Ok(positive_g_of_c(c))
}

pub fn g_of_t(model: &CouplingModel, t: f64, convention: Convention) -> Result<f64> {
    match convention {
        Convention::Exact => invert_c(model.c(t)),
        Convention::Universal => {
            let d = 4.0 * (model.alpha * t + model.beta / 2.0);
            if !(d > 0.0) {
                return Err(Error::domain(format!("universal g not positive at t = {t}")));
            }
            Ok(1.0 / d)
        }
    }
}

pub fn phase_factor(g: f64) -> C64 {
    let q = 0.75 * g * g;
    c64(q - 1.0, 2.0 * g) / c64(-(1.0 + q), g)
}

/// Phase at drive value `c`, through the positive root `g(c)`.
pub fn phase_of_c(c: f64) -> C64 {
    phase_factor(positive_g_of_c(c))
}

/// `(i c I + P)/(i c + 1)`, the matrix part of every S-matrix.
pub fn s_matrix_part(c: f64) -> Op4 {
    let den = c64(1.0, c);
    ip_combination(c64(0.0, c) / den, c64(1.0, 0.0) / den)
}

/// How the mixed S-matrix turns `x = z̄ − z` into a drive value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedArgument {
    /// `c = α x + β`; consistent with the R-matrix relation.
    Full,
    /// `c = α x/2 + β`, the literal half-argument reading (kept as a witness).
    Half,
}

/// Mixed-chirality S-matrix `e^{iφ}(icI + P)/(ic + 1)` for right mover `z_j`, left mover `z̄_k`.
pub fn build_s_lr(z_j: f64, zbar_k: f64, model: &CouplingModel) -> Result<Op4> {
    build_s_lr_with(z_j, zbar_k, model, MixedArgument::Full)
}

pub fn build_s_lr_with(z_j: f64, zbar_k: f64, model: &CouplingModel, arg: MixedArgument) -> Result<Op4> {
    let x = zbar_k - z_j;
    let c = match arg {
        MixedArgument::Full => model.alpha * x + model.beta,
        MixedArgument::Half => model.alpha * x / 2.0 + model.beta,
    };
    if !c.is_finite() {
        return Err(Error::singular(format!("non-finite drive at x = {x}")));
    }
    Ok(op4_scale(&s_matrix_part(c), phase_of_c(c)))
}

/// Same-chirality S-matrix `(iα(z_k − z_j) I + P)/(iα(z_k − z_j) + 1)`.
pub fn build_s_same_chirality(z_j: f64, z_k: f64, alpha: f64) -> Result<Op4> {
    if alpha == 0.0 {
        return Err(Error::domain("α = 0"));
    }
    r_matrix(c64(z_k - z_j, 0.0), c64(1.0 / alpha, 0.0))
}

/// Instantaneous mixed S-matrix at coupling `g`.
pub fn build_s_instantaneous(g: f64) -> Result<Op4> {
    let c = c_of_g(g)?;
    Ok(op4_scale(&s_matrix_part(c), phase_factor(g)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub g: f64,
    pub dg_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgTrajectory {
    pub convention: Convention,
    pub points: Vec<TrajectoryPoint>,
    /// Slope of `ln|dg/dt|` against `ln g`.
    pub loglog_slope: f64,
    /// Mean of `−(dg/dt)/(α g²)`.
    pub kappa: f64,
}

/// Samples `g(t)` with centered-difference derivatives on the given grid.
pub fn rg_trajectory(model: &CouplingModel, t_grid: &[f64], convention: Convention) -> Result<RgTrajectory> {
    if t_grid.len() < 2 {
        return Err(Error::domain("trajectory grid needs at least two points"));
    }
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let h = 1e-4 * t.abs().max(1.0);
        let g = g_of_t(model, t, convention)?;
        let gp = g_of_t(model, t + h, convention)?;
        let gm = g_of_t(model, t - h, convention)?;
        points.push(TrajectoryPoint { t, g, dg_dt: (gp - gm) / (2.0 * h) });
    }
    let lx: Vec<f64> = points.iter().map(|p| p.g.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.dg_dt.abs().ln()).collect();
    let fit = affine_fit(&lx, &ly);
    let kappa = points.iter().map(|p| -p.dg_dt / (model.alpha * p.g * p.g)).sum::<f64>() / points.len() as f64;
    Ok(RgTrajectory { convention, points, loglog_slope: fit.slope, kappa })
}

/// Static running coupling `g(Λ) = π / ln(2Λ/m)`.
pub fn running_coupling(cutoff: f64, mass: f64) -> Result<f64> {
    let l = (2.0 * cutoff / mass).ln();
    if !(mass > 0.0) || !(l > 0.0) {
        return Err(Error::domain(format!("ln(2Λ/m) = {l} must be positive")));
    }
    Ok(core::f64::consts::PI / l)
}

/// Max deviation of the centered `dg/dlnΛ` from `−g²/π` over the cutoff grid.
pub fn static_flow_defect(mass: f64, cutoffs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &cut in cutoffs {
        let ll = cut.ln();
        let h = 1e-4;
        let gp = running_coupling((ll + h).exp(), mass)?;
        let gm = running_coupling((ll - h).exp(), mass)?;
        let g = running_coupling(cut, mass)?;
        let deriv = (gp - gm) / (2.0 * h);
        worst = worst.max((deriv + g * g / core::f64::consts::PI).abs() / (g * g / core::f64::consts::PI));
    }
    Ok(worst)
}

/// Fits `ln Λ(t)` defined by `g_static(Λ) = g(t)` against `t`.
pub fn identify_time_with_log_cutoff(
    model: &CouplingModel,
    mass: f64,
    t_grid: &[f64],
    convention: Convention,
) -> Result<AffineFit> {
    let mut log_cutoff = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let g = g_of_t(model, t, convention)?;
        log_cutoff.push(core::f64::consts::PI / g + mass.ln() - core::f64::consts::LN_2);
    }
    Ok(affine_fit(t_grid, &log_cutoff))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Adiabatic,
    Intermediate,
    FastDriving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub alpha0: f64,
    pub window_fraction: f64,
    pub rate_band: (f64, f64),
    pub fast_ratio: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { alpha0: 1.0, window_fraction: 0.2, rate_band: (0.5, 2.0), fast_ratio: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub t0: f64,
    pub regime: Regime,
    pub drive_ratio: f64,
    pub gap_at_t: f64,
}

/// `t0 = ln(2Λ/m0)/(π α0)`.
pub fn characteristic_time(cutoff: f64, m0: f64, alpha0: f64) -> Result<f64> {
    if !(m0 > 0.0) || !(cutoff > m0 / 2.0) {
        return Err(Error::domain(format!("need Λ > m0/2 > 0, got Λ = {cutoff}, m0 = {m0}")));
    }
    if alpha0 == 0.0 {
        return Err(Error::domain("α0 = 0"));
    }
    Ok((2.0 * cutoff / m0).ln() / (core::f64::consts::PI * alpha0))
}

pub fn classify_regime(
    model: &CouplingModel,
    t: f64,
    cutoff: f64,
    m0: f64,
    th: &RegimeThresholds,
) -> Result<RegimeReport> {
    let t0 = characteristic_time(cutoff, m0, th.alpha0)?;
    let rate = model.alpha / th.alpha0;
    let drive_ratio = model.alpha * t / (th.alpha0 * t0);
    let regime = if (t - t0).abs() <= th.window_fraction * t0 && rate >= th.rate_band.0 && rate <= th.rate_band.1 {
        Regime::Adiabatic
    } else if drive_ratio >= th.fast_ratio {
        Regime::FastDriving
    } else {
        Regime::Intermediate
    };
    let g = g_of_t(model, t, Convention::Exact)?;
    let gap_at_t = 2.0 * cutoff * (-core::f64::consts::PI / g).exp();
    Ok(RegimeReport { t0, regime, drive_ratio, gap_at_t })
}
