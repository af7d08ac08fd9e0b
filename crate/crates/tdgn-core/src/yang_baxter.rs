//! Verifiers for the Yang-Baxter families, transport compatibility and
//! transfer-matrix commutation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bethe::build_transfer_matrix;
use crate::linalg::CMat;
use crate::scattering::{
    build_s_instantaneous, build_s_lr_with, build_s_same_chirality, phase_of_c, CouplingModel, MixedArgument,
};
use crate::spin::{embed_two_site, permutation4, r_matrix, GateProduct, Op4};
use crate::{c64, Error, Result, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    YbMixed1,
    YbMixed2,
    YbSameChirality,
    YbSameChiralityLeft,
    YbInstantaneous,
    TransportCompat,
    TransferCommute,
    TransferUnequalTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub samples: usize,
    pub params: BTreeMap<String, f64>,
}

impl IdentityReport {
    fn single(identity_id: IdentityId, residual: f64, params: &[(&str, f64)]) -> Self {
        IdentityReport {
            identity_id,
            residual,
            tolerance: DEFAULT_TOLERANCE,
            pass: residual <= DEFAULT_TOLERANCE,
            seed: None,
            samples: 1,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.pass = self.residual <= tol;
        self
    }

    /// For witnesses that must fail: pass iff residual is at least `floor`.
    pub fn expect_at_least(mut self, floor: f64) -> Self {
        self.tolerance = floor;
        self.pass = self.residual >= floor;
        self
    }
}

fn triple_residual(lhs: [(&Op4, usize, usize); 3], rhs: [(&Op4, usize, usize); 3]) -> Result<f64> {
    let prod = |ops: [(&Op4, usize, usize); 3]| -> Result<CMat> {
        let mut acc = CMat::identity(8);
        for (op, i, j) in ops {
            acc = acc.matmul(&embed_two_site(op, i, j, 3)?.mat);
        }
        Ok(acc)
    };
    Ok(prod(lhs)?.sub(&prod(rhs)?).max_norm())
}

/// `S^{ij} S^{ik} S'^{jk} = S'^{jk} S^{ik} S^{ij}`, right mover `i`, left movers `j`, `k`.
pub fn check_yb_mixed(z_i: f64, zb_j: f64, zb_k: f64, model: &CouplingModel) -> Result<IdentityReport> {
    check_yb_mixed_with(z_i, zb_j, zb_k, model, MixedArgument::Full)
}

pub fn check_yb_mixed_with(
    z_i: f64,
    zb_j: f64,
    zb_k: f64,
    model: &CouplingModel,
    arg: MixedArgument,
) -> Result<IdentityReport> {
    let s_ij = build_s_lr_with(z_i, zb_j, model, arg)?;
    let s_ik = build_s_lr_with(z_i, zb_k, model, arg)?;
    let s_jk = build_s_same_chirality(zb_j, zb_k, model.alpha)?;
    let r = triple_residual([(&s_ij, 0, 1), (&s_ik, 0, 2), (&s_jk, 1, 2)], [(&s_jk, 1, 2), (&s_ik, 0, 2), (&s_ij, 0, 1)])?;
    Ok(IdentityReport::single(IdentityId::YbMixed1, r, &[("z_i", z_i), ("zbar_j", zb_j), ("zbar_k", zb_k)]))
}

/// `S^{ik} S^{jk} S'^{ji} = S'^{ji} S^{jk} S^{ik}`, right movers `i`, `j`, left mover `k`.
pub fn check_yb_mixed_2(z_i: f64, z_j: f64, zb_k: f64, model: &CouplingModel) -> Result<IdentityReport> {
    let s_ik = build_s_lr_with(z_i, zb_k, model, MixedArgument::Full)?;
    let s_jk = build_s_lr_with(z_j, zb_k, model, MixedArgument::Full)?;
    let s_ji = build_s_same_chirality(z_j, z_i, model.alpha)?;
    let r = triple_residual([(&s_ik, 0, 2), (&s_jk, 1, 2), (&s_ji, 1, 0)], [(&s_ji, 1, 0), (&s_jk, 1, 2), (&s_ik, 0, 2)])?;
    Ok(IdentityReport::single(IdentityId::YbMixed2, r, &[("z_i", z_i), ("z_j", z_j), ("zbar_k", zb_k)]))
}

/// `S'^{ij} S'^{ik} S'^{jk} = S'^{jk} S'^{ik} S'^{ij}` for three particles of one chirality.
pub fn check_yb_same(z_i: f64, z_j: f64, z_k: f64, alpha: f64) -> Result<IdentityReport> {
    let s_ij = build_s_same_chirality(z_i, z_j, alpha)?;
    let s_ik = build_s_same_chirality(z_i, z_k, alpha)?;
    let s_jk = build_s_same_chirality(z_j, z_k, alpha)?;
    let r = triple_residual([(&s_ij, 0, 1), (&s_ik, 0, 2), (&s_jk, 1, 2)], [(&s_jk, 1, 2), (&s_ik, 0, 2), (&s_ij, 0, 1)])?;
    Ok(IdentityReport::single(IdentityId::YbSameChirality, r, &[("z_i", z_i), ("z_j", z_j), ("z_k", z_k), ("alpha", alpha)]))
}

/// Instantaneous family: right movers `a`, `b` and left mover `c`,
/// `S_I^{ac} S_I^{bc} P^{ab} = P^{ab} S_I^{bc} S_I^{ac}`.
pub fn check_yb_instantaneous(g: f64) -> Result<IdentityReport> {
    let s = build_s_instantaneous(g)?;
    let p = permutation4();
    let r = triple_residual([(&s, 0, 2), (&s, 1, 2), (&p, 0, 1)], [(&p, 0, 1), (&s, 1, 2), (&s, 0, 2)])?;
    Ok(IdentityReport::single(IdentityId::YbInstantaneous, r, &[("g", g)]))
}

/// Seeded sweep of all four Yang-Baxter families; one report per family
/// carrying the worst residual and its arguments.
pub fn yb_sweep(model: &CouplingModel, samples: usize, seed: u64, tolerance: f64) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: BTreeMap<IdentityId, IdentityReport> = BTreeMap::new();
    let mut keep = |rep: IdentityReport| {
        let e = worst.entry(rep.identity_id).or_insert_with(|| rep.clone());
        if rep.residual > e.residual {
            *e = rep;
        }
    };
    for _ in 0..samples {
        let mut draw = || rng.gen_range(-3.0..3.0);
        let (a, b, c) = (draw(), draw(), draw());
        keep(check_yb_mixed(a, b, c, model)?);
        let (a, b, c) = (draw(), draw(), draw());
        keep(check_yb_mixed_2(a, b, c, model)?);
        let (a, b, c) = (draw(), draw(), draw());
        keep(check_yb_same(a, b, c, model.alpha)?);
        let (a, b, c) = (draw(), draw(), draw());
        let mut left = check_yb_same(a, b, c, model.alpha)?;
        left.identity_id = IdentityId::YbSameChiralityLeft;
        keep(left);
        let g = rng.gen_range(0.02..1.1);
        keep(check_yb_instantaneous(g)?);
    }
    Ok(worst
        .into_values()
        .map(|mut r| {
            r.seed = Some(seed);
            r.samples = samples;
            r.with_tolerance(tolerance)
        })
        .collect())
}

/// Product of R-matrices carrying particle `j` once around the ring:
/// `R^{j,j+1}(θ_{j+1} + p − θ_j) … R^{j,N}(θ_N + p − θ_j) R^{j,1}(θ_1 − θ_j) … R^{j,j−1}(θ_{j−1} − θ_j)`.
pub fn cyclic_transport(j: usize, thetas: &[C64], period: C64, eta: C64) -> Result<GateProduct> {
    let n = thetas.len();
    if j >= n {
        return Err(Error::domain(format!("particle {j} out of range for {n}")));
    }
    let mut prod = GateProduct::new(n);
    for m in (j + 1)..n {
        prod.push(r_matrix(thetas[m] + period - thetas[j], eta)?, j, m)?;
    }
    for m in 0..j {
        prod.push(r_matrix(thetas[m] - thetas[j], eta)?, j, m)?;
    }
    Ok(prod)
}

/// Physical coordinates for the transport operators. Particles `0..N_L` are left movers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportFrame {
    pub length: f64,
    pub zbar: Vec<f64>,
    pub z: Vec<f64>,
    pub model: CouplingModel,
}

impl TransportFrame {
    pub fn n_left(&self) -> usize {
        self.zbar.len()
    }

    pub fn n(&self) -> usize {
        self.zbar.len() + self.z.len()
    }

    /// `θ = z̄ + β/(2α)` for left movers, `z − β/(2α)` for right movers.
    pub fn thetas(&self) -> Vec<f64> {
        let s = self.model.beta / (2.0 * self.model.alpha);
        self.zbar.iter().map(|x| x + s).chain(self.z.iter().map(|x| x - s)).collect()
    }

    /// Phase-stripped `Z_j` and its scalar phase, with particle `shift` moved by `−L`.
    pub fn transport(&self, j: usize, shift: Option<usize>) -> Result<(GateProduct, C64)> {
        let mut th = self.thetas();
        if let Some(k) = shift {
            th[k] -= self.length;
        }
        let eta = c64(1.0 / self.model.alpha, 0.0);
        let thc: Vec<C64> = th.iter().map(|x| c64(*x, 0.0)).collect();
        let prod = cyclic_transport(j, &thc, c64(self.length, 0.0), eta)?;
        let nl = self.n_left();
        let sign = if j >= nl { 1.0 } else { -1.0 };
        let mut phase = c64(1.0, 0.0);
        for m in 0..self.n() {
            if m == j || (m < nl) == (j < nl) {
                continue;
            }
            let wrap = if m > j { self.length } else { 0.0 };
            let x = th[m] + wrap - th[j];
            phase *= phase_of_c(sign * self.model.alpha * x);
        }
        Ok((prod, phase))
    }
}

/// `Z_j(.., z_k − L, ..) Z_k − Z_k(.., z_j − L, ..) Z_j` on phase-stripped operators;
/// the scalar phase mismatch is recorded as `phase_defect`.
pub fn check_transport_compat(frame: &TransportFrame, j: usize, k: usize) -> Result<IdentityReport> {
    let n = frame.n();
    if n > 8 {
        return Err(Error::Capacity(format!("transport check on {n} > 8 particles")));
    }
    if j == k || j >= n || k >= n {
        return Err(Error::domain(format!("invalid particle pair ({j}, {k})")));
    }
    let (zj_s, pj_s) = frame.transport(j, Some(k))?;
    let (zk, pk) = frame.transport(k, None)?;
    let (zk_s, pk_s) = frame.transport(k, Some(j))?;
    let (zj, pj) = frame.transport(j, None)?;
    let lhs = zj_s.to_operator().compose(&zk.to_operator());
    let rhs = zk_s.to_operator().compose(&zj.to_operator());
    let residual = lhs.mat.sub(&rhs.mat).max_norm();
    let phase_defect = (pj_s * pk - pk_s * pj).norm();
    Ok(IdentityReport::single(
        IdentityId::TransportCompat,
        residual,
        &[
            ("j", j as f64),
            ("k", k as f64),
            ("n_left", frame.n_left() as f64),
            ("n_right", frame.z.len() as f64),
            ("phase_defect", phase_defect),
        ],
    ))
}

/// Seeded sweep over all particle pairs of random frames.
pub fn transport_sweep(
    n_left: usize,
    n_right: usize,
    model: &CouplingModel,
    length: f64,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_left + n_right;
    let mut worst: Option<IdentityReport> = None;
    for _ in 0..samples {
        let frame = TransportFrame {
            length,
            zbar: (0..n_left).map(|_| rng.gen_range(0.0..length)).collect(),
            z: (0..n_right).map(|_| rng.gen_range(0.0..length)).collect(),
            model: *model,
        };
        for j in 0..n {
            for k in (j + 1)..n {
                let rep = check_transport_compat(&frame, j, k)?;
                if worst.as_ref().is_none_or(|w| rep.residual > w.residual) {
                    worst = Some(rep);
                }
            }
        }
    }
    let mut rep = worst.ok_or_else(|| Error::domain("transport sweep needs two particles"))?;
    rep.seed = Some(seed);
    rep.samples = samples;
    Ok(rep.with_tolerance(tolerance))
}

/// `max_{i<j} ‖[Z_i(t), Z_j(t')]‖` over right movers; `t' = t` is the commutation identity.
pub fn check_transfer_commute(
    t: f64,
    t_other: f64,
    n_left: usize,
    n_right: usize,
    model: &CouplingModel,
) -> Result<IdentityReport> {
    let n = n_left + n_right;
    if n > 10 {
        return Err(Error::Capacity(format!("{n} > 10 particles")));
    }
    let mut worst: f64 = 0.0;
    for i in n_left..n {
        for j in n_left..n {
            if i == j {
                continue;
            }
            let zi = build_transfer_matrix(t, i, n_left, n_right, model)?;
            let zj = build_transfer_matrix(t_other, j, n_left, n_right, model)?;
            worst = worst.max(zi.commutator_norm(&zj));
        }
    }
    let id = if t == t_other { IdentityId::TransferCommute } else { IdentityId::TransferUnequalTime };
    Ok(IdentityReport::single(
        id,
        worst,
        &[("t", t), ("t_other", t_other), ("n_left", n_left as f64), ("n_right", n_right as f64)],
    ))
}
