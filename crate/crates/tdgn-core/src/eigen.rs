//! Dense complex eigen-decomposition: Householder Hessenberg reduction,
//! shifted QR to Schur form, eigenvectors by back substitution.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{vec_norm, CMat};
use crate::spin::{SpinOperator, SpinVector};
use crate::{c64, Error, Result, C64};

pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: C64,
    pub vector: SpinVector,
    /// `‖A v − μ v‖₂` for the unit-norm `v`.
    pub residual: f64,
}

/// Eigenpairs of a spin operator, each with its residual.
pub fn eigen_decompose(op: &SpinOperator) -> Result<Vec<EigenPair>> {
    let pairs = eigen_dense(&op.mat)?;
    Ok(pairs
        .into_iter()
        .map(|(value, amps, residual)| EigenPair {
            value,
            vector: SpinVector { n_sites: op.n_sites, amps },
            residual,
        })
        .collect())
}

/// Eigenvalues only.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let (t, _) = schur(a, false)?;
    Ok((0..t.rows()).map(|i| t[(i, i)]).collect())
}

/// `(value, unit vector, residual)` triples for a square matrix.
pub fn eigen_dense(a: &CMat) -> Result<Vec<(C64, Vec<C64>, f64)>> {
    let n = a.rows();
    let (t, z) = schur(a, true)?;
    let z = z.expect("schur vectors requested");
    let tnorm = t.max_norm().max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * tnorm;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mu = t[(k, k)];
        let mut y = vec![C64::zero(); n];
        y[k] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = ((i + 1)..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - mu;
            if d.norm() < floor {
                d = if d.norm() == 0.0 { c64(floor, 0.0) } else { d * (floor / d.norm()) };
            }
            y[i] = -s / d;
        }
        let mut v = z.matvec(&y);
        let nv = vec_norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let av = a.matvec(&v);
        let residual = vec_norm(&av.iter().zip(&v).map(|(p, q)| p - mu * q).collect::<Vec<_>>());
        out.push((mu, v, residual));
    }
    Ok(out)
}

fn householder_hessenberg(a: &mut CMat, q: &mut Option<CMat>) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|r| a[(r, k)]).collect();
        let alpha = vec_norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { c64(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= vn);
        // A <- (I - 2vv^H) A (I - 2vv^H) on the trailing block.
        for c in 0..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * a[(k + 1 + i, c)]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, c)] -= vi * s * 2.0;
            }
        }
        for r in 0..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| a[(r, k + 1 + i)] * vi).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(r, k + 1 + i)] -= s * vi.conj() * 2.0;
            }
        }
        if let Some(qm) = q.as_mut() {
            for r in 0..n {
                let s: C64 = v.iter().enumerate().map(|(i, vi)| qm[(r, k + 1 + i)] * vi).sum();
                for (i, vi) in v.iter().enumerate() {
                    qm[(r, k + 1 + i)] -= s * vi.conj() * 2.0;
                }
            }
        }
        for r in (k + 2)..n {
            a[(r, k)] = C64::zero();
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur form `A = Z T Z^H`.
fn schur(a: &CMat, want_vectors: bool) -> Result<(CMat, Option<CMat>)> {
    if !a.is_square() {
        return Err(Error::domain("eigen-decomposition needs a square matrix"));
    }
    let n = a.rows();
    if n > MAX_DIM {
        return Err(Error::Capacity(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let mut h = a.clone();
    let mut z = if want_vectors { Some(CMat::identity(n)) } else { None };
    if n == 0 {
        return Ok((h, z));
    }
    householder_hessenberg(&mut h, &mut z);

    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(4);
    let mut rot: Vec<(C64, C64)> = Vec::with_capacity(n);
    while hi > 0 {
        // deflation scan
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= eps * scale {
                h[(lo, lo - 1)] = C64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence { what: "shifted QR".into(), iterations: total });
        }
        let mu = if iter % 11 == 10 {
            h[(hi, hi)] + c64(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        rot.clear();
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (c64(1.0, 0.0), C64::zero()) } else { (x / r, y / r) };
            rot.push((c, s));
            for col in k..n {
                let p = h[(k, col)];
                let q = h[(k + 1, col)];
                h[(k, col)] = c.conj() * p + s.conj() * q;
                h[(k + 1, col)] = -s * p + c * q;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for row in 0..=top {
                let p = h[(row, k)];
                let q = h[(row, k + 1)];
                h[(row, k)] = c * p + s * q;
                h[(row, k + 1)] = -s.conj() * p + c.conj() * q;
            }
            if let Some(zm) = z.as_mut() {
                for row in 0..n {
                    let p = zm[(row, k)];
                    let q = zm[(row, k + 1)];
                    zm[(row, k)] = c * p + s * q;
                    zm[(row, k + 1)] = -s.conj() * p + c.conj() * q;
                }
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = C64::zero();
        }
    }
    Ok((h, z))
}
