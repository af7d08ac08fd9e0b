//! Spin-1/2 tensor-product space: two-site gates, R-matrices, monodromy.
//!
//! Basis convention: site 0 is the most significant bit of the basis index and
//! bit value 0 is spin up, so the reference state |Ω⟩ is basis index 0.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{vec_norm, CMat};
use crate::{c64, Error, Result, C64};

/// Largest supported chain; 2^12 = 4096 is the dense-operator guard.
pub const MAX_SITES: usize = 12;

/// Operator on an ordered pair of sites, index `a * 2 + b` for spins (a, b).
pub type Op4 = [[C64; 4]; 4];

pub fn identity4() -> Op4 {
    let mut m = [[C64::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c64(1.0, 0.0);
    }
    m
}

pub fn permutation4() -> Op4 {
    let mut m = [[C64::zero(); 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            m[a * 2 + b][b * 2 + a] = c64(1.0, 0.0);
        }
    }
    m
}

/// `x I + y P`.
pub fn ip_combination(x: C64, y: C64) -> Op4 {
    let (id, p) = (identity4(), permutation4());
    let mut m = [[C64::zero(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = x * id[r][c] + y * p[r][c];
        }
    }
    m
}

pub fn op4_scale(m: &Op4, s: C64) -> Op4 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|z| *z *= s);
    out
}

pub fn op4_mul(a: &Op4, b: &Op4) -> Op4 {
    let mut out = [[C64::zero(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn op4_to_cmat(m: &Op4) -> CMat {
    CMat::from_fn(4, 4, |r, c| m[r][c])
}

pub fn op4_max_diff(a: &Op4, b: &Op4) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// XXX R-matrix in crossing form, `(λ I − iη P)/(λ − iη)`.
pub fn r_matrix(lambda: C64, eta: C64) -> Result<Op4> {
    let den = lambda - C64::i() * eta;
    if den.norm() < 1e-300 {
        return Err(Error::singular(format!("R-matrix pole at λ = iη = {lambda}")));
    }
    Ok(ip_combination(lambda / den, -C64::i() * eta / den))
}

/// `(iλ I + P/α)/(iλ + 1/α)`; equals `r_matrix(λ, 1/α)`.
pub fn build_r_matrix(lambda: C64, alpha: f64) -> Result<Op4> {
    if alpha == 0.0 {
        return Err(Error::domain("α = 0"));
    }
    let inv = 1.0 / alpha;
    let den = C64::i() * lambda + inv;
    if den.norm() < 1e-300 {
        return Err(Error::singular(format!("iλ = −1/α at λ = {lambda}")));
    }
    Ok(ip_combination(C64::i() * lambda / den, c64(inv, 0.0) / den))
}

fn check_sites(i: usize, j: usize, n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::Capacity(format!("{n} sites (max {MAX_SITES})")));
    }
    if i == j || i >= n || j >= n {
        return Err(Error::domain(format!("invalid site pair ({i}, {j}) on {n} sites")));
    }
    Ok(())
}

#[inline]
fn site_bit(site: usize, n: usize) -> usize {
    1 << (n - 1 - site)
}

/// Applies `op4` on the ordered site pair `(i, j)` in place.
pub fn apply_two_site(op: &Op4, i: usize, j: usize, n: usize, amps: &mut [C64]) {
    debug_assert!(i != j && i < n && j < n && amps.len() == 1 << n);
    let bi = site_bit(i, n);
    let bj = site_bit(j, n);
    let mask = bi | bj;
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        let idx = [base, base | bj, base | bi, base | bi | bj];
        let old = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &k) in idx.iter().enumerate() {
            amps[k] = op[r][0] * old[0] + op[r][1] * old[1] + op[r][2] * old[2] + op[r][3] * old[3];
        }
    }
}

/// Dense operator on `n_sites` spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinOperator {
    pub n_sites: usize,
    pub mat: CMat,
}

impl SpinOperator {
    pub fn new(n_sites: usize, mat: CMat) -> Result<Self> {
        let dim = 1usize << n_sites;
        if mat.rows() != dim || mat.cols() != dim {
            return Err(Error::domain(format!(
                "operator is {}x{}, expected {dim}x{dim}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(SpinOperator { n_sites, mat })
    }

    pub fn identity(n_sites: usize) -> Self {
        SpinOperator { n_sites, mat: CMat::identity(1 << n_sites) }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn apply(&self, v: &SpinVector) -> SpinVector {
        SpinVector { n_sites: self.n_sites, amps: self.mat.matvec(&v.amps) }
    }

    pub fn compose(&self, rhs: &SpinOperator) -> SpinOperator {
        SpinOperator { n_sites: self.n_sites, mat: self.mat.matmul(&rhs.mat) }
    }

    pub fn commutator_norm(&self, rhs: &SpinOperator) -> f64 {
        self.mat.commutator(&rhs.mat).max_norm()
    }

    /// Diagonal total `S^z`.
    pub fn total_sz(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut mat = CMat::zeros(dim, dim);
        for k in 0..dim {
            mat[(k, k)] = c64(total_sz_of_index(k, n_sites), 0.0);
        }
        SpinOperator { n_sites, mat }
    }

    /// Global spin flip `τ = ⊗ σ^x`.
    pub fn spin_flip(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut mat = CMat::zeros(dim, dim);
        for k in 0..dim {
            mat[((dim - 1) ^ k, k)] = c64(1.0, 0.0);
        }
        SpinOperator { n_sites, mat }
    }
}

pub fn total_sz_of_index(k: usize, n_sites: usize) -> f64 {
    n_sites as f64 / 2.0 - k.count_ones() as f64
}

/// Embeds a two-site operator on the ordered pair `(i, j)`; identity elsewhere.
pub fn embed_two_site(op: &Op4, i: usize, j: usize, n: usize) -> Result<SpinOperator> {
    check_sites(i, j, n)?;
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    let mut col = vec![C64::zero(); dim];
    for c in 0..dim {
        col.iter_mut().for_each(|z| *z = C64::zero());
        col[c] = c64(1.0, 0.0);
        apply_two_site(op, i, j, n, &mut col);
        for (r, z) in col.iter().enumerate() {
            if *z != C64::zero() {
                mat[(r, c)] = *z;
            }
        }
    }
    Ok(SpinOperator { n_sites: n, mat })
}

/// State vector on `n_sites` spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinVector {
    pub n_sites: usize,
    pub amps: Vec<C64>,
}

impl SpinVector {
    pub fn zeros(n_sites: usize) -> Self {
        SpinVector { n_sites, amps: vec![C64::zero(); 1 << n_sites] }
    }

    /// All spins up.
    pub fn reference(n_sites: usize) -> Self {
        let mut v = SpinVector::zeros(n_sites);
        v.amps[0] = c64(1.0, 0.0);
        v
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amps)
    }

    /// `S^z` if the vector lies in a single sector, else `None`.
    pub fn sz_sector(&self, tol: f64) -> Option<f64> {
        let scale = self.norm();
        let mut found: Option<f64> = None;
        for (k, z) in self.amps.iter().enumerate() {
            if z.norm() > tol * scale {
                let s = total_sz_of_index(k, self.n_sites);
                match found {
                    None => found = Some(s),
                    Some(t) if t != s => return None,
                    _ => {}
                }
            }
        }
        found
    }

    pub fn axpy(&mut self, a: C64, x: &SpinVector) {
        for (y, xv) in self.amps.iter_mut().zip(&x.amps) {
            *y += a * xv;
        }
    }
}

/// Ordered operator product `G_0 G_1 ... G_{k-1}` of two-site gates.
#[derive(Debug, Clone, PartialEq)]
pub struct GateProduct {
    pub n_sites: usize,
    pub gates: Vec<(Op4, usize, usize)>,
}

impl GateProduct {
    pub fn new(n_sites: usize) -> Self {
        GateProduct { n_sites, gates: Vec::new() }
    }

    /// Appends a factor on the right.
    pub fn push(&mut self, op: Op4, i: usize, j: usize) -> Result<()> {
        check_sites(i, j, self.n_sites)?;
        self.gates.push((op, i, j));
        Ok(())
    }

    pub fn apply_in_place(&self, amps: &mut [C64]) {
        for (op, i, j) in self.gates.iter().rev() {
            apply_two_site(op, *i, *j, self.n_sites, amps);
        }
    }

    pub fn apply(&self, v: &SpinVector) -> SpinVector {
        let mut out = v.clone();
        self.apply_in_place(&mut out.amps);
        out
    }

    pub fn to_operator(&self) -> SpinOperator {
        let dim = 1usize << self.n_sites;
        let mut cols = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut e = vec![C64::zero(); dim];
            e[c] = c64(1.0, 0.0);
            self.apply_in_place(&mut e);
            cols.push(e);
        }
        SpinOperator { n_sites: self.n_sites, mat: CMat::from_columns(dim, &cols) }
    }
}

/// Order of the site factors inside the monodromy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// `T = R_{0,N-1} ... R_{0,0}`.
    Descending,
    /// `T = R_{0,0} ... R_{0,N-1}`.
    Ascending,
}

/// Normalization of each R factor with argument `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `x I − iη P`.
    Polynomial,
    /// `(x I − iη P)/x`.
    Jackson,
    /// `(x I − iη P)/(x − iη)`, unitary for real arguments.
    Unitary,
}

/// Monodromy over an auxiliary site appended as the last (least significant) bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub inhomogeneities: Vec<C64>,
    pub eta: C64,
    pub ordering: Ordering,
    pub gauge: Gauge,
}

impl Monodromy {
    pub fn new(inhomogeneities: Vec<C64>, eta: C64, ordering: Ordering, gauge: Gauge) -> Self {
        Monodromy { inhomogeneities, eta, ordering, gauge }
    }

    pub fn n_sites(&self) -> usize {
        self.inhomogeneities.len()
    }

    fn factor(&self, x: C64) -> Result<Op4> {
        let ie = C64::i() * self.eta;
        let den = match self.gauge {
            Gauge::Polynomial => c64(1.0, 0.0),
            Gauge::Jackson => x,
            Gauge::Unitary => x - ie,
        };
        if den.norm() < 1e-300 {
            return Err(Error::singular(format!("monodromy factor pole at x = {x}")));
        }
        Ok(ip_combination(x / den, -ie / den))
    }

    /// The full product on `N + 1` sites.
    pub fn product(&self, u: C64) -> Result<GateProduct> {
        let n = self.n_sites();
        if n + 1 > MAX_SITES + 1 {
            return Err(Error::Capacity(format!("{n} sites")));
        }
        let mut prod = GateProduct::new(n + 1);
        let mut push = |k: usize| -> Result<()> {
            let f = self.factor(u - self.inhomogeneities[k])?;
            prod.push(f, n, k)
        };
        match self.ordering {
            Ordering::Descending => (0..n).rev().try_for_each(&mut push)?,
            Ordering::Ascending => (0..n).try_for_each(&mut push)?,
        }
        Ok(prod)
    }

    /// `B(u) v`: aux in |↓⟩, projected on aux ⟨↑|.
    pub fn apply_b(&self, u: C64, v: &SpinVector) -> Result<SpinVector> {
        self.apply_block(u, v, 1, 0)
    }

    fn apply_block(&self, u: C64, v: &SpinVector, aux_in: usize, aux_out: usize) -> Result<SpinVector> {
        let n = self.n_sites();
        if v.n_sites != n {
            return Err(Error::domain("vector/monodromy site mismatch"));
        }
        let prod = self.product(u)?;
        let mut ext = vec![C64::zero(); 1 << (n + 1)];
        for (r, a) in v.amps.iter().enumerate() {
            ext[2 * r + aux_in] = *a;
        }
        prod.apply_in_place(&mut ext);
        let amps = (0..(1usize << n)).map(|r| ext[2 * r + aux_out]).collect();
        Ok(SpinVector { n_sites: n, amps })
    }

    /// Dense spin-lowering block `B(u)`.
    pub fn b_operator(&self, u: C64) -> Result<SpinOperator> {
        self.block_operator(u, 1, 0)
    }

    /// Dense `A(u) + D(u)`.
    pub fn transfer(&self, u: C64) -> Result<SpinOperator> {
        let a = self.block_operator(u, 0, 0)?;
        let d = self.block_operator(u, 1, 1)?;
        Ok(SpinOperator { n_sites: a.n_sites, mat: a.mat.add(&d.mat) })
    }

    fn block_operator(&self, u: C64, aux_in: usize, aux_out: usize) -> Result<SpinOperator> {
        let n = self.n_sites();
        let dim = 1usize << n;
        let mut cols = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut e = SpinVector::zeros(n);
            e.amps[c] = c64(1.0, 0.0);
            cols.push(self.apply_block(u, &e, aux_in, aux_out)?.amps);
        }
        Ok(SpinOperator { n_sites: n, mat: CMat::from_columns(dim, &cols) })
    }
}

/// Dense `B(u)` from the descending monodromy in the Jackson gauge.
pub fn build_monodromy_b(u: C64, inhomogeneities: &[C64], eta: f64) -> Result<SpinOperator> {
    if inhomogeneities.is_empty() || inhomogeneities.len() > MAX_SITES {
        return Err(Error::Capacity(format!("{} sites", inhomogeneities.len())));
    }
    Monodromy::new(inhomogeneities.to_vec(), c64(eta, 0.0), Ordering::Descending, Gauge::Jackson)
        .b_operator(u)
}
