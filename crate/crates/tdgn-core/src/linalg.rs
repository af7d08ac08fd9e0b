//! Small dense matrices: complex operators and a real LU factorization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        CMat::from_fn(rows, columns.len(), |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::zero() {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    fn zip_with(&self, rhs: &CMat, f: impl Fn(C64, C64) -> C64) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn commutator(&self, rhs: &CMat) -> CMat {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `max |U U^† - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.matmul(&self.adjoint()).sub(&CMat::identity(self.rows)).max_norm()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Distance between two rays: both vectors are normalized and the phase of
/// `b` is aligned to `a` at the largest component of `a`.
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { f64::INFINITY };
    }
    let k = (0..a.len())
        .max_by(|&i, &j| a[i].norm_sqr().total_cmp(&a[j].norm_sqr()))
        .unwrap_or(0);
    let ratio = (a[k] / na) / (b[k] / nb);
    let phase = if ratio.norm() == 0.0 { C64::new(1.0, 0.0) } else { ratio / ratio.norm() };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / na - phase * y / nb).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    n: usize,
    data: Vec<f64>,
}

impl RMat {
    pub fn zeros(n: usize) -> Self {
        RMat { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        RMat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.data[r * self.n..(r + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self[(r, c)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for RMat {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for RMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct RealLu {
    lu: RMat,
    perm: Vec<usize>,
    norm1: f64,
}

impl RealLu {
    pub fn factor(a: RMat) -> Result<Self> {
        let n = a.n;
        let norm1 = a.norm1();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
                .unwrap_or(k);
            let pivot = lu[(p, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::IllConditioned {
                    what: format!("zero pivot in column {k}"),
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for c in 0..n {
                    lu.data.swap(p * n + c, k * n + c);
                }
                perm.swap(p, k);
            }
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let krow = &head[k * n..(k + 1) * n];
            for r in 0..(n - k - 1) {
                let row = &mut tail[r * n..(r + 1) * n];
                let f = row[k] / pivot;
                row[k] = f;
                if f != 0.0 {
                    for c in (k + 1)..n {
                        row[c] -= f * krow[c];
                    }
                }
            }
        }
        Ok(RealLu { lu, perm, norm1 })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let s: f64 = (0..r).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let s: f64 = ((r + 1)..n).map(|c| self.lu[(r, c)] * x[c]).sum();
            x[r] = (x[r] - s) / self.lu[(r, r)];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut y = b.to_vec();
        for r in 0..n {
            let s: f64 = (0..r).map(|c| self.lu[(c, r)] * y[c]).sum();
            y[r] = (y[r] - s) / self.lu[(r, r)];
        }
        for r in (0..n).rev() {
            let s: f64 = ((r + 1)..n).map(|c| self.lu[(c, r)] * y[c]).sum();
            y[r] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// Hager's estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.lu.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let new_est: f64 = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            est = new_est;
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        est * self.norm1
    }
}

/// Factors, checks the condition estimate against `max_condition` and solves.
pub fn solve_real(a: RMat, b: &[f64], max_condition: f64) -> Result<(Vec<f64>, f64)> {
    let lu = RealLu::factor(a)?;
    let cond = lu.condition_estimate();
    if !(cond <= max_condition) {
        return Err(Error::IllConditioned { what: "dense solve".into(), condition: cond });
    }
    Ok((lu.solve(b), cond))
}

/// Ordinary least squares `y = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub intercept: f64,
    pub slope: f64,
    pub max_abs_residual: f64,
    /// `max_abs_residual` divided by the spread `max y - min y`.
    pub rel_residual: f64,
}

pub fn affine_fit(x: &[f64], y: &[f64]) -> AffineFit {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let max_abs_residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - ym - slope * (a - xm)).abs())
        .fold(0.0, f64::max);
    let spread = y.iter().cloned().fold(f64::MIN, f64::max) - y.iter().cloned().fold(f64::MAX, f64::min);
    let rel_residual = if spread > 0.0 { max_abs_residual / spread } else { max_abs_residual };
    AffineFit { intercept, slope, max_abs_residual, rel_residual }
}
