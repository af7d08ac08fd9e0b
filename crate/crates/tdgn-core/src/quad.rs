//! Quadrature rules: Gauss-Legendre panels and uniform trapezoid grids.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{c64, C64};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: &F, a: f64, b: f64) -> C64 {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = C64::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + h * x) * *w;
        }
        acc * h
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| f(mid + h * x) * w).sum::<f64>() * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// `e^z − 1` without cancellation for small `z`.
pub fn cexpm1(z: C64) -> C64 {
    let (s, c) = (z.im.sin(), z.im.cos());
    let half = (0.5 * z.im).sin();
    c64(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// `∫₀^{xmax} f(x) dx` for integrands that are smooth but possibly oscillating
/// with angular frequency up to `freq`; nodes never touch `x = 0`.
///
/// Geometric panels `[2^{-k-1}, 2^{-k}]` cover `(0, 1]`, uniform panels the rest.
pub fn integrate_half_line<F: Fn(f64) -> C64>(f: &F, xmax: f64, panels_per_unit: usize, freq: f64) -> C64 {
    let gl = GaussLegendre::new(16);
    let mut acc = C64::zero();
    let mut hi = 1.0f64.min(xmax);
    for _ in 0..48 {
        let lo = 0.5 * hi;
        acc += gl.integrate(f, lo, hi);
        hi = lo;
    }
    acc += gl.integrate(f, 0.0, hi);
    if xmax > 1.0 {
        let per_unit = (panels_per_unit as f64).max(freq / 2.0).max(1.0);
        let n = ((xmax - 1.0) * per_unit).ceil() as usize;
        let h = (xmax - 1.0) / n as f64;
        for k in 0..n {
            let a = 1.0 + h * k as f64;
            acc += gl.integrate(f, a, a + h);
        }
    }
    acc
}

/// Uniform grid on `[-half_width, half_width]` with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapezoidGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub step: f64,
}

impl TrapezoidGrid {
    pub fn symmetric(half_width: f64, n_nodes: usize) -> Self {
        assert!(n_nodes >= 2);
        let step = 2.0 * half_width / (n_nodes - 1) as f64;
        let nodes = (0..n_nodes).map(|i| -half_width + step * i as f64).collect();
        let mut weights = vec![step; n_nodes];
        weights[0] = 0.5 * step;
        weights[n_nodes - 1] = 0.5 * step;
        TrapezoidGrid { nodes, weights, step }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}
