//! Principal-branch complex log-Gamma (Lanczos, g = 607/128) with reflection.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{c64, Error, Result, C64};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    4.652_362_892_704_858e-5,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

fn lanczos_right(z: C64) -> C64 {
    let x = z - 1.0;
    let mut a = c64(LANCZOS[0], 0.0);
    for (k, &ck) in LANCZOS.iter().enumerate().skip(1) {
        a += ck / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (x + 0.5) * t.ln() - t + a.ln() + HALF_LN_2PI
}

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` on the branch continuous away from the negative real axis.
pub fn log_gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("log_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::domain(format!("Gamma pole at {z}")));
    }
    if z.re >= 0.5 {
        return Ok(lanczos_right(z));
    }
    if z.im < 0.0 {
        return log_gamma(z.conj()).map(|w| w.conj());
    }
    // ln sin(πz) = −ln 2 + iπ/2 − iπz + Log(1 − e^{2πiz}), valid for Im z ≥ 0.
    let pi = core::f64::consts::PI;
    let e = (C64::i() * 2.0 * pi * z).exp();
    let ln_sin = c64(-core::f64::consts::LN_2, pi / 2.0) - C64::i() * pi * z + (c64(1.0, 0.0) - e).ln();
    Ok(c64(LN_PI, 0.0) - ln_sin - lanczos_right(c64(1.0, 0.0) - z))
}

/// Gamma integral `∫₀^∞ dx/x e^{-x}(z − 1 + (e^{−(z−1)x} − 1)/(1 − e^{−x}))`, for `Re z > 0`.
pub fn log_gamma_integral(z: C64, panels: usize) -> Result<C64> {
    if !(z.re > 0.0) {
        return Err(Error::domain("integral representation needs Re z > 0"));
    }
    let f = |x: f64| -> C64 {
        let em = (-x).exp();
        let one_minus = -(-x).exp_m1();
        let num = crate::quad::cexpm1(-(z - 1.0) * x);
        (em * ((z - 1.0) + num / one_minus)) / x
    };
    let decay = z.re.min(1.0);
    let xmax = 40.0 / decay;
    Ok(crate::quad::integrate_half_line(&f, xmax, panels, z.im.abs()))
}

/// Digamma `ψ(z)` for `Re z > 0`: recurrence up to `Re z ≥ 10`, then the asymptotic series.
pub fn digamma(z: C64) -> Result<C64> {
    if !(z.re > 0.0) {
        return Err(Error::domain(format!("digamma needs Re z > 0, got {z}")));
    }
    let mut z = z;
    let mut acc = C64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    // B_{2k}/(2k) for k = 1..6.
    const C: [f64; 6] = [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0];
    let mut series = C64::new(0.0, 0.0);
    let mut p = inv2;
    for c in C {
        series += p * c;
        p *= inv2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}
