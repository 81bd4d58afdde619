//! Wigner rotation matrices in the zyz Euler convention with Condon-Shortley
//! phases: `D^j_{m'm}(a, b, c) = e^{-i m' a} d^j_{m'm}(b) e^{-i m c}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::Rotation;
use crate::spin::Spin;

pub(crate) fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Small-d element with doubled arguments `j2 = 2j`, `mp2 = 2m'`, `m2 = 2m`.
pub fn small_d(j2: i32, mp2: i32, m2: i32, beta: f64) -> f64 {
    let (jpmp, jmmp, jpm, jmm) = ((j2 + mp2) / 2, (j2 - mp2) / 2, (j2 + m2) / 2, (j2 - m2) / 2);
    let pre = (factorial(jpmp) * factorial(jmmp) * factorial(jpm) * factorial(jmm)).sqrt();
    let (s, c) = (beta / 2.0).sin_cos();
    let dm = (mp2 - m2) / 2;
    let mut sum = 0.0;
    for k in 0.max(-dm)..=jpm.min(jmmp) {
        let denom = factorial(jpm - k) * factorial(k) * factorial(dm + k) * factorial(jmmp - k);
        let sign = if (dm + k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c.powi(j2 - dm - 2 * k) * s.powi(dm + 2 * k) / denom;
    }
    pre * sum
}

/// `D^j(R)` indexed by projections ordered `m = j, ..., -j`.
pub fn wigner_d(j: Spin, rot: &Rotation) -> DMatrix<C64> {
    let (alpha, beta, gamma) = rot.to_euler_zyz();
    let ms: Vec<i32> = j.twice_projections().collect();
    let j2 = j.twice() as i32;
    DMatrix::from_fn(ms.len(), ms.len(), |a, b| {
        let (mp2, m2) = (ms[a], ms[b]);
        let phase = -(mp2 as f64 * alpha + m2 as f64 * gamma) / 2.0;
        C64::from_polar(small_d(j2, mp2, m2, beta), phase)
    })
}
