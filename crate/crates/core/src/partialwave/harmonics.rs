//! Complex spherical harmonics with the Condon-Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// All `Y_l^m(cos_theta, phi)` for `l <= l_max`, indexed `l*l + (l - m)`
/// (so `m` runs from `l` down to `-l` inside each `l` block).
#[allow(clippy::needless_range_loop)]
pub fn spherical_harmonics(l_max: u32, cos_theta: f64, phi: f64) -> Vec<C64> {
    let lm = l_max as usize;
    let x = cos_theta;
    let s = (1.0 - x * x).max(0.0).sqrt();
    // q[l][m]: orthonormal associated Legendre without the CS phase
    let mut q = vec![vec![0.0; lm + 1]; lm + 1];
    q[0][0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=lm {
        q[m][m] = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s * q[m - 1][m - 1];
    }
    for m in 0..lm {
        q[m + 1][m] = ((2 * m + 3) as f64).sqrt() * x * q[m][m];
    }
    for m in 0..=lm {
        for l in m + 2..=lm {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            q[l][m] = a * (x * q[l - 1][m] - b * q[l - 2][m]);
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); (lm + 1) * (lm + 1)];
    for l in 0..=lm {
        for m in 0..=l {
            let cs = if m % 2 == 0 { 1.0 } else { -1.0 };
            let y = C64::from_polar(cs * q[l][m], m as f64 * phi);
            out[l * l + (l - m)] = y;
            if m > 0 {
                // Y_l^{-m} = (-1)^m conj(Y_l^m)
                out[l * l + (l + m)] = y.conj() * cs;
            }
        }
    }
    out
}

/// Legendre polynomials `P_0 .. P_l_max` at `x`.
pub fn legendre(l_max: u32, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; l_max as usize + 1];
    if l_max >= 1 {
        p[1] = x;
    }
    for l in 2..=l_max as usize {
        p[l] = ((2 * l - 1) as f64 * x * p[l - 1] - (l - 1) as f64 * p[l - 2]) / l as f64;
    }
    p
}
