//! Phase shifts against direct integration of the radial equation.

use num_complex::Complex64 as C64;
use tpslab::scattering::{spherical_j, spherical_y, ChannelKey, PhaseShiftModel};

/// Integrates `u'' = (l(l+1)/r^2 - k^2 + 2 mu V(r)) u` with RK4 from
/// `(r0, u0, du0)` to `r1`.
#[allow(clippy::too_many_arguments)]
fn rk4(l: u32, k: f64, pot: &dyn Fn(f64) -> f64, r0: f64, r1: f64, u0: f64, du0: f64, steps: usize) -> (f64, f64) {
    let ll = (l * (l + 1)) as f64;
    let f = |r: f64, u: f64| (ll / (r * r) - k * k + pot(r)) * u;
    let h = (r1 - r0) / steps as f64;
    let (mut r, mut u, mut du) = (r0, u0, du0);
    for _ in 0..steps {
        let (k1u, k1d) = (du, f(r, u));
        let (k2u, k2d) = (du + 0.5 * h * k1d, f(r + 0.5 * h, u + 0.5 * h * k1u));
        let (k3u, k3d) = (du + 0.5 * h * k2d, f(r + 0.5 * h, u + 0.5 * h * k2u));
        let (k4u, k4d) = (du + h * k3d, f(r + h, u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        r += h;
    }
    (u, du)
}

/// `e^{2 i delta}` from matching `u = cos(d) F - sin(d) G` outside the range,
/// with Riccati functions `F = x j_l`, `G = x y_l`.
fn matched(l: u32, k: f64, r: f64, u: f64, du: f64) -> C64 {
    let x = k * r;
    let lu = l as usize;
    let j = spherical_j(lu + 1, x);
    let y = spherical_y(lu + 1, x);
    let (f, g) = (x * j[lu], x * y[lu]);
    let (fp, gp) = if l == 0 {
        (x.cos(), x.sin())
    } else {
        let jm = spherical_j(lu - 1, x)[lu - 1];
        let ym = spherical_y(lu - 1, x)[lu - 1];
        (x * jm - l as f64 * j[lu], x * ym - l as f64 * y[lu])
    };
    let tan = (k * u * fp - du * f) / (k * u * gp - du * g);
    let d = tan.atan();
    C64::from_polar(1.0, 2.0 * d)
}

#[test]
fn hard_sphere_matches_radial_integration() {
    let a = 0.5;
    let model = PhaseShiftModel::HardSphere { radius: a };
    for l in 0..=4 {
        for &k in &[0.3, 1.0, 2.7, 6.0] {
            let (u, du) = rk4(l, k, &|_| 0.0, a, a + 1.5, 0.0, 1.0, 20_000);
            let oracle = matched(l, k, a + 1.5, u, du);
            let delta = model.phase_shift(ChannelKey::spinless(l), k).unwrap();
            let got = C64::from_polar(1.0, 2.0 * delta);
            assert!((oracle - got).norm() < 1e-9, "l={l} k={k}: {oracle} vs {got}");
        }
    }
    // the named example and the threshold law
    assert!((model.phase_shift(ChannelKey::spinless(0), 1.0).unwrap() + 0.5).abs() < 1e-14);
    let unit = PhaseShiftModel::HardSphere { radius: 1.0 };
    let (u, du) = rk4(2, 1e-2, &|_| 0.0, 1.0, 2.0, 0.0, 1.0, 20_000);
    let oracle = matched(2, 1e-2, 2.0, u, du).arg() / 2.0;
    assert!(oracle.abs() < 1e-6);
    assert!(unit.phase_shift(ChannelKey::spinless(2), 1e-2).unwrap().abs() < 1e-6);
}

#[test]
fn square_well_matches_radial_integration() {
    let (depth, a, mu) = (2.5, 1.2, 0.75);
    let model = PhaseShiftModel::SquareWell { depth, radius: a, reduced_mass: mu };
    let pot = move |r: f64| if r < a { -2.0 * mu * depth } else { 0.0 };
    for &k in &[0.2, 0.9, 2.0, 4.5] {
        let r0 = 1e-6;
        let (u1, du1) = rk4(0, k, &pot, r0, a, r0, 1.0, 20_000);
        let (u, du) = rk4(0, k, &pot, a, a + 1.0, u1, du1, 20_000);
        let oracle = matched(0, k, a + 1.0, u, du);
        let got = C64::from_polar(1.0, 2.0 * model.phase_shift(ChannelKey::spinless(0), k).unwrap());
        assert!((oracle - got).norm() < 1e-8, "k={k}: {oracle} vs {got}");
    }
    assert_eq!(model.phase_shift(ChannelKey::spinless(1), 1.0).unwrap(), 0.0);
}
