use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use tpslab::gaussian::{analytic_ie_entropy, com_quadratic_form, GaussianPacket, QuadraticForm2};
use tpslab::hilbert::{sample_gaussian_pair, MomentumGrid};
use tpslab::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

fn common_grids(a: &GaussianPacket, b: &GaussianPacket, n: usize, cover: f64) -> (MomentumGrid, MomentumGrid) {
    let dp = 2.0 * cover * a.sigma.max(b.sigma) / (n as f64 - 1.0);
    (MomentumGrid::around(a.center[0], n, dp).unwrap(), MomentumGrid::around(b.center[0], n, dp).unwrap())
}

fn numeric_ie(a: &GaussianPacket, b: &GaussianPacket, n: usize) -> Vec<f64> {
    let (ga, gb) = common_grids(a, b, n, 6.0);
    let pair = sample_gaussian_pair(a, b, &ga, &gb).unwrap();
    let com = to_com_variables(&pair, Direction::Forward).unwrap();
    schmidt_spectrum(&com, &TensorProductStructure::named("P|q").unwrap()).unwrap().values().to_vec()
}

/// Independent oracle: SVD of the kernel sampled on a plain rectangular
/// (P, q) grid with quadrature weights.
fn kernel_svd(form: &QuadraticForm2, n: usize) -> Vec<f64> {
    let wp = 8.0 / form.alpha.sqrt().min(1.0);
    let wq = 8.0 / form.beta.sqrt().min(1.0);
    let (hp, hq) = (2.0 * wp / (n - 1) as f64, 2.0 * wq / (n - 1) as f64);
    let m = DMatrix::from_fn(n, n, |i, j| {
        let p = -wp + i as f64 * hp;
        let q = -wq + j as f64 * hq;
        C64::new(form.kernel(p, q) * (hp * hq).sqrt(), 0.0)
    });
    let mut s: Vec<f64> = m.singular_values().iter().map(|x| x * x).collect();
    let t: f64 = s.iter().sum();
    s.iter_mut().for_each(|x| *x /= t);
    s
}

#[test]
fn closed_form_matches_kernel_svd() {
    let form = QuadraticForm2::new(1.0, 1.0, 0.5);
    let numeric = kernel_svd(&form, 256);
    let closed = analytic_ie_entropy(&form).unwrap();
    for (n, l) in closed.spectrum(10).iter().zip(&numeric) {
        assert!((n - l).abs() < 1e-6, "{n} vs {l}");
    }
    let ent: f64 = numeric.iter().filter(|&&l| l > 1e-300).map(|l| -l * l.ln()).sum();
    assert!((ent - closed.entropy).abs() < 1e-6);
}

#[test]
fn grid_pipeline_matches_closed_form() {
    let t = Instant::now();
    let a = GaussianPacket::new(1.0, 1.0, 0.3);
    for b in
        [GaussianPacket::new(4.0, 1.8, -0.5), GaussianPacket::new(2.0, 1.0, 0.0), GaussianPacket::new(4.0, 2.0, 1.0)]
    {
        let numeric = numeric_ie(&a, &b, 256);
        let closed = analytic_ie_entropy(&com_quadratic_form(&a, &b, 1)).unwrap();
        let spec = closed.spectrum(10);
        for (i, x) in spec.iter().enumerate() {
            let y = numeric.get(i).copied().unwrap_or(0.0);
            assert!((x - y).abs() < 1e-6, "{i}: {x} vs {y}");
        }
        let s = tpslab::tps::SchmidtSpectrum::from_weights(numeric).unwrap();
        let e = entanglement_measures(&s).entropy;
        eprintln!("mu {} analytic {} numeric {}", closed.mu, closed.entropy, e);
    }
    eprintln!("elapsed {:?}", t.elapsed());
}
