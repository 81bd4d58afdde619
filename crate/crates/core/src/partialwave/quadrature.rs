use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Product rule on the sphere: Gauss-Legendre in `cos(theta)` times a
/// uniform rule in `phi`. Exact for spherical harmonics up to degree
/// `min(2 n_theta - 1, n_phi - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularQuadrature {
    n_theta: usize,
    n_phi: usize,
    cos_theta: Vec<f64>,
    phi: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidQuadrature("need at least one node per angle".into()));
        }
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut cos_theta = Vec::with_capacity(n_theta * n_phi);
        let mut phi = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            for k in 0..n_phi {
                cos_theta.push(*xi);
                phi.push(k as f64 * dphi);
                weights.push(wi * dphi);
            }
        }
        Ok(Self { n_theta, n_phi, cos_theta, phi, weights })
    }

    /// Smallest rule that integrates products of harmonics with `l <= l_max`.
    pub fn for_lmax(l_max: u32) -> Self {
        Self::new(l_max as usize + 1, 2 * l_max as usize + 1).expect("non-empty rule")
    }

    pub fn check_lmax(&self, l_max: u32) -> Result<()> {
        if self.n_theta < l_max as usize + 1 || self.n_phi < 2 * l_max as usize + 1 {
            return Err(Error::InvalidQuadrature(format!(
                "{}x{} nodes cannot resolve l_max = {l_max} (need {}x{})",
                self.n_theta,
                self.n_phi,
                l_max + 1,
                2 * l_max + 1
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> (f64, f64) {
        (self.cos_theta[i], self.phi[i])
    }

    /// Unit vector of node `i`.
    pub fn direction(&self, i: usize) -> [f64; 3] {
        let (c, p) = self.node(i);
        let s = (1.0 - c * c).max(0.0).sqrt();
        [s * p.cos(), s * p.sin(), c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn sphere_area() {
        let q = AngularQuadrature::new(5, 9).unwrap();
        let total: f64 = q.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-13);
        assert!(q.check_lmax(4).is_ok());
        assert!(q.check_lmax(5).is_err());
    }
}
