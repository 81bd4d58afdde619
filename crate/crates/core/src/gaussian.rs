//! Closed forms for Gaussian momentum packets: the quadratic form of a
//! product of two packets in total/relative momentum, the mass-width
//! criterion, and the geometric Schmidt spectrum of a two-variable Gaussian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Vec3;

/// `psi(p) = (pi sigma^2)^(-dim/4) exp(-(p - p0)^2 / (2 sigma^2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub mass: f64,
    pub sigma: f64,
    #[serde(default)]
    pub center: Vec3,
    #[serde(default)]
    pub internal_energy: f64,
}

impl GaussianPacket {
    /// Packet centered at `center_x` on the first axis.
    pub fn new(mass: f64, sigma: f64, center_x: f64) -> Self {
        Self { mass, sigma, center: [center_x, 0.0, 0.0], internal_energy: 0.0 }
    }

    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("width sigma = {} must be positive", self.sigma)));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass {} must be positive", self.mass)));
        }
        Ok(())
    }

    /// `m / sigma^2`, the quantity compared by the mass-width criterion.
    pub fn mass_width_ratio(&self) -> f64 {
        self.mass / (self.sigma * self.sigma)
    }

    /// Continuum amplitude at `p` using the first `dim` axes.
    pub fn amplitude(&self, p: &Vec3, dim: usize) -> f64 {
        let s2 = self.sigma * self.sigma;
        let r2: f64 = (0..dim).map(|a| (p[a] - self.center[a]).powi(2)).sum();
        (std::f64::consts::PI * s2).powf(-(dim as f64) / 4.0) * (-r2 / (2.0 * s2)).exp()
    }
}

/// Per-axis exponent `-(alpha dP^2 + beta dq^2 + 2 gamma dP dq) / 2` with
/// `dP = P - P0`, `dq = q - q0`, identical on each of `dim` axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm2 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub p_center: Vec3,
    pub q_center: Vec3,
    pub dim: usize,
}

impl QuadraticForm2 {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma, p_center: [0.0; 3], q_center: [0.0; 3], dim: 1 }
    }

    pub fn is_normalizable(&self) -> bool {
        self.alpha > 0.0 && self.beta > 0.0 && self.alpha * self.beta - self.gamma * self.gamma > 0.0
    }

    /// Unnormalized per-axis value `exp(-(alpha P^2 + beta q^2 + 2 gamma P q)/2)`
    /// with centers removed.
    pub fn kernel(&self, dp: f64, dq: f64) -> f64 {
        (-0.5 * (self.alpha * dp * dp + self.beta * dq * dq + 2.0 * self.gamma * dp * dq)).exp()
    }
}

/// Substitutes `p_A = (m_A/M) P + q`, `p_B = (m_B/M) P - q` into the
/// exponent of the product of two packets.
pub fn com_quadratic_form(a: &GaussianPacket, b: &GaussianPacket, dim: usize) -> QuadraticForm2 {
    let m = a.mass + b.mass;
    let (fa, fb) = (a.mass / m, b.mass / m);
    let (wa, wb) = (1.0 / (a.sigma * a.sigma), 1.0 / (b.sigma * b.sigma));
    let mut p_center = [0.0; 3];
    let mut q_center = [0.0; 3];
    for ax in 0..3 {
        p_center[ax] = a.center[ax] + b.center[ax];
        q_center[ax] = (b.mass * a.center[ax] - a.mass * b.center[ax]) / m;
    }
    QuadraticForm2 {
        alpha: fa * fa * wa + fb * fb * wb,
        beta: wa + wb,
        gamma: fa * wa - fb * wb,
        p_center,
        q_center,
        dim,
    }
}

/// Closed-form internal/external entanglement of a Gaussian form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianEntanglement {
    /// Per-axis Schmidt ratio: `lambda_n = (1 - mu) mu^n`.
    pub mu: f64,
    /// Entropy in nats, summed over axes.
    pub entropy: f64,
    pub dim: usize,
}

impl GaussianEntanglement {
    /// Largest `n_terms` Schmidt weights, descending. In 3D the weights are
    /// products over axes, `(1 - mu)^3 mu^N` with multiplicity `(N+1)(N+2)/2`.
    pub fn spectrum(&self, n_terms: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n_terms);
        let mut level = 0u32;
        while out.len() < n_terms {
            let w = (1.0 - self.mu).powi(self.dim as i32) * self.mu.powi(level as i32);
            let mult = match self.dim {
                1 => 1,
                _ => ((level + 1) * (level + 2) / 2) as usize,
            };
            for _ in 0..mult {
                if out.len() == n_terms {
                    break;
                }
                out.push(w);
            }
            if self.mu == 0.0 {
                out.resize(n_terms, 0.0);
            }
            level += 1;
        }
        out
    }
}

/// Per-axis entropy of the geometric spectrum with ratio `mu`.
pub fn geometric_entropy(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    -(1.0 - mu).ln() - mu / (1.0 - mu) * mu.ln()
}

/// Diagonalizes the two-variable Gaussian by the Mehler kernel: with
/// `kappa = gamma^2 / (alpha beta)`, the Schmidt ratio is
/// `mu = kappa / (1 + sqrt(1 - kappa))^2`.
pub fn analytic_ie_entropy(form: &QuadraticForm2) -> Result<GaussianEntanglement> {
    if !form.is_normalizable() {
        return Err(Error::InvalidParameter(format!(
            "non-normalizable form (alpha={}, beta={}, gamma={})",
            form.alpha, form.beta, form.gamma
        )));
    }
    let kappa = form.gamma * form.gamma / (form.alpha * form.beta);
    let mu = kappa / (1.0 + (1.0 - kappa).sqrt()).powi(2);
    Ok(GaussianEntanglement { mu, entropy: form.dim as f64 * geometric_entropy(mu), dim: form.dim })
}

/// `|m_A/s_A^2 - m_B/s_B^2| <= tol * max(m_A/s_A^2, m_B/s_B^2)`.
pub fn masswidth_satisfied(a: &GaussianPacket, b: &GaussianPacket, tol: f64) -> bool {
    let (ra, rb) = (a.mass_width_ratio(), b.mass_width_ratio());
    (ra - rb).abs() <= tol * ra.max(rb)
}

/// Tolerance on `|gamma|` equivalent to `masswidth_satisfied(a, b, tol)`:
/// `gamma = (r_A - r_B) / M` with `r = m / sigma^2`, so the bound maps to
/// `tol * max(r_A, r_B) / M`.
pub fn gamma_tolerance(a: &GaussianPacket, b: &GaussianPacket, tol: f64) -> f64 {
    tol * a.mass_width_ratio().max(b.mass_width_ratio()) / (a.mass + b.mass)
}
