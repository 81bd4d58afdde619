use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Proper rotation of three-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Checks `R^T R = I` and `det R = +1` within 1e-12.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        if defect > 1e-12 || (m.determinant() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("not a proper rotation (defect {defect:.2e})")));
        }
        Ok(Rotation(m))
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    /// `R_z(alpha) R_y(beta) R_z(gamma)`.
    pub fn euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Self {
        Rotation(Self::about_z(alpha).0 * Self::about_y(beta).0 * Self::about_z(gamma).0)
    }

    /// Recovers `(alpha, beta, gamma)`; for `beta` in {0, pi} the split
    /// between `alpha` and `gamma` is fixed by `gamma = 0`.
    pub fn to_euler_zyz(&self) -> (f64, f64, f64) {
        let m = &self.0;
        let beta = m[(2, 2)].clamp(-1.0, 1.0).acos();
        let sb = (m[(0, 2)].powi(2) + m[(1, 2)].powi(2)).sqrt();
        if sb > 1e-12 {
            (m[(1, 2)].atan2(m[(0, 2)]), beta, m[(2, 1)].atan2(-m[(2, 0)]))
        } else if m[(2, 2)] > 0.0 {
            (m[(1, 0)].atan2(m[(0, 0)]), 0.0, 0.0)
        } else {
            ((-m[(1, 0)]).atan2(-m[(0, 0)]), std::f64::consts::PI, 0.0)
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `self * other`.
    pub fn then_apply(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    pub fn inverse(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.0 * x
    }

    pub fn is_identity(&self) -> bool {
        (self.0 - Matrix3::identity()).abs().max() <= 1e-12
    }

    /// True when every entry is 0 or +-1 (lattice-preserving rotations).
    pub fn is_signed_permutation(&self) -> bool {
        self.0.iter().all(|x| x.abs() <= 1e-12 || (x.abs() - 1.0).abs() <= 1e-12)
    }

    /// The 24 proper rotations mapping the cubic lattice onto itself.
    pub fn octahedral() -> Vec<Rotation> {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(24);
        for p in perms {
            for signs in 0..8u32 {
                let mut m = Matrix3::zeros();
                for (row, &col) in p.iter().enumerate() {
                    m[(row, col)] = if signs >> row & 1 == 1 { -1.0 } else { 1.0 };
                }
                if m.determinant() > 0.0 {
                    out.push(Rotation(m));
                }
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Rotation, tol: f64) -> bool {
        (self.0 - other.0).abs().max() <= tol
    }
}
