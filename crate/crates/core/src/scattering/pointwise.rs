//! Out-states of spinless 3D pairs evaluated pointwise on particle grids.
//!
//! For each `(p_A, p_B)` the relative wavefunction on the sphere `|q'| =
//! |q|` is projected on Legendre kernels,
//! `psi_out(P, q) = sum_l (2l+1)/(4 pi) e^{2 i delta_l(|q|)}
//! int dOmega' P_l(q^ . q'^) psi_in(P, |q| q'^)`,
//! which avoids a 6D grid and any interpolation.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::PhaseShiftModel;
use crate::error::{Error, Result};
use crate::hilbert::{MomentumGrid, Vec3};
use crate::partialwave::{legendre, AngularQuadrature, PairLabel};

/// In-state truncated to `l <= l_max` and the matching out-state, as
/// `[p_A] x [p_B]` amplitude matrices with weights folded in.
#[derive(Clone, Debug)]
pub struct PointwiseScattering {
    pub reference: DMatrix<C64>,
    pub out: DMatrix<C64>,
}

pub fn scatter_pointwise_3d(
    pair: &PairLabel,
    grid_a: &MomentumGrid,
    grid_b: &MomentumGrid,
    model: &PhaseShiftModel,
    l_max: u32,
    quad: &AngularQuadrature,
    psi_in: impl Fn(&Vec3, &Vec3) -> C64 + Sync,
) -> Result<PointwiseScattering> {
    if grid_a.dim() != 3 || grid_b.dim() != 3 {
        return Err(Error::InvalidParameter("pointwise scattering needs 3D particle grids".into()));
    }
    if pair.s_a.twice() != 0 || pair.s_b.twice() != 0 {
        return Err(Error::InvalidParameter("pointwise scattering covers spinless pairs".into()));
    }
    quad.check_lmax(l_max)?;
    model.validate()?;
    let total = pair.total_mass();
    let w = (grid_a.cell_volume() * grid_b.cell_volume()).sqrt();
    let dirs: Vec<Vec3> = (0..quad.len()).map(|i| quad.direction(i)).collect();
    let (na, nb) = (grid_a.len(), grid_b.len());
    let rows: Vec<Result<Vec<(C64, C64)>>> = (0..na)
        .into_par_iter()
        .map(|ia| {
            let pa = grid_a.momentum(ia);
            let mut row = Vec::with_capacity(nb);
            for ib in 0..nb {
                let pb = grid_b.momentum(ib);
                let p: Vec3 = [pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]];
                let q: Vec3 = std::array::from_fn(|x| (pair.m_b * pa[x] - pair.m_a * pb[x]) / total);
                let k = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
                if k == 0.0 {
                    let z = psi_in(&pa, &pb) * w;
                    row.push((z, z));
                    continue;
                }
                let qhat = [q[0] / k, q[1] / k, q[2] / k];
                let mut proj = vec![C64::new(0.0, 0.0); l_max as usize + 1];
                for (node, d) in dirs.iter().enumerate() {
                    let qq = [k * d[0], k * d[1], k * d[2]];
                    let (a, b) = pair.particle_momenta(&p, &qq);
                    let v = psi_in(&a, &b) * quad.weights()[node];
                    let cos = qhat[0] * d[0] + qhat[1] * d[1] + qhat[2] * d[2];
                    for (acc, pl) in proj.iter_mut().zip(legendre(l_max, cos)) {
                        *acc += v * pl;
                    }
                }
                let deltas = model.spinless_shifts(l_max, k)?;
                let mut reference = C64::new(0.0, 0.0);
                let mut out = C64::new(0.0, 0.0);
                for (l, a) in proj.iter().enumerate() {
                    let c = (2 * l + 1) as f64 / (4.0 * std::f64::consts::PI);
                    reference += a * c;
                    out += a * c * C64::from_polar(1.0, 2.0 * deltas[l]);
                }
                row.push((reference * w, out * w));
            }
            Ok(row)
        })
        .collect();
    let mut reference = DMatrix::zeros(na, nb);
    let mut out = DMatrix::zeros(na, nb);
    for (ia, row) in rows.into_iter().enumerate() {
        for (ib, (r, o)) in row?.into_iter().enumerate() {
            reference[(ia, ib)] = r;
            out[(ia, ib)] = o;
        }
    }
    Ok(PointwiseScattering { reference, out })
}
